// Serial reference search vs the batched OpenMP search on corpus theories.

#include <benchmark/benchmark.h>

#include "causalog/wf_engine.hpp"
#include "support/corpus.hpp"

using namespace causalog;

namespace {

const testsupport::Loaded& theory(int which) {
    static const testsupport::Loaded scale = testsupport::load("scale.foc", "scale.json");
    static const testsupport::Loaded wrong = testsupport::load("mail_wrong.foc", "mail_wrong.json");
    return which == 0 ? scale : wrong;
}

void BM_Serial(benchmark::State& st) {
    const auto& l = theory(static_cast<int>(st.range(0)));
    Budget b;
    b.max_new = 4;
    std::size_t n = 0;
    for (auto _ : st) n = enumerate_models_serial(l.theory, l.exo, b).models.size();
    st.counters["models"] = static_cast<double>(n);
}

void BM_Parallel(benchmark::State& st) {
    const auto& l = theory(static_cast<int>(st.range(0)));
    Budget b;
    b.max_new = 4;
    b.jobs = static_cast<int>(st.range(1));
    std::size_t n = 0;
    for (auto _ : st) n = enumerate_models(l.theory, l.exo, b).models.size();
    st.counters["models"] = static_cast<double>(n);
}

}  // namespace

// arg 0: 0 = scale, 1 = mail_wrong; arg 1: threads (0 = OpenMP default)
BENCHMARK(BM_Serial)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Parallel)->Args({0, 0})->Args({0, 2})->Args({1, 0})->Args({1, 2})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
