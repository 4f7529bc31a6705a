// Acceptance runner: one PASS/FAIL line per criterion. Exit status is the number of failures.

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "causalog/cli.hpp"
#include "causalog/errors.hpp"
#include "causalog/grounder.hpp"
#include "causalog/parser.hpp"
#include "causalog/printer.hpp"
#include "causalog/process_sim.hpp"
#include "causalog/wf_engine.hpp"
#include "support/corpus.hpp"
#include "support/properties.hpp"

using namespace causalog;
using namespace testsupport;

namespace {

std::set<std::string> atom_strings(const Structure& s) {
    std::set<std::string> out;
    for (const auto& a : s.true_atoms()) out.insert(a.render());
    return out;
}

std::set<std::string> atom_strings(const Structure& s, const std::string& pred) {
    std::set<std::string> out;
    for (const auto& a : s.true_atoms())
        if (a.pred == pred) out.insert(a.render());
    return out;
}

std::string show(const std::set<std::string>& xs) {
    std::string s = "{";
    for (const auto& x : xs) s += (s.size() > 1 ? ", " : "") + x;
    return s + "}";
}

// Each check appends a reason to `why` for every failed expectation.
struct Check {
    std::ostringstream why;
    void expect(bool ok, const std::string& what) {
        if (!ok) why << (why.str().empty() ? "" : "; ") << what;
    }
    bool ok() const { return why.str().empty(); }
};

void gear(Check& c) {
    auto on = load("gear.foc", "gear_pedal.json");
    ModelSet ms = enumerate_models(on.theory, on.exo);
    const std::set<std::string> want = {"Pedal", "Turn(BigGear)", "Turn(SmallGear)"};
    c.expect(ms.models.size() == 1, "pedal: expected 1 model, got " + std::to_string(ms.models.size()));
    if (ms.models.size() == 1) c.expect(atom_strings(ms.models[0].structure) == want, "pedal model differs");

    Trace tr = simulate(on.theory, on.exo, 0);
    if (ms.models.size() == 1)
        c.expect(equal_modulo_created(tr.final_state(), ms.models[0].structure), "trace final differs from model");
    std::set<std::string> introduced;
    auto before = atom_strings(tr.states.front());
    for (const auto& a : atom_strings(tr.final_state()))
        if (!before.count(a)) introduced.insert(a);
    c.expect(introduced == std::set<std::string>{"Turn(BigGear)", "Turn(SmallGear)"},
             "trace introduces " + show(introduced));

    auto off = load("gear.foc", "gear_still.json");
    ModelSet ms2 = enumerate_models(off.theory, off.exo);
    c.expect(ms2.models.size() == 1, "still: expected 1 model");
    if (ms2.models.size() == 1) c.expect(atom_strings(ms2.models[0].structure).empty(), "still model not empty");
    c.expect(atom_strings(simulate(off.theory, off.exo, 0).final_state()).empty(), "still trace not empty");
}

void lottery(Check& c) {
    auto on = load("lottery.foc", "lottery.json");
    std::set<std::set<std::string>> got;
    for (const auto& m : enumerate_models(on.theory, on.exo).models) got.insert(atom_strings(m.structure, "PermRes"));
    const std::set<std::set<std::string>> want = {
        {"PermRes(a)"}, {"PermRes(a)", "PermRes(b)"}, {"PermRes(a)", "PermRes(c)"}};
    c.expect(got == want, "lottery on: " + std::to_string(got.size()) + " distinct PermRes sets");

    auto off = load("lottery.foc", "lottery_off.json");
    ModelSet ms = enumerate_models(off.theory, off.exo);
    c.expect(ms.models.size() == 1, "lottery off: expected 1 model");
    if (ms.models.size() == 1)
        c.expect(atom_strings(ms.models[0].structure, "PermRes") == std::set<std::string>{"PermRes(a)"},
                 "lottery off model differs");
}

void mail(Check& c) {
    auto l = load("mail.foc", "mail.json");
    ModelSet ms = enumerate_models(l.theory, l.exo);
    c.expect(ms.models.size() == 8, "expected 8 models, got " + std::to_string(ms.models.size()));
    const Structure* seven = nullptr;
    for (const auto& m : ms.models)
        if (atom_strings(m.structure, "Received") == std::set<std::string>{"Received(_p1,7)"}) seven = &m.structure;
    c.expect(seven != nullptr, "no model with Received(_p1,7)");
    if (!seven) return;
    std::set<std::string> on;
    for (int t = 1; t <= 7; ++t) on.insert("OnCh(_p1," + std::to_string(t) + ")");
    c.expect(atom_strings(*seven, "OnCh") == on, "OnCh in that model is " + show(atom_strings(*seven, "OnCh")));

    // a seeded process that picks d = 7
    bool found = false;
    for (std::uint64_t seed = 0; seed < 2000 && !found; ++seed) {
        Trace tr = simulate(l.theory, l.exo, seed);
        if (!equal_modulo_created(tr.final_state(), *seven)) continue;
        found = true;
        c.expect(tr.growth_steps() == 7, "trace grows for " + std::to_string(tr.growth_steps()) + " steps");
    }
    c.expect(found, "no seed reaches the d = 7 model");
}

void elimination(Check& c) {
    struct Case {
        std::string foc, json;
        std::vector<std::string> reservoir;
    };
    const std::vector<Case> cases = {
        {"mail.foc", "mail.json", {"r1", "r2"}},
        {"two_new.foc", "two_new.json", {"r1", "r2", "r3"}},
        {"jboss.foc", "jboss.json", {"r1", "r2"}},
        {"president.foc", "president.json", {"r1", "r2", "r3"}},
        {"foal.foc", "foal.json", {"r1", "r2"}},
    };
    for (const auto& k : cases) {
        auto l = load(k.foc, k.json);
        NewElimination el = eliminate_new(l.theory);
        bool has_new = print_theory(el.theory).find("NEW") != std::string::npos;
        c.expect(!has_new, k.foc + ": NEW survives elimination");
        ModelSet original = enumerate_models(l.theory, l.exo);
        Structure exo2 = with_reservoir(l.exo, k.reservoir);
        ModelSet eliminated = enumerate_models(el.theory, exo2);
        std::vector<Structure> mapped;
        const std::set<std::string> res(k.reservoir.begin(), k.reservoir.end());
        for (const auto& m : eliminated.models) mapped.push_back(normalize_eliminated(m.structure, el.aux_predicates, res));
        c.expect(!original.budget_hit && !eliminated.budget_hit, k.foc + ": budget hit");
        c.expect(!original.models.empty(), k.foc + ": no models");
        const std::set<std::string> aux(el.aux_predicates.begin(), el.aux_predicates.end());
        c.expect(same_model_sets(original.structures(), mapped, aux),
                 k.foc + ": " + std::to_string(original.models.size()) + " original vs " +
                     std::to_string(eliminated.models.size()) + " eliminated models differ");
    }
}

void fo_filtering(Check& c) {
    auto l = load("mail_two.foc", "mail_two.json");
    ModelSet with = enumerate_models(l.theory, l.exo);
    Theory bare = Theory::make(l.theory.vocabulary, l.theory.cees, {});
    std::vector<Structure> filtered;
    for (const auto& m : enumerate_models(bare, l.exo).models) {
        bool all = true;
        for (const auto& f : l.theory.sentences) all = all && eval2(f, m.structure);
        if (all) filtered.push_back(m.structure);
    }
    c.expect(!with.models.empty(), "no models for the two-mail theory");
    c.expect(same_model_sets(with.structures(), filtered), "sentence filtering differs");

    auto w = load("mail_wrong.foc", "mail_wrong.json");
    ModelSet wrong = enumerate_models(w.theory, w.exo);
    int extra = 0;
    for (const auto& m : wrong.models) {
        bool in_correct = false;
        for (const auto& k : with.models) in_correct = in_correct || equal_modulo_created(m.structure, k.structure);
        if (in_correct) continue;
        ++extra;
        if (unsupported_atoms(l.theory, m.structure).empty())
            c.expect(false, "extra model of the effect encoding is supported: " + render_state(m.structure));
    }
    c.expect(extra > 0, "effect encoding adds no models");
}

void differential(Check& c) {
    PropertyResult r = check_wf_differential(20240601, 100);
    c.expect(r.cases == 100 && r.ok(), std::to_string(r.cases - r.failures) + "/100 agree; " + r.first_failure);
}

void no_spontaneous(Check& c) {
    auto l = load("negation_cycle.foc", "negation_cycle.json");
    c.expect(enumerate_models(l.theory, l.exo).models.empty(), "negation cycle has a model");
    DiffReport d = compare_with_wf(l.theory, l.exo);
    c.expect(!d.agree, "engines agree on the negation cycle");
    c.expect(d.only_wf.empty(), "wf-only models present");
    c.expect(d.only_process.size() == 1 &&
                 atom_strings(d.only_process[0]) == std::set<std::string>{"P", "Q"},
             "process-only finals are not exactly {P, Q}");
    std::ostringstream out, err;
    int code = run_cli({"diff", corpus_path("negation_cycle.foc"), corpus_path("negation_cycle.json")}, out, err);
    c.expect(code == 4, "diff exits with " + std::to_string(code));
}

void duplicates(Check& c) {
    auto l = load("double_select.foc", "double_select.json");
    std::set<std::set<std::string>> got;
    for (const auto& m : enumerate_models(l.theory, l.exo).models) got.insert(atom_strings(m.structure));
    const std::set<std::set<std::string>> want = {{"Q(a)"}, {"Q(b)"}, {"Q(a)", "Q(b)"}};
    c.expect(got == want, "got " + std::to_string(got.size()) + " models");
}

void properties(Check& c) {
    PropertyResult total;
    auto run = [&](const char* name, PropertyResult r) {
        c.expect(r.ok(), std::string(name) + ": " + r.first_failure);
        total += r;
    };
    run("trace monotonicity", check_trace_monotonicity(11, 200));
    run("supportedness", check_supportedness(12, 200));
    run("eval coincidence", check_eval_properties(13, 300));
    run("formula round-trip", check_formula_roundtrip(14, 100));
    run("engine agreement", check_engine_agreement(15, 200));

    PropertyResult corpus;
    for (const char* f : {"double_select", "empty", "foal", "gear", "jboss", "lottery", "mail", "mail_two",
                          "mail_wrong", "negation_cycle", "or_gear", "president", "scale", "two_new"}) {
        ++corpus.cases;
        Theory t = parse_theory(read_text(corpus_path(std::string(f) + ".foc")));
        if (!(parse_theory(print_theory(t)) == t)) corpus.fail(std::string(f) + " does not round-trip");
        Theory e = eliminate_new(t).theory;
        if (!(parse_theory(print_theory(e)) == e)) corpus.fail(std::string(f) + " (eliminated) does not round-trip");
    }
    run("corpus round-trip", corpus);
    c.expect(total.cases >= 1000, "only " + std::to_string(total.cases) + " cases");
    std::cout << "  (" << total.cases << " randomized and corpus cases)\n";
}

void scale(Check& c) {
    auto l = load("scale.foc", "scale.json");
    // count the instances the search works with: exogenously false ones are pruned
    Structure d = default_extension(l.exo, l.theory.vocabulary, endogenous_predicates(l.theory));
    PartialStructure view(d, endogenous_predicates(l.theory));
    view.set_default(TruthValue::Unknown);
    GroundOptions opts;
    opts.static_view = &view;
    GroundTree tree = ground_theory(l.theory, d, opts);
    c.expect(tree.choice_points.size() <= 12, std::to_string(tree.choice_points.size()) + " choice points");
    c.expect(l.exo.domain().size() <= 8, "domain too large");
    Budget b;
    b.max_new = 4;
    auto t0 = std::chrono::steady_clock::now();
    ModelSet par = enumerate_models(l.theory, l.exo, b);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.expect(secs < 10.0, "took " + std::to_string(secs) + " s");
    c.expect(!par.budget_hit && par.models.size() == 243,
             "expected 243 complete models, got " + std::to_string(par.models.size()));
    std::string ref = model_set_to_json(par, l.theory.vocabulary);
    for (int jobs : {1, 2, 3}) {
        b.jobs = jobs;
        c.expect(model_set_to_json(enumerate_models(l.theory, l.exo, b), l.theory.vocabulary) == ref,
                 "--jobs " + std::to_string(jobs) + " changes output");
    }
    std::ostringstream o1, o2, err;
    run_cli({"models", corpus_path("scale.foc"), corpus_path("scale.json"), "--max-new", "4", "--jobs", "1"}, o1, err);
    run_cli({"models", corpus_path("scale.foc"), corpus_path("scale.json"), "--max-new", "4", "--jobs", "4"}, o2, err);
    c.expect(o1.str() == o2.str() && !o1.str().empty(), "command-line output depends on --jobs");
    std::cout << "  (scale enumeration " << secs << " s)\n";
}

}  // namespace

// With an argument N, runs criterion N only.
int main(int argc, char** argv) {
    const int only = argc > 1 ? std::atoi(argv[1]) : 0;
    const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria = {
        {"gear determinism", gear},
        {"lottery", lottery},
        {"mail", mail},
        {"creation elimination", elimination},
        {"sentence filtering", fo_filtering},
        {"well-founded differential", differential},
        {"no spontaneous generation", no_spontaneous},
        {"duplicate independence", duplicates},
        {"property suites", properties},
        {"scale and job invariance", scale},
    };
    int failed = 0;
    int ran = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (only != 0 && only != static_cast<int>(i) + 1) continue;
        ++ran;
        Check c;
        auto t0 = std::chrono::steady_clock::now();
        try {
            criteria[i].second(c);
        } catch (const std::exception& e) {
            c.expect(false, std::string("exception: ") + e.what());
        }
        std::cout << "criterion " << (i + 1) << " " << criteria[i].first << ": " << (c.ok() ? "PASS" : "FAIL");
        if (!c.ok()) std::cout << " (" << c.why.str() << ")";
        std::cout << "  [" << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() << " s]";
        std::cout << std::endl;
        failed += c.ok() ? 0 : 1;
    }
    if (ran == 0) {
        std::cerr << "no criterion " << only << "\n";
        return 1;
    }
    std::cout << (ran - failed) << "/" << ran << " criteria passed" << std::endl;
    return failed;
}
