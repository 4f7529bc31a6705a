#pragma once
// Randomised property checks shared by the unit suites and the acceptance runner. Each returns the
// number of cases tried and a description of the first failure.

#include <cstdint>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "causalog/errors.hpp"
#include "causalog/eval.hpp"
#include "causalog/parser.hpp"
#include "causalog/printer.hpp"
#include "causalog/process_sim.hpp"
#include "causalog/structure.hpp"
#include "causalog/wf_engine.hpp"
#include "random_theory.hpp"
#include "wf_oracle.hpp"

namespace testsupport {

struct PropertyResult {
    int cases = 0;
    int failures = 0;
    std::string first_failure;

    void fail(const std::string& why) {
        if (failures++ == 0) first_failure = why;
    }
    bool ok() const { return failures == 0; }
    PropertyResult& operator+=(const PropertyResult& o) {
        cases += o.cases;
        if (failures == 0 && o.failures) first_failure = o.first_failure;
        failures += o.failures;
        return *this;
    }
};

// ---------------------------------------------------------------------------
// Random formulas over P/1, R/2, S/0 (endogenous), E/1 (exogenous) and constant c0.

inline causalog::Vocabulary formula_vocabulary() {
    causalog::Vocabulary v;
    v.predicates = {{"P", 1}, {"R", 2}, {"S", 0}, {"E", 1}};
    v.constants = {"c0"};
    return v;
}

inline const std::set<std::string>& formula_endogenous() {
    static const std::set<std::string> e = {"P", "R", "S"};
    return e;
}

inline causalog::Formula random_formula(std::mt19937_64& rng, int depth, std::vector<std::string>& scope) {
    using namespace causalog;
    auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    auto term = [&]() {
        if (!scope.empty() && uni(0, 99) < 80) return Term::var(scope[uni(0, static_cast<int>(scope.size()) - 1)]);
        return Term::constant("c0");
    };
    if (depth == 0 || uni(0, 99) < 20) {
        switch (uni(0, 6)) {
            case 0: return fo::atom("P", {term()});
            case 1: return fo::atom("R", {term(), term()});
            case 2: return fo::atom("S");
            case 3: return fo::atom("E", {term()});
            case 4: return fo::atom(uni(0, 1) ? "=" : "~=", {term(), term()});
            case 5: return uni(0, 1) ? fo::truth() : fo::falsity();
            default: return fo::atom("P", {term()});
        }
    }
    auto sub = [&]() { return random_formula(rng, depth - 1, scope); };
    auto quantified = [&](int kind) {
        std::string v = uni(0, 1) ? "x" : "y";
        scope.push_back(v);
        Formula q = kind >= 2 ? sub() : fo::truth();
        Formula body = sub();
        scope.pop_back();
        switch (kind) {
            case 0: return fo::forall({v}, body);
            case 1: return fo::exists({v}, body);
            case 2: return fo::forall_r({v}, q, body);
            default: return fo::exists_r({v}, q, body);
        }
    };
    switch (uni(0, 6)) {
        case 0: return fo::neg(sub());
        case 1: return fo::conj(sub(), sub());
        case 2: return fo::disj(sub(), sub());
        case 3: return fo::implies(sub(), sub());
        default: return quantified(uni(0, 3));
    }
}

inline causalog::Formula random_sentence(std::mt19937_64& rng, int depth) {
    std::vector<std::string> scope;
    return random_formula(rng, depth, scope);
}

/// Random total structure over the formula vocabulary with 1..3 elements (c0 denotes d0).
inline causalog::Structure random_total(std::mt19937_64& rng) {
    using namespace causalog;
    auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    Structure s;
    int n = uni(1, 3);
    std::vector<DomainElement> dom;
    for (int i = 0; i < n; ++i) {
        dom.push_back(DomainElement::named("d" + std::to_string(i)));
        s.add_element(dom.back());
    }
    s.set_constant("c0", dom[0]);
    for (const char* p : {"P", "R", "S", "E"}) s.declare(p);
    if (uni(0, 1)) s.add_fact("S", {});
    for (const auto& a : dom) {
        if (uni(0, 1)) s.add_fact("P", {a});
        if (uni(0, 1)) s.add_fact("E", {a});
        for (const auto& b : dom)
            if (uni(0, 2) == 0) s.add_fact("R", {a, b});
    }
    return s;
}

/// Copy of `total` with a random subset of its endogenous atoms made unknown.
inline causalog::PartialStructure random_weakening(std::mt19937_64& rng, const causalog::Structure& total) {
    using namespace causalog;
    PartialStructure p = PartialStructure::from_total(total, formula_endogenous());
    const auto& dom = total.domain();
    std::vector<DomainAtom> atoms = {{"S", {}}};
    for (const auto& a : dom) {
        atoms.push_back({"P", {a}});
        for (const auto& b : dom) atoms.push_back({"R", {a, b}});
    }
    for (const auto& a : atoms)
        if (std::uniform_int_distribution<int>(0, 2)(rng) == 0) p.set(a, TruthValue::Unknown);
    return p;
}

/// eval3 on a total structure equals eval2; desugaring restricted quantifiers preserves eval2;
/// every known eval3 value on a weakening agrees with the total value.
inline PropertyResult check_eval_properties(std::uint64_t seed, int n) {
    using namespace causalog;
    PropertyResult r;
    std::mt19937_64 rng(seed);
    for (int i = 0; i < n; ++i) {
        ++r.cases;
        Formula f = random_sentence(rng, 3);
        Structure s = random_total(rng);
        bool two = eval2(f, s);
        TruthValue three = eval3(f, PartialStructure::from_total(s, formula_endogenous()));
        TruthValue expect = two ? TruthValue::True : TruthValue::False;
        if (three != expect) r.fail("eval3 differs from eval2 on " + print_formula(f));
        if (eval2(desugar_restricted(f), s) != two) r.fail("desugaring changes " + print_formula(f));
        PartialStructure weak = random_weakening(rng, s);
        TruthValue w = eval3(f, weak);
        if (w != TruthValue::Unknown && w != expect) r.fail("eval3 not monotone on " + print_formula(f));
    }
    return r;
}

inline PropertyResult check_formula_roundtrip(std::uint64_t seed, int n) {
    using namespace causalog;
    PropertyResult r;
    std::mt19937_64 rng(seed);
    const Vocabulary voc = formula_vocabulary();
    for (int i = 0; i < n; ++i) {
        ++r.cases;
        Formula f = random_sentence(rng, 4);
        std::string text = print_formula(f);
        try {
            if (!(parse_formula(text, voc) == f)) r.fail("round-trip changed " + text);
        } catch (const Error& e) {
            r.fail("round-trip failed to parse " + text + ": " + e.what());
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Theory-level properties

inline std::set<GAtom> endogenous_atoms(const causalog::Structure& m, const std::set<std::string>& endo) {
    std::set<GAtom> out;
    for (const auto& [pred, tuples] : m.relations()) {
        if (!endo.count(pred)) continue;
        for (const auto& t : tuples) {
            GAtom a{pred, {}};
            for (const auto& e : t) a.second.push_back(e.render());
            out.insert(a);
        }
    }
    return out;
}

inline std::set<std::string> endo_names(const Program& p) {
    std::set<std::string> e;
    for (const auto& x : p.endo) e.insert(x.name);
    return e;
}

/// Random deterministic programs: the engine's model set equals the oracle's well-founded model
/// (or is empty when the oracle's fixpoint is not total).
inline PropertyResult check_wf_differential(std::uint64_t seed, int n) {
    using namespace causalog;
    PropertyResult r;
    std::mt19937_64 rng(seed);
    for (int i = 0; i < n; ++i) {
        ++r.cases;
        Program p = random_program(rng);
        OracleResult want = oracle_wfs(p);
        try {
            Theory t = parse_theory(p.theory_text());
            Structure exo = load_structure(p.structure_json(), t.vocabulary, endogenous_predicates(t));
            ModelSet ms = enumerate_models(t, exo);
            std::ostringstream why;
            if (ms.budget_hit) {
                why << "budget hit";
            } else if (!want.total) {
                if (!ms.models.empty()) why << "oracle has no model but engine returned " << ms.models.size();
            } else if (ms.models.size() != 1) {
                why << "oracle has one model but engine returned " << ms.models.size();
            } else if (endogenous_atoms(ms.models[0].structure, endo_names(p)) != want.true_atoms) {
                why << "model differs from oracle";
            }
            if (!why.str().empty()) r.fail(why.str() + "\n" + p.theory_text() + p.structure_json());
        } catch (const Error& e) {
            r.fail(std::string("error: ") + e.what() + "\n" + p.theory_text());
        }
    }
    return r;
}

/// Every true endogenous atom of every model is the head of a ground rule whose body holds there.
inline PropertyResult check_supportedness(std::uint64_t seed, int n) {
    using namespace causalog;
    PropertyResult r;
    std::mt19937_64 rng(seed);
    for (int i = 0; i < n; ++i) {
        ++r.cases;
        if (i % 2 == 0) {
            Program p = random_program(rng, 4, 8);
            Theory t = parse_theory(p.theory_text());
            Structure exo = load_structure(p.structure_json(), t.vocabulary, endogenous_predicates(t));
            auto rules = ground_program(p);
            for (const auto& m : enumerate_models(t, exo).models) {
                auto M = endogenous_atoms(m.structure, endo_names(p));
                for (const auto& a : M) {
                    bool supported = false;
                    for (const auto& g : rules) {
                        if (g.head != a) continue;
                        bool body = true;
                        for (const auto& b : g.pos) body = body && M.count(b);
                        for (const auto& b : g.neg) body = body && !M.count(b);
                        supported = supported || body;
                    }
                    if (!supported) r.fail("unsupported " + a.first + "\n" + p.theory_text());
                }
            }
        } else {
            auto [text, json] = random_choice_theory(rng, true);
            Theory t = parse_theory(text);
            Structure exo = load_structure(json, t.vocabulary, endogenous_predicates(t));
            for (const auto& m : enumerate_models(t, exo).models)
                if (!unsupported_atoms(t, m.structure).empty()) r.fail("unsupported atom in a model of\n" + text);
        }
    }
    return r;
}

/// States along a simulated trace only grow: atoms and domain elements are never removed.
inline PropertyResult check_trace_monotonicity(std::uint64_t seed, int n) {
    using namespace causalog;
    PropertyResult r;
    std::mt19937_64 rng(seed);
    for (int i = 0; i < n; ++i) {
        ++r.cases;
        std::string text, json;
        if (i % 3 == 0) {
            Program p = random_program(rng, 4, 8);
            text = p.theory_text();
            json = p.structure_json();
        } else {
            std::tie(text, json) = random_choice_theory(rng, i % 3 == 2);
        }
        Theory t = parse_theory(text);
        Structure exo = load_structure(json, t.vocabulary, endogenous_predicates(t));
        Trace tr = simulate(t, exo, rng());
        for (std::size_t k = 0; k + 1 < tr.states.size(); ++k) {
            const Structure& a = tr.states[k];
            const Structure& b = tr.states[k + 1];
            for (const auto& atom : a.true_atoms())
                if (!b.holds(atom)) r.fail("atom " + atom.render() + " disappears in\n" + text);
            for (const auto& e : a.domain())
                if (!b.contains(e)) r.fail("element disappears in\n" + text);
        }
        if (!(tr.states.size() >= 2 && tr.states.back() == tr.states[tr.states.size() - 2]))
            r.fail("trace did not stabilise for\n" + text);
    }
    return r;
}

/// Negation-free theories with exogenous Select qualifications: process finals and
/// well-founded models coincide.
inline PropertyResult check_engine_agreement(std::uint64_t seed, int n) {
    using namespace causalog;
    PropertyResult r;
    std::mt19937_64 rng(seed);
    for (int i = 0; i < n; ++i) {
        ++r.cases;
        auto [text, json] = random_choice_theory(rng, false);
        Theory t = parse_theory(text);
        Structure exo = load_structure(json, t.vocabulary, endogenous_predicates(t));
        std::set<std::string> wf, proc;
        for (const auto& m : enumerate_models(t, exo).models) wf.insert(m.key);
        ProcessSet ps = enumerate_processes(t, exo);
        proc.insert(ps.keys.begin(), ps.keys.end());
        if (wf != proc)
            r.fail("engines disagree (" + std::to_string(wf.size()) + " vs " + std::to_string(proc.size()) +
                   ") on\n" + text + json);
    }
    return r;
}

}  // namespace testsupport
