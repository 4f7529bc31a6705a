#include "causalog/wf_engine.hpp"

#include <algorithm>
#include <functional>
#include <unordered_map>
#include <unordered_set>

#include <omp.h>

#include <json.hpp>

#include "causalog/errors.hpp"
#include "causalog/eval.hpp"
#include "causalog/printer.hpp"

namespace causalog {

std::string ChoiceAssignment::render() const {
    std::string out;
    for (const auto& [k, v] : resolutions) out += (out.empty() ? "" : " ") + k + "->" + v;
    return out;
}

std::vector<Structure> ModelSet::structures() const {
    std::vector<Structure> out;
    for (const auto& m : models) out.push_back(m.structure);
    return out;
}

// ---------------------------------------------------------------------------
// Well-founded fixpoint

namespace {

bool commitments_hold(const std::vector<Commitment>& cs, const Assignment& a) {
    for (const auto& c : cs)
        if (a[c.cp] != c.option) return false;
    return true;
}

TruthValue rule_value(const GuardedRule& r, const PartialStructure& ps) {
    TruthValue v = TruthValue::True;
    for (const auto& e : r.needs) {
        v = tv_and(v, ps.exists(e));
        if (v == TruthValue::False) return v;
    }
    return tv_and(v, eval3(r.guard, ps));
}

}  // namespace

PartialStructure wfs(const std::vector<GuardedRule>& rules, const Assignment& a, const Structure& base,
                     const std::set<std::string>& endogenous) {
    std::vector<const GuardedRule*> active;
    for (const auto& r : rules)
        if (commitments_hold(r.commitments, a)) active.push_back(&r);

    std::vector<RuleHead> heads;
    std::unordered_map<DomainAtom, int, AtomHash> atom_index;
    std::unordered_map<DomainElement, int, ElementHash> create_index;
    std::vector<int> head_of;
    for (const auto* r : active) {
        int h;
        if (r->head.kind == RuleHead::Kind::Atom) {
            auto [it, fresh] = atom_index.emplace(r->head.atom, static_cast<int>(heads.size()));
            h = it->second;
            if (fresh) heads.push_back(r->head);
        } else {
            auto [it, fresh] = create_index.emplace(r->head.element, static_cast<int>(heads.size()));
            h = it->second;
            if (fresh) heads.push_back(r->head);
        }
        head_of.push_back(h);
    }

    PartialStructure ps(base, endogenous);
    for (const auto& e : base.created()) ps.set_exists(e, TruthValue::False);
    auto assign = [&](std::size_t h, TruthValue v) {
        if (heads[h].kind == RuleHead::Kind::Atom)
            ps.set(heads[h].atom, v);
        else
            ps.set_exists(heads[h].element, v);
    };

    const std::size_t n = heads.size();
    std::vector<char> lower(n, 0), upper(n, 1);
    for (std::size_t round = 0; round < 2 * n + 2; ++round) {
        // lower bound: least set derivable when everything outside `upper` is false
        for (std::size_t h = 0; h < n; ++h) assign(h, upper[h] ? TruthValue::Unknown : TruthValue::False);
        std::vector<char> x(n, 0);
        for (bool changed = true; changed;) {
            changed = false;
            for (std::size_t i = 0; i < active.size(); ++i) {
                int h = head_of[i];
                if (x[h] || !upper[h]) continue;
                if (rule_value(*active[i], ps) == TruthValue::True) {
                    x[h] = 1;
                    assign(h, TruthValue::True);
                    changed = true;
                }
            }
        }
        // upper bound: everything still derivable given the new lower bound
        for (std::size_t h = 0; h < n; ++h) assign(h, x[h] ? TruthValue::True : TruthValue::False);
        std::vector<char> y = x;
        for (bool changed = true; changed;) {
            changed = false;
            for (std::size_t i = 0; i < active.size(); ++i) {
                int h = head_of[i];
                if (y[h]) continue;
                if (rule_value(*active[i], ps) != TruthValue::False) {
                    y[h] = 1;
                    assign(h, TruthValue::Unknown);
                    changed = true;
                }
            }
        }
        bool stable = x == lower && y == upper;
        lower = std::move(x);
        upper = std::move(y);
        if (stable) break;
    }
    for (std::size_t h = 0; h < n; ++h)
        assign(h, lower[h] ? TruthValue::True : upper[h] ? TruthValue::Unknown : TruthValue::False);
    return ps;
}

// ---------------------------------------------------------------------------
// Validity of choices against a total fixpoint

namespace {

bool guard_holds(const ChoicePoint& cp, const PartialStructure& wf) {
    for (const auto& e : cp.needs)
        if (wf.exists(e) != TruthValue::True) return false;
    for (const auto& g : cp.guard)
        if (eval3(g, wf) != TruthValue::True) return false;
    return true;
}

bool select_option_holds(const ChoicePoint& cp, int option, const PartialStructure& wf) {
    Bindings env = cp.subst;
    const auto& t = cp.options[option];
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (wf.exists(t[i]) != TruthValue::True) return false;
        env.push(cp.vars[i], t[i]);
    }
    return eval3(cp.qualification, wf, env) == TruthValue::True;
}

}  // namespace

bool select_validity(const GroundTree& tree, const Assignment& a, const PartialStructure& wf) {
    for (std::size_t i = 0; i < tree.choice_points.size(); ++i) {
        int opt = a[i];
        if (opt == kUnreached) continue;
        const auto& cp = tree.choice_points[i];
        bool g = guard_holds(cp, wf);
        switch (cp.kind) {
            case ChoicePoint::Kind::Or:
                if (!g && opt != 0) return false;
                break;
            case ChoicePoint::Kind::Select:
                if (opt == kNone) {
                    if (g && eval3(fo::exists(cp.vars, cp.qualification), wf, cp.subst) != TruthValue::False)
                        return false;
                } else if (!g || !select_option_holds(cp, opt, wf)) {
                    return false;
                }
                break;
            case ChoicePoint::Kind::New:
                if (g != (opt >= 0)) return false;
                break;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Enumeration

namespace {

constexpr int kUndecided = -3;

/// Everything fixed for one creation pass: domain with k pool slots, tree, rules.
struct Pass {
    const Theory* theory = nullptr;
    std::set<std::string> endogenous;
    Structure base;
    std::vector<DomainElement> pool;
    GroundTree tree;
    std::vector<GuardedRule> rules;
};

Pass make_pass(const Theory& t, const Structure& exo, const std::set<std::string>& endo, std::int64_t k) {
    Pass p;
    p.theory = &t;
    p.endogenous = endo;
    p.base = default_extension(exo, t.vocabulary, endo);
    for (std::int64_t j = 1; j <= k; ++j) {
        p.pool.push_back(DomainElement::created(j, ""));
        p.base.add_element(p.pool.back());
    }
    PartialStructure view(p.base, endo);
    view.set_default(TruthValue::Unknown);
    for (const auto& e : p.pool) view.set_exists(e, TruthValue::Unknown);
    GroundOptions opts;
    opts.static_view = &view;
    opts.new_slots = [&](const ChoicePoint&) { return p.pool; };
    p.tree = ground_theory(t, p.base, opts);
    p.rules = flatten(p.tree);
    return p;
}

struct Leaf {
    Assignment a;
    std::vector<char> starved;
    std::vector<int> slot_creator;  // choice point that took each pool slot
};

struct Outcome {
    enum class Status { Rejected, Accepted, Overflow } status = Status::Rejected;
    Model model;
    std::string overflow_at;
};

Outcome evaluate_leaf(const Pass& p, const Leaf& leaf) {
    Outcome out;
    const auto& cps = p.tree.choice_points;
    PartialStructure wf = wfs(p.rules, leaf.a, p.base, p.endogenous);

    auto first_starved = [&]() -> std::string {
        for (std::size_t i = 0; i < cps.size(); ++i)
            if (leaf.starved[i]) return cps[i].key();
        return {};
    };
    if (!wf.is_total()) {
        if (std::any_of(leaf.starved.begin(), leaf.starved.end(), [](char c) { return c != 0; })) {
            out.status = Outcome::Status::Overflow;
            out.overflow_at = first_starved();
        }
        return out;
    }
    for (std::size_t i = 0; i < cps.size(); ++i)
        if (leaf.starved[i] && guard_holds(cps[i], wf)) {
            out.status = Outcome::Status::Overflow;
            out.overflow_at = cps[i].key();
            return out;
        }
    for (const auto& e : p.pool)
        if (wf.exists(e) != TruthValue::True) return out;
    if (!select_validity(p.tree, leaf.a, wf)) return out;

    Structure m = wf.project();
    for (const auto& s : p.theory->sentences)
        if (!eval2(s, m)) return out;

    std::map<DomainElement, DomainElement> rename;
    for (std::size_t j = 0; j < p.pool.size(); ++j)
        rename[p.pool[j]] = DomainElement::created(p.pool[j].value, cps[leaf.slot_creator[j]].occ);
    auto [canon, key] = canonicalize(m.renamed(rename));
    out.status = Outcome::Status::Accepted;
    out.model.structure = std::move(canon);
    out.model.key = std::move(key);
    for (std::size_t i = 0; i < cps.size(); ++i)
        if (leaf.a[i] != kUnreached) out.model.witness.resolutions.emplace_back(cps[i].key(), cps[i].render_option(leaf.a[i]));
    return out;
}

/// Depth-first search over the resolutions of one pass.
class Search {
public:
    Search(const Pass& p, std::int64_t k, const Budget& b, std::int64_t& leaves,
           std::function<void(Leaf&&)> emit)
        : p_(p), k_(k), budget_(b), leaves_(leaves), emit_(std::move(emit)) {
        const auto n = p.tree.choice_points.size();
        a_.assign(n, kUndecided);
        starved_.assign(n, 0);
    }

    void run() { step(0); }

    bool overflow = false;
    std::string overflow_at;

private:
    const Pass& p_;
    std::int64_t k_;
    const Budget& budget_;
    std::int64_t& leaves_;
    std::function<void(Leaf&&)> emit_;
    Assignment a_;
    std::vector<char> starved_;
    std::vector<int> slot_creator_;

    bool allocated(const DomainElement& e) const {
        return e.is_created() && e.value >= 1 && e.value <= static_cast<std::int64_t>(slot_creator_.size());
    }

    bool ready(std::size_t i) const {
        if (a_[i] != kUndecided) return false;
        const auto& cp = p_.tree.choice_points[i];
        for (const auto& c : cp.commitments)
            if (a_[c.cp] != c.option) return false;
        for (const auto& e : cp.needs)
            if (!allocated(e)) return false;
        return true;
    }

    int pick() const {
        int first = -1;
        for (std::size_t i = 0; i < a_.size(); ++i) {
            if (!ready(i)) continue;
            if (p_.tree.choice_points[i].kind == ChoicePoint::Kind::New) return static_cast<int>(i);
            if (first < 0) first = static_cast<int>(i);
        }
        return first;
    }

    void finish() {
        if (++leaves_ > budget_.max_leaves)
            throw BudgetExceeded(BudgetExceeded::Kind::ChoiceSpace,
                                 "choice space exceeds " + std::to_string(budget_.max_leaves) + " assignments");
        Leaf leaf{a_, starved_, slot_creator_};
        const auto& cps = p_.tree.choice_points;
        for (std::size_t i = 0; i < cps.size(); ++i) {
            if (leaf.a[i] != kUndecided) continue;
            leaf.a[i] = commitments_hold(cps[i].commitments, leaf.a)
                            ? (cps[i].kind == ChoicePoint::Kind::Or ? 0 : kNone)
                            : kUnreached;
        }
        emit_(std::move(leaf));
    }

    void step(int depth) {
        int i = pick();
        if (i < 0) {
            finish();
            return;
        }
        const auto& cp = p_.tree.choice_points[i];
        std::vector<int> alts;
        bool starve = false;
        switch (cp.kind) {
            case ChoicePoint::Kind::Or:
                alts = {0, 1};
                break;
            case ChoicePoint::Kind::Select:
                for (int o = 0; o < cp.option_count(); ++o) {
                    const auto& t = cp.options[o];
                    if (std::all_of(t.begin(), t.end(), [&](const auto& e) { return !e.is_created() || allocated(e); }))
                        alts.push_back(o);
                }
                if (cp.none_allowed) alts.push_back(kNone);
                break;
            case ChoicePoint::Kind::New:
                if (static_cast<std::int64_t>(slot_creator_.size()) < k_) {
                    alts.push_back(static_cast<int>(slot_creator_.size()));
                    if (cp.none_allowed) alts.push_back(kNone);
                } else if (cp.none_allowed) {
                    alts.push_back(kNone);
                    starve = true;
                } else {
                    if (!overflow) overflow_at = cp.key();
                    overflow = true;
                }
                break;
        }
        if (alts.empty()) return;
        int next_depth = depth + (alts.size() > 1 ? 1 : 0);
        if (next_depth > budget_.max_choice_points)
            throw BudgetExceeded(BudgetExceeded::Kind::ChoiceSpace,
                                 "more than " + std::to_string(budget_.max_choice_points) +
                                     " choice points in one assignment");
        for (int o : alts) {
            a_[i] = o;
            bool fired_new = cp.kind == ChoicePoint::Kind::New && o >= 0;
            if (fired_new) slot_creator_.push_back(i);
            if (starve) starved_[i] = 1;
            step(next_depth);
            if (starve) starved_[i] = 0;
            if (fired_new) slot_creator_.pop_back();
        }
        a_[i] = kUndecided;
    }
};

ModelSet enumerate_impl(const Theory& t, const Structure& exo, const Budget& budget, bool parallel) {
    ModelSet out;
    const auto endo = endogenous_predicates(t);
    std::unordered_set<std::string> seen;
    const auto base_size = static_cast<std::int64_t>(default_extension(exo, t.vocabulary, endo).domain().size());

    for (std::int64_t k = 0;; ++k) {
        if (base_size + k > budget.max_elements) {
            out.budget_hit = true;
            out.budget_message = "element budget exceeded (max_elements = " + std::to_string(budget.max_elements) + ")";
            break;
        }
        Pass pass = make_pass(t, exo, endo, k);
        bool overflow = false;
        std::string overflow_at;

        auto merge = [&](Outcome&& o) {
            if (o.status == Outcome::Status::Overflow) {
                if (!overflow) overflow_at = o.overflow_at;
                overflow = true;
            } else if (o.status == Outcome::Status::Accepted && seen.insert(o.model.key).second) {
                out.models.push_back(std::move(o.model));
            }
        };

        std::vector<Leaf> batch;
        auto flush = [&] {
            std::vector<Outcome> results(batch.size());
            const auto n = static_cast<std::int64_t>(batch.size());
#pragma omp parallel for schedule(dynamic, 4) num_threads(budget.jobs > 0 ? budget.jobs : omp_get_max_threads())
            for (std::int64_t i = 0; i < n; ++i) results[i] = evaluate_leaf(pass, batch[i]);
            for (auto& r : results) merge(std::move(r));
            batch.clear();
        };

        Search search(pass, k, budget, out.leaves, [&](Leaf&& leaf) {
            if (!parallel) {
                merge(evaluate_leaf(pass, leaf));
                return;
            }
            batch.push_back(std::move(leaf));
            if (batch.size() >= budget.batch) flush();
        });
        search.run();
        if (parallel) flush();

        if (search.overflow && !overflow) overflow_at = search.overflow_at;
        overflow = overflow || search.overflow;
        if (!overflow) break;
        if (k >= budget.max_new) {
            out.budget_hit = true;
            out.budget_message = "creation budget exceeded at " + overflow_at + " (max_new = " +
                                 std::to_string(budget.max_new) + ")";
            break;
        }
    }

    std::vector<std::pair<std::string, Model>> keyed;
    for (auto& m : out.models) keyed.emplace_back(structure_to_json(m.structure, t.vocabulary), std::move(m));
    std::sort(keyed.begin(), keyed.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    out.models.clear();
    for (auto& [_, m] : keyed) out.models.push_back(std::move(m));
    return out;
}

}  // namespace

ModelSet enumerate_models(const Theory& t, const Structure& exo, const Budget& budget) {
    return enumerate_impl(t, exo, budget, budget.jobs != 1);
}

ModelSet enumerate_models_serial(const Theory& t, const Structure& exo, Budget budget) {
    budget.jobs = 1;
    return enumerate_impl(t, exo, budget, false);
}

// ---------------------------------------------------------------------------
// Model checking

Structure exogenous_part(const Structure& m, const std::set<std::string>& endogenous) {
    Structure out;
    out.set_int_range(m.int_range());
    for (const auto& e : m.domain())
        if (e.is_named()) out.add_element(e);
    for (const auto& [c, v] : m.constants()) out.set_constant(c, v);
    for (const auto& [pred, tuples] : m.relations()) {
        if (endogenous.count(pred)) continue;
        out.declare(pred);
        for (const auto& t : tuples) out.add_fact(pred, t);
    }
    return out;
}

namespace {

Structure with_all_declared(Structure s, const Vocabulary& voc) {
    for (const auto& p : voc.predicates) s.declare(p.name);
    return s;
}

// Rules instantiated over a total structure; instances whose guard is false in `m` are pruned.
std::vector<GuardedRule> rules_over(const Theory& t, const Structure& m) {
    const PartialStructure view = PartialStructure::from_total(m, endogenous_predicates(t));
    GroundOptions opts;
    opts.static_view = &view;
    auto created = m.created();
    opts.new_slots = [created](const ChoicePoint&) { return created; };
    return flatten(ground_theory(t, m, opts));
}

bool rule_holds(const GuardedRule& r, const Structure& m) {
    for (const auto& e : r.needs)
        if (!m.contains(e)) return false;
    return eval2(r.guard, m);
}

}  // namespace

std::vector<DomainAtom> unsupported_atoms(const Theory& t, const Structure& m) {
    const auto endo = endogenous_predicates(t);
    std::unordered_set<DomainAtom, AtomHash> supported;
    for (const auto& r : rules_over(t, m))
        if (r.head.kind == RuleHead::Kind::Atom && !supported.count(r.head.atom) && rule_holds(r, m))
            supported.insert(r.head.atom);
    std::vector<DomainAtom> out;
    for (const auto& a : m.true_atoms())
        if (endo.count(a.pred) && !supported.count(a)) out.push_back(a);
    return out;
}

CheckResult check_model(const Theory& t, const Structure& m_in, const Budget& budget) {
    CheckResult out;
    const auto endo = endogenous_predicates(t);
    const Structure m = with_all_declared(m_in, t.vocabulary);
    Budget b = budget;
    b.max_new = std::max<std::int64_t>(b.max_new, static_cast<std::int64_t>(m.created().size()));

    ModelSet ms = enumerate_models(t, exogenous_part(m, endo), b);
    for (const auto& cand : ms.models) {
        if (equal_modulo_created(with_all_declared(cand.structure, t.vocabulary), m)) {
            out.is_model = true;
            out.witness = cand.witness;
            return out;
        }
    }

    for (const auto& s : t.sentences)
        if (!eval2(s, m)) out.diagnostics.push_back("violated sentence: " + print_formula(s));
    const auto rules = rules_over(t, m);
    for (const auto& r : rules) {
        if (!r.commitments.empty() || r.head.kind != RuleHead::Kind::Atom) continue;
        if (rule_holds(r, m) && !m.holds(r.head.atom))
            out.diagnostics.push_back("unsatisfied effect: " + r.head.atom.render() + " (caused by " + r.occ + ")");
    }
    for (const auto& a : unsupported_atoms(t, m)) out.diagnostics.push_back("unsupported: " + a.render());
    if (out.diagnostics.empty()) out.diagnostics.push_back("no choice assignment produces this structure");
    if (ms.budget_hit) out.diagnostics.push_back("search incomplete: " + ms.budget_message);
    return out;
}

std::string model_set_to_json(const ModelSet& ms, const Vocabulary& voc) {
    nlohmann::ordered_json out;
    out["models"] = nlohmann::ordered_json::array();
    for (const auto& m : ms.models) out["models"].push_back(nlohmann::ordered_json::parse(structure_to_json(m.structure, voc)));
    out["count"] = ms.models.size();
    out["budget_hit"] = ms.budget_hit;
    return out.dump();
}

}  // namespace causalog
