#include "causalog/process_sim.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "causalog/errors.hpp"
#include "causalog/eval.hpp"

namespace causalog {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

int SeededChooser::choose(const std::string& key, int n) {
    return static_cast<int>(splitmix64(fnv1a(key) ^ seed_) % static_cast<std::uint64_t>(n));
}

int ScriptedChooser::choose(const std::string& key, int n) {
    std::size_t i = taken_.size();
    int c = i < script_.size() ? script_[i] : 0;
    if (c >= n) c = n - 1;
    taken_.push_back(c);
    arities_.push_back(n);
    keys_.push_back(key);
    return c;
}

std::string Resolution::render() const {
    switch (kind) {
        case ChoicePoint::Kind::Or: return branch == 0 ? "left" : "right";
        case ChoicePoint::Kind::Select: return render_tuple(value);
        case ChoicePoint::Kind::New: return value.at(0).render();
    }
    return "?";
}

int Trace::growth_steps() const {
    int n = 0;
    for (std::size_t i = 1; i < states.size(); ++i) n += states[i] == states[i - 1] ? 0 : 1;
    return n;
}

// ---------------------------------------------------------------------------
// Caused sets

namespace {

struct Walker {
    GroundTree& tree;
    const Structure& s;
    Commitments& committed;
    Chooser& chooser;
    std::int64_t& counter;
    std::int64_t max_new;
    std::vector<Decision>* decisions;
    std::set<DomainAtom> atoms;
    CausedSet out;

    void record(const std::string& key, const Resolution& r) {
        if (decisions) decisions->push_back({key, r.render()});
    }

    void walk(GroundNode& n) {
        switch (n.kind) {
            case GroundNode::Kind::Atom:
                if (n.head) atoms.insert(*n.head);
                break;
            case GroundNode::Kind::If:
                if (eval2(n.condition, s))
                    for (auto& c : n.children) walk(*c);
                break;
            case GroundNode::Kind::And:
                for (auto& c : n.children) walk(*c);
                break;
            case GroundNode::Kind::Or: {
                const std::string key = tree.choice_points[n.cp].key();
                auto it = committed.find(key);
                if (it == committed.end()) {
                    Resolution r{ChoicePoint::Kind::Or, chooser.choose(key, 2), {}};
                    record(key, r);
                    it = committed.emplace(key, r).first;
                }
                walk(*n.children.at(it->second.branch));
                break;
            }
            case GroundNode::Kind::Select: {
                const auto& cp = tree.choice_points[n.cp];
                const std::string key = cp.key();
                auto it = committed.find(key);
                if (it != committed.end()) {
                    for (std::size_t o = 0; o < cp.options.size(); ++o)
                        if (cp.options[o] == it->second.value) {
                            walk(*n.children[o]);
                            break;
                        }
                    break;
                }
                std::vector<std::size_t> satisfiers;
                for (std::size_t o = 0; o < n.children.size(); ++o)
                    if (eval2(n.children[o]->condition, s)) satisfiers.push_back(o);
                if (satisfiers.empty()) break;
                std::size_t o = satisfiers[chooser.choose(key, static_cast<int>(satisfiers.size()))];
                Resolution r{ChoicePoint::Kind::Select, 0, cp.options[o]};
                record(key, r);
                committed.emplace(key, r);
                walk(*n.children[o]);
                break;
            }
            case GroundNode::Kind::New: {
                const std::string key = tree.choice_points[n.cp].key();
                auto it = committed.find(key);
                if (it != committed.end()) {
                    const auto& opts = tree.choice_points[n.cp].options;
                    for (std::size_t o = 0; o < opts.size(); ++o)
                        if (opts[o] == it->second.value) {
                            walk(*n.children[o]);
                            break;
                        }
                    break;
                }
                DomainElement e = allocate_fresh(tree.choice_points[n.cp], counter, max_new);
                ++counter;
                Resolution r{ChoicePoint::Kind::New, 0, {e}};
                record(key, r);
                committed.emplace(key, r);
                out.creations.emplace_back(key, e);
                Structure grown = s;
                grown.add_element(e);
                int o = extend_new(tree, n, e, grown);
                walk(*n.children[o]);
                break;
            }
        }
    }
};

GroundOptions committed_slots(const Commitments& committed) {
    GroundOptions opts;
    opts.new_slots = [&committed](const ChoicePoint& cp) -> std::vector<DomainElement> {
        auto it = committed.find(cp.key());
        if (it == committed.end()) return {};
        return {it->second.value.at(0)};
    };
    return opts;
}

}  // namespace

CausedSet caused_set(GroundTree& tree, const Structure& s, Commitments& committed, Chooser& chooser,
                     std::int64_t& counter, std::int64_t max_new, std::vector<Decision>* decisions) {
    Walker w{tree, s, committed, chooser, counter, max_new, decisions, {}, {}};
    for (auto& r : tree.roots) w.walk(*r);
    w.out.atoms.assign(w.atoms.begin(), w.atoms.end());
    return std::move(w.out);
}

// ---------------------------------------------------------------------------
// Processes

Trace simulate(const Theory& t, const Structure& exo, Chooser& chooser, const SimOptions& opts) {
    const auto endo = endogenous_predicates(t);
    Trace tr;
    Structure s = default_extension(exo, t.vocabulary, endo);
    tr.states.push_back(s);
    Commitments committed;
    std::int64_t counter = 0;
    for (std::int64_t step = 1;; ++step) {
        if (step > opts.max_steps)
            throw BudgetExceeded(BudgetExceeded::Kind::Steps,
                                 "process did not stabilise within " + std::to_string(opts.max_steps) + " steps");
        GroundTree tree = ground_theory(t, s, committed_slots(committed));
        std::vector<Decision> decisions;
        CausedSet cs = caused_set(tree, s, committed, chooser, counter, opts.max_new, &decisions);
        Structure next = s;
        for (const auto& [_, e] : cs.creations) next.add_element(e);
        for (const auto& a : cs.atoms) next.add_fact(a);
        bool same = next == s;
        tr.caused.push_back(std::move(cs));
        tr.decisions.push_back(std::move(decisions));
        tr.states.push_back(next);
        if (same) break;
        s = std::move(next);
    }
    return tr;
}

Trace simulate(const Theory& t, const Structure& exo, std::uint64_t seed, const SimOptions& opts) {
    SeededChooser chooser(seed);
    Trace tr = simulate(t, exo, chooser, opts);
    tr.seed = seed;
    return tr;
}

ProcessSet enumerate_processes(const Theory& t, const Structure& exo, const SimOptions& opts) {
    ProcessSet out;
    std::map<std::string, Structure> finals;
    std::vector<int> script;
    for (std::int64_t runs = 1;; ++runs) {
        if (runs > opts.max_branches)
            throw BudgetExceeded(BudgetExceeded::Kind::Branches,
                                 "more than " + std::to_string(opts.max_branches) + " process branches");
        ScriptedChooser chooser(script);
        Trace tr = simulate(t, exo, chooser, opts);
        auto [canon, key] = canonicalize(tr.final_state());
        finals.emplace(key, std::move(canon));

        ProcessRun run;
        for (const auto& step : tr.decisions)
            for (const auto& d : step) run.decisions.push_back(d);
        run.arities = chooser.arities();
        run.final_key = key;
        out.runs.push_back(std::move(run));

        const auto& taken = chooser.taken();
        const auto& arity = chooser.arities();
        int i = static_cast<int>(taken.size()) - 1;
        while (i >= 0 && taken[i] + 1 >= arity[i]) --i;
        if (i < 0) break;
        script.assign(taken.begin(), taken.begin() + i);
        script.push_back(taken[i] + 1);
    }
    for (auto& [k, s] : finals) {
        out.keys.push_back(k);
        out.finals.push_back(std::move(s));
    }
    return out;
}

DiffReport compare_with_wf(const Theory& t, const Structure& exo, const Budget& budget, const SimOptions& opts) {
    Theory effects = t;
    effects.sentences.clear();
    DiffReport out;
    ModelSet wf = enumerate_models(effects, exo, budget);
    out.budget_hit = wf.budget_hit;
    ProcessSet ps = enumerate_processes(effects, exo, opts);

    std::map<std::string, const Structure*> wf_keys, proc_keys;
    for (const auto& m : wf.models) wf_keys[m.key] = &m.structure;
    for (std::size_t i = 0; i < ps.keys.size(); ++i) proc_keys[ps.keys[i]] = &ps.finals[i];
    for (const auto& [k, s] : proc_keys)
        if (!wf_keys.count(k)) out.only_process.push_back(*s);
    for (const auto& [k, s] : wf_keys)
        if (!proc_keys.count(k)) out.only_wf.push_back(*s);
    out.agree = out.only_process.empty() && out.only_wf.empty();
    return out;
}

// ---------------------------------------------------------------------------
// Rendering

std::string render_state(const Structure& s) {
    std::string out = "{";
    bool first = true;
    for (const auto& a : s.true_atoms()) {
        if (!first) out += ", ";
        out += a.render();
        first = false;
    }
    return out + "}";
}

std::string trace_to_text(const Trace& tr) {
    std::string out = "seed " + std::to_string(tr.seed) + "\n" + render_state(tr.states.front()) + "\n";
    for (std::size_t i = 0; i < tr.caused.size(); ++i) {
        out += "  -> " + render_state(tr.states[i + 1]);
        const auto& cs = tr.caused[i];
        std::string notes;
        for (const auto& [key, e] : cs.creations) notes += (notes.empty() ? "" : "; ") + ("new " + e.render());
        for (const auto& d : tr.decisions[i])
            if (d.resolution.rfind("_p", 0) != 0) notes += (notes.empty() ? "" : "; ") + d.key + " := " + d.resolution;
        if (!notes.empty()) out += "    [" + notes + "]";
        out += "\n";
    }
    out += "growth steps: " + std::to_string(tr.growth_steps()) + "\n";
    return out;
}

std::string trace_to_json(const Trace& tr, const Vocabulary& voc) {
    using json = nlohmann::ordered_json;
    json out;
    out["seed"] = tr.seed;
    out["initial"] = json::parse(structure_to_json(tr.states.front(), voc));
    json steps = json::array();
    for (std::size_t i = 0; i < tr.caused.size(); ++i) {
        json step;
        json atoms = json::array();
        for (const auto& a : tr.caused[i].atoms) atoms.push_back(a.render());
        json created = json::array();
        for (const auto& [key, e] : tr.caused[i].creations) created.push_back({{"choice", key}, {"element", e.render()}});
        json decisions = json::array();
        for (const auto& d : tr.decisions[i]) decisions.push_back({{"choice", d.key}, {"resolution", d.resolution}});
        step["caused"] = {{"atoms", atoms}, {"created", created}};
        step["commitments"] = decisions;
        step["state"] = json::parse(structure_to_json(tr.states[i + 1], voc));
        steps.push_back(step);
    }
    out["steps"] = steps;
    out["growth_steps"] = tr.growth_steps();
    return out.dump();
}

std::string processes_to_dot(const ProcessSet& ps) {
    auto quote = [](const std::string& s) {
        std::string q = "\"";
        for (char c : s) {
            if (c == '"' || c == '\\') q += '\\';
            q += c;
        }
        return q + "\"";
    };
    std::map<std::string, std::size_t> final_index;
    for (std::size_t i = 0; i < ps.keys.size(); ++i) final_index[ps.keys[i]] = i;

    std::string out = "digraph processes {\n  node [shape=box];\n  n0 [label=\"start\"];\n";
    std::map<std::string, int> ids{{"", 0}};
    int next = 1;
    for (const auto& run : ps.runs) {
        std::string prefix;
        int parent = 0;
        for (const auto& d : run.decisions) {
            prefix += d.key + "=" + d.resolution + "|";
            auto [it, fresh] = ids.emplace(prefix, next);
            if (fresh) {
                ++next;
                out += "  n" + std::to_string(it->second) + " [label=" + quote(d.key + " := " + d.resolution) + "];\n";
                out += "  n" + std::to_string(parent) + " -> n" + std::to_string(it->second) + ";\n";
            }
            parent = it->second;
        }
        const auto idx = final_index.at(run.final_key);
        out += "  f" + std::to_string(idx) + " [shape=ellipse,label=" + quote(render_state(ps.finals[idx])) + "];\n";
        out += "  n" + std::to_string(parent) + " -> f" + std::to_string(idx) + ";\n";
    }
    return out + "}\n";
}

std::string diff_to_json(const DiffReport& d, const Vocabulary& voc) {
    using json = nlohmann::ordered_json;
    json out;
    out["agree"] = d.agree;
    json op = json::array(), ow = json::array();
    for (const auto& s : d.only_process) op.push_back(json::parse(structure_to_json(s, voc)));
    for (const auto& s : d.only_wf) ow.push_back(json::parse(structure_to_json(s, voc)));
    out["only_process"] = op;
    out["only_wf"] = ow;
    out["budget_hit"] = d.budget_hit;
    return out.dump();
}

}  // namespace causalog
