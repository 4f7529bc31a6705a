#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "causalog/ast.hpp"
#include "causalog/grounder.hpp"
#include "causalog/structure.hpp"
#include "causalog/wf_engine.hpp"

namespace causalog {

/// Picks one of `n` alternatives for the choice point with the given key.
class Chooser {
public:
    virtual ~Chooser() = default;
    virtual int choose(const std::string& key, int n) = 0;
};

/// Deterministic in (key, seed): splitmix64 of the key hash mixed with the seed.
class SeededChooser : public Chooser {
public:
    explicit SeededChooser(std::uint64_t seed) : seed_(seed) {}
    int choose(const std::string& key, int n) override;

private:
    std::uint64_t seed_;
};

/// Replays a fixed decision prefix, then picks alternative 0; records every decision's arity.
class ScriptedChooser : public Chooser {
public:
    explicit ScriptedChooser(std::vector<int> script) : script_(std::move(script)) {}
    int choose(const std::string& key, int n) override;

    const std::vector<int>& taken() const { return taken_; }
    const std::vector<int>& arities() const { return arities_; }
    const std::vector<std::string>& keys() const { return keys_; }

private:
    std::vector<int> script_;
    std::vector<int> taken_, arities_;
    std::vector<std::string> keys_;
};

/// Committed resolution of one choice point, by value (option indices change when re-grounding).
struct Resolution {
    ChoicePoint::Kind kind = ChoicePoint::Kind::Or;
    int branch = 0;  // Or
    Tuple value;     // Select witness, or the created element
    std::string render() const;
};

using Commitments = std::map<std::string, Resolution>;

struct CausedSet {
    std::vector<DomainAtom> atoms;                                 // ordered, deduplicated
    std::vector<std::pair<std::string, DomainElement>> creations;  // (choice point key, element)
};

struct Decision {
    std::string key;
    std::string resolution;
};

struct Trace {
    std::vector<Structure> states;  // states[0] is the default extension
    std::vector<CausedSet> caused;  // caused[i] leads from states[i] to states[i + 1]
    std::vector<std::vector<Decision>> decisions;
    std::uint64_t seed = 0;

    const Structure& final_state() const { return states.back(); }
    /// Steps that changed the state.
    int growth_steps() const;
};

/// Caused set of `tree` in state `s`. Uncommitted Or/Select points reached in this state are
/// resolved by `chooser` and added to `committed`; uncommitted New points allocate a fresh element
/// (bumping `counter`) and have their body grounded on demand.
CausedSet caused_set(GroundTree& tree, const Structure& s, Commitments& committed, Chooser& chooser,
                     std::int64_t& counter, std::int64_t max_new, std::vector<Decision>* decisions = nullptr);

struct SimOptions {
    std::int64_t max_steps = 1000;
    std::int64_t max_new = 8;
    std::int64_t max_branches = 100000;
};

Trace simulate(const Theory& t, const Structure& exo, Chooser& chooser, const SimOptions& opts = {});
Trace simulate(const Theory& t, const Structure& exo, std::uint64_t seed, const SimOptions& opts = {});

struct ProcessRun {
    std::vector<Decision> decisions;
    std::vector<int> arities;
    std::string final_key;
};

struct ProcessSet {
    std::vector<Structure> finals;  // deduplicated modulo created elements, canonical order
    std::vector<std::string> keys;
    std::vector<ProcessRun> runs;  // in exploration order
};

/// Explores every chooser decision at every step.
ProcessSet enumerate_processes(const Theory& t, const Structure& exo, const SimOptions& opts = {});

struct DiffReport {
    bool agree = true;
    std::vector<Structure> only_process;
    std::vector<Structure> only_wf;
    bool budget_hit = false;
};

/// Compares final process states with well-founded models, both for the theory without its sentences.
DiffReport compare_with_wf(const Theory& t, const Structure& exo, const Budget& budget = {},
                           const SimOptions& opts = {});

// Renderings
std::string render_state(const Structure& s);
std::string trace_to_text(const Trace& tr);
std::string trace_to_json(const Trace& tr, const Vocabulary& voc);
std::string processes_to_dot(const ProcessSet& ps);
std::string diff_to_json(const DiffReport& d, const Vocabulary& voc);

}  // namespace causalog
