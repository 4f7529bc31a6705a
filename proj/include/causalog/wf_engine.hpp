#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "causalog/ast.hpp"
#include "causalog/grounder.hpp"
#include "causalog/structure.hpp"

namespace causalog {

struct Budget {
    std::int64_t max_new = 8;
    std::int64_t max_elements = 64;
    int max_choice_points = 24;           // resolved choice points in one assignment
    std::int64_t max_leaves = 1'000'000;  // assignments tried in total
    int jobs = 0;                         // 0: OpenMP default; 1: serial reference path
    std::size_t batch = 1024;             // leaves per parallel batch
};

/// Per choice point of a ground tree: option index, or one of the markers below.
using Assignment = std::vector<int>;
inline constexpr int kNone = -1;       // Select / New resolved to none-fired
inline constexpr int kUnreached = -2;  // an enclosing choice excludes this point

/// Readable form of an assignment: (choice point key, resolution) for every reached point.
struct ChoiceAssignment {
    std::vector<std::pair<std::string, std::string>> resolutions;
    std::string render() const;
};

struct Model {
    Structure structure;
    std::string key;  // canonical key modulo created elements
    ChoiceAssignment witness;
};

struct ModelSet {
    std::vector<Model> models;  // ordered by serialized form
    bool budget_hit = false;
    std::string budget_message;
    std::int64_t leaves = 0;

    std::vector<Structure> structures() const;
};

/// Well-founded partial structure of the rules whose commitments agree with `a`, by the alternating
/// fixpoint over eval3. Created elements of `base` exist only if some active creation rule derives them.
PartialStructure wfs(const std::vector<GuardedRule>& rules, const Assignment& a, const Structure& base,
                     const std::set<std::string>& endogenous);

/// Checks every reached choice point of `a` against the total fixpoint `wf`: fired Selects pick a
/// satisfier, none-fired Selects have no satisfier, New fires iff its guard holds.
bool select_validity(const GroundTree& tree, const Assignment& a, const PartialStructure& wf);

ModelSet enumerate_models(const Theory& t, const Structure& exo, const Budget& budget = {});

/// Single-threaded reference search; same result as enumerate_models for any job count.
ModelSet enumerate_models_serial(const Theory& t, const Structure& exo, Budget budget = {});

struct CheckResult {
    bool is_model = false;
    std::optional<ChoiceAssignment> witness;
    std::vector<std::string> diagnostics;
};

/// Exogenous part of a total structure: endogenous relations and created elements removed.
Structure exogenous_part(const Structure& m, const std::set<std::string>& endogenous);

CheckResult check_model(const Theory& t, const Structure& m, const Budget& budget = {});

/// True endogenous atoms of `m` that are the head of no rule (under any commitments) whose guard
/// holds in `m`. Empty for every model.
std::vector<DomainAtom> unsupported_atoms(const Theory& t, const Structure& m);

/// JSON `{"models":[...],"count":N,"budget_hit":bool}`.
std::string model_set_to_json(const ModelSet& ms, const Vocabulary& voc);

}  // namespace causalog
