#pragma once

#include <functional>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "causalog/ast.hpp"
#include "causalog/eval.hpp"
#include "causalog/structure.hpp"

namespace causalog {

/// A ground occurrence of a choice point resolved to one of its options.
struct Commitment {
    int cp = -1;
    int option = -1;
    bool operator==(const Commitment&) const = default;
};

/// A ground Or / Select / New occurrence. (occ, subst) is the unique key.
struct ChoicePoint {
    enum class Kind { Or, Select, New };

    Kind kind = Kind::Or;
    std::string occ;
    Bindings subst;  // enclosing All/Select/New variables
    std::vector<std::string> vars;  // Select variables, or the New variable
    Formula qualification;          // Select only, unsubstituted
    /// Select: candidate tuples; New: one-element tuples of the elements it may create.
    std::vector<Tuple> options;

    // Guard context: enclosing If-conditions and qualifications, instantiated.
    std::vector<Formula> guard;
    std::vector<DomainElement> needs;  // created elements that must exist
    std::vector<Commitment> commitments;  // enclosing choice points

    /// Guard value against the static view (exogenous known, everything else unknown).
    TruthValue static_guard = TruthValue::Unknown;
    /// False when the static view already rules out the none-fired resolution.
    bool none_allowed = true;

    std::string key() const;
    int option_count() const { return kind == Kind::Or ? 2 : static_cast<int>(options.size()); }
    std::string render_option(int option) const;
};

const char* to_string(ChoicePoint::Kind k);

struct GroundNode;
using GroundNodePtr = std::shared_ptr<GroundNode>;

struct GroundNode {
    enum class Kind { Atom, If, And, Or, Select, New };

    Kind kind = Kind::And;
    std::string occ;
    std::optional<DomainAtom> head;  // Atom; empty when an argument is undefined
    Formula condition;               // If
    std::vector<DomainElement> needs;  // If nodes from All/Select instantiation
    int cp = -1;                     // Or/Select/New
    /// And: conjuncts; If: body; Or: [lhs, rhs]; Select: one If(qual, body) per option;
    /// New: one body instance per option.
    std::vector<GroundNodePtr> children;

    // New only: template for grounding further instances on demand.
    std::shared_ptr<const Cee> body;
    std::string var;
    Bindings env;
};

/// Theory with All-nodes expanded over a domain and choice points registered.
struct GroundTree {
    std::vector<GroundNodePtr> roots;  // one per CEE
    std::vector<ChoicePoint> choice_points;
    std::unordered_map<std::string, int> index;  // key -> choice point

    int find(const std::string& key) const;
};

struct GroundOptions {
    /// When set, subtrees whose guard is false in this view are dropped and Select candidates whose
    /// qualification is false are skipped.
    const PartialStructure* static_view = nullptr;
    /// Elements for which each New point's body is instantiated up front.
    std::function<std::vector<DomainElement>(const ChoicePoint&)> new_slots;
};

/// Grounds one CEE over `domain` (the structure supplies the domain, constants and integer range)
/// into `tree`, returning its root.
GroundNodePtr ground(const Cee& cee, const Structure& domain, GroundTree& tree, const GroundOptions& opts = {});

GroundTree ground_theory(const Theory& t, const Structure& domain, const GroundOptions& opts = {});

/// Instantiates the body of a New node for `element`, appending it as a new option.
/// Returns the option index.
int extend_new(GroundTree& tree, GroundNode& node, const DomainElement& element, const Structure& domain,
               const GroundOptions& opts = {});

/// Fresh element for a New point: created(counter + 1, occ). Throws BudgetExceeded when
/// `counter` has reached `max_new`.
DomainElement allocate_fresh(const ChoicePoint& cp, std::int64_t counter, std::int64_t max_new);

// ---------------------------------------------------------------------------
// Guarded rules

struct RuleHead {
    enum class Kind { Atom, Create };
    Kind kind = Kind::Atom;
    DomainAtom atom;
    DomainElement element;

    std::string render() const;
    bool operator==(const RuleHead&) const = default;
};

struct GuardedRule {
    RuleHead head;
    Formula guard;
    std::vector<DomainElement> needs;
    std::vector<Commitment> commitments;
    std::string occ;
};

/// One rule per reachable atom leaf (and one creation rule per New option).
std::vector<GuardedRule> flatten(const GroundTree& tree);

// ---------------------------------------------------------------------------
// Object-creation elimination

struct NewElimination {
    Theory theory;
    std::vector<std::string> aux_predicates;  // N_i, in New-node order
};

/// Replaces every `NEW x: C` by `SELECT x WHERE true: N_i(x, v...) CAND C`, adding N_i and the
/// unicity and freshness sentences. Requires spare named elements in the input domain.
NewElimination eliminate_new(const Theory& t);

}  // namespace causalog
