#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "causalog/ast.hpp"
#include "causalog/element.hpp"

namespace causalog {

struct DomainAtom {
    std::string pred;
    Tuple args;

    std::string render() const;

    auto operator<=>(const DomainAtom&) const = default;
    bool operator==(const DomainAtom&) const = default;
};

struct AtomHash {
    std::size_t operator()(const DomainAtom& a) const {
        std::size_t h = std::hash<std::string>{}(a.pred);
        for (const auto& e : a.args) h = hash_combine(h, ElementHash{}(e));
        return h;
    }
};

/// A finite two-valued structure. Integers in the declared range are domain elements but are
/// never stored extensionally.
class Structure {
public:
    Structure() = default;

    void set_int_range(std::optional<IntRange> r);
    const std::optional<IntRange>& int_range() const { return ints_; }

    void add_element(const DomainElement& e);
    bool contains(const DomainElement& e) const;
    /// Named, then integer, then created elements, each in ascending order.
    const std::vector<DomainElement>& domain() const { return domain_; }
    std::vector<DomainElement> created() const;

    void set_constant(const std::string& name, DomainElement value);
    /// Denotation of a constant; defaults to the named element of the same name.
    DomainElement constant(const std::string& name) const;
    const std::map<std::string, DomainElement>& constants() const { return constants_; }

    /// Declares a relation (possibly empty) so it appears in output.
    void declare(const std::string& pred);
    void add_fact(const DomainAtom& a);
    void add_fact(const std::string& pred, Tuple args) { add_fact(DomainAtom{pred, std::move(args)}); }
    void remove_relation(const std::string& pred);
    bool holds(const std::string& pred, const Tuple& args) const;
    bool holds(const DomainAtom& a) const { return holds(a.pred, a.args); }
    const std::map<std::string, std::set<Tuple>>& relations() const { return relations_; }
    /// All true atoms, ordered.
    std::vector<DomainAtom> true_atoms() const;

    /// Applies an element renaming to every relation, constant and the domain.
    Structure renamed(const std::map<DomainElement, DomainElement>& rename) const;

    bool operator==(const Structure& o) const {
        return ints_ == o.ints_ && domain_ == o.domain_ && constants_ == o.constants_ && relations_ == o.relations_;
    }

private:
    std::optional<IntRange> ints_;
    std::set<DomainElement> stored_;  // named and created elements
    std::vector<DomainElement> domain_;
    std::map<std::string, DomainElement> constants_;
    std::map<std::string, std::set<Tuple>> relations_;

    void rebuild_domain();
};

enum class TruthValue { False, Unknown, True };

inline TruthValue tv_not(TruthValue v) {
    return v == TruthValue::True ? TruthValue::False : v == TruthValue::False ? TruthValue::True : TruthValue::Unknown;
}
inline TruthValue tv_and(TruthValue a, TruthValue b) { return a < b ? a : b; }
inline TruthValue tv_or(TruthValue a, TruthValue b) { return a < b ? b : a; }
const char* to_string(TruthValue v);

/// Three-valued interpretation: a two-valued base structure for exogenous symbols plus an
/// overlay giving endogenous atoms (and the existence of created elements) true/false/unknown.
class PartialStructure {
public:
    PartialStructure(Structure base, std::set<std::string> endogenous);

    /// Total structure with no unknowns: endogenous atoms read from `s`.
    static PartialStructure from_total(const Structure& s, const std::set<std::string>& endogenous);

    const Structure& base() const { return base_; }
    const std::set<std::string>& endogenous() const { return endogenous_; }

    TruthValue value(const DomainAtom& a) const;
    void set(const DomainAtom& a, TruthValue v);
    /// Value of endogenous atoms not set explicitly (False unless changed).
    void set_default(TruthValue v) { default_ = v; }

    /// Elements not marked conditional always exist.
    TruthValue exists(const DomainElement& e) const;
    void set_exists(const DomainElement& e, TruthValue v);

    bool is_total() const;
    /// Refinement order: every known value of `this` is preserved in `finer`.
    bool less_precise_than(const PartialStructure& finer) const;
    std::vector<DomainAtom> unknown_atoms() const;

    /// Structure with the true endogenous atoms and only existing elements; requires is_total().
    Structure project() const;

private:
    Structure base_;
    std::set<std::string> endogenous_;
    TruthValue default_ = TruthValue::False;
    std::unordered_map<DomainAtom, TruthValue, AtomHash> overlay_;
    std::unordered_map<DomainElement, TruthValue, ElementHash> existence_;
};

// ---------------------------------------------------------------------------
// Loading, default extension and comparison

/// Loads the exogenous input: `{"domain":[...], "int":[lo,hi], "<Pred>":[[...]...] | bool, "<Const>":"name"}`.
/// Throws ValidationError for unknown symbols, endogenous symbols and out-of-domain elements.
Structure load_structure(std::string_view json_text, const Vocabulary& voc, const std::set<std::string>& endogenous);

/// Loads a model file (same schema plus `created` and endogenous relations).
Structure load_model(std::string_view json_text, const Vocabulary& voc);

/// Serialises `s` using the structure schema; `created` lists created elements.
std::string structure_to_json(const Structure& s, const Vocabulary& voc);

/// All endogenous predicates interpreted as empty relations; exogenous part unchanged.
Structure default_extension(const Structure& exo, const Vocabulary& voc, const std::set<std::string>& endogenous);

/// Structure restricted to the given predicates (others removed); created elements that no longer
/// occur anywhere are kept.
Structure without_predicates(const Structure& s, const std::set<std::string>& drop);

/// Renames created elements into a canonical order and returns (canonical structure, key).
/// Two structures have the same key iff they are equal up to renaming created elements.
std::pair<Structure, std::string> canonicalize(const Structure& s);

/// True iff, ignoring `aux` predicates, a bijection between created elements makes m1 and m2 identical.
bool equal_modulo_created(const Structure& m1, const Structure& m2, const std::set<std::string>& aux = {});

}  // namespace causalog
