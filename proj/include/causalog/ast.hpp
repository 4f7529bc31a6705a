#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "causalog/element.hpp"

namespace causalog {

/// Immutable, shareable owning pointer with deep equality.
template <typename T>
class Box {
public:
    Box(T value) : ptr_(std::make_shared<const T>(std::move(value))) {}

    const T& operator*() const { return *ptr_; }
    const T* operator->() const { return ptr_.get(); }
    const std::shared_ptr<const T>& shared() const { return ptr_; }

    bool operator==(const Box& other) const { return ptr_ == other.ptr_ || *ptr_ == *other.ptr_; }

private:
    std::shared_ptr<const T> ptr_;
};

// ---------------------------------------------------------------------------
// Terms

struct Term {
    struct Variable {
        std::string name;
        bool operator==(const Variable&) const = default;
    };
    struct Constant {
        std::string name;
        bool operator==(const Constant&) const = default;
    };
    struct Numeral {
        std::int64_t value;
        bool operator==(const Numeral&) const = default;
    };
    struct Plus {
        Box<Term> lhs;
        Box<Term> rhs;
        bool operator==(const Plus&) const = default;
    };
    /// A domain element substituted for a variable during grounding. Never produced by the parser.
    struct Element {
        DomainElement element;
        bool operator==(const Element&) const = default;
    };

    std::variant<Variable, Constant, Numeral, Plus, Element> node;

    static Term var(std::string n) { return {Variable{std::move(n)}}; }
    static Term constant(std::string n) { return {Constant{std::move(n)}}; }
    static Term numeral(std::int64_t v) { return {Numeral{v}}; }
    static Term plus(Term a, Term b) { return {Plus{std::move(a), std::move(b)}}; }
    static Term element(DomainElement e) { return {Element{std::move(e)}}; }

    bool operator==(const Term&) const = default;
};

// ---------------------------------------------------------------------------
// First-order formulas

/// Built-in interpreted predicates; never declared by the user.
bool is_builtin_predicate(const std::string& name);

struct Formula {
    struct Atom {
        std::string pred;
        std::vector<Term> args;
        bool operator==(const Atom&) const = default;
    };
    struct True {
        bool operator==(const True&) const = default;
    };
    struct False {
        bool operator==(const False&) const = default;
    };
    struct Not {
        Box<Formula> sub;
        bool operator==(const Not&) const = default;
    };
    struct And {
        Box<Formula> lhs, rhs;
        bool operator==(const And&) const = default;
    };
    struct Or {
        Box<Formula> lhs, rhs;
        bool operator==(const Or&) const = default;
    };
    struct Implies {
        Box<Formula> lhs, rhs;
        bool operator==(const Implies&) const = default;
    };
    struct Forall {
        std::vector<std::string> vars;
        Box<Formula> body;
        bool operator==(const Forall&) const = default;
    };
    struct Exists {
        std::vector<std::string> vars;
        Box<Formula> body;
        bool operator==(const Exists&) const = default;
    };
    /// `! x WHERE qual: body`, sugar for `! x: qual => body`.
    struct ForallR {
        std::vector<std::string> vars;
        Box<Formula> qual, body;
        bool operator==(const ForallR&) const = default;
    };
    /// `? x WHERE qual: body`, sugar for `? x: qual & body`.
    struct ExistsR {
        std::vector<std::string> vars;
        Box<Formula> qual, body;
        bool operator==(const ExistsR&) const = default;
    };

    std::variant<Atom, True, False, Not, And, Or, Implies, Forall, Exists, ForallR, ExistsR> node;

    bool operator==(const Formula&) const = default;
};

namespace fo {
Formula atom(std::string pred, std::vector<Term> args = {});
Formula truth();
Formula falsity();
Formula neg(Formula f);
Formula conj(Formula a, Formula b);
Formula disj(Formula a, Formula b);
Formula implies(Formula a, Formula b);
Formula forall(std::vector<std::string> vars, Formula body);
Formula exists(std::vector<std::string> vars, Formula body);
Formula forall_r(std::vector<std::string> vars, Formula qual, Formula body);
Formula exists_r(std::vector<std::string> vars, Formula qual, Formula body);
/// Left-nested conjunction; empty input yields `true`.
Formula conj_all(const std::vector<Formula>& parts);
}  // namespace fo

/// Replace restricted quantifiers by their guarded unrestricted forms.
Formula desugar_restricted(const Formula& f);

std::set<std::string> free_variables(const Formula& f);

// ---------------------------------------------------------------------------
// Causal effect expressions

struct Cee {
    struct Atom {
        std::string pred;
        std::vector<Term> args;
        bool operator==(const Atom&) const = default;
    };
    struct If {
        Formula condition;
        Box<Cee> body;
        bool operator==(const If&) const = default;
    };
    struct And {
        Box<Cee> lhs, rhs;
        bool operator==(const And&) const = default;
    };
    struct Or {
        Box<Cee> lhs, rhs;
        bool operator==(const Or&) const = default;
    };
    struct All {
        std::vector<std::string> vars;
        Formula qual;
        Box<Cee> body;
        bool operator==(const All&) const = default;
    };
    struct Select {
        std::vector<std::string> vars;
        Formula qual;
        Box<Cee> body;
        bool operator==(const Select&) const = default;
    };
    struct New {
        std::string var;
        Box<Cee> body;
        bool operator==(const New&) const = default;
    };

    std::variant<Atom, If, And, Or, All, Select, New> node;
    /// Path of this node in its theory, e.g. `c1.0.1`. Assigned by Theory::make.
    std::string occ;

    bool operator==(const Cee&) const = default;
};

namespace cee {
Cee atom(std::string pred, std::vector<Term> args = {});
Cee if_then(Formula cond, Cee body);
Cee cand(Cee a, Cee b);
Cee cor(Cee a, Cee b);
Cee all(std::vector<std::string> vars, Formula qual, Cee body);
Cee select(std::vector<std::string> vars, Formula qual, Cee body);
Cee make_new(std::string var, Cee body);
}  // namespace cee

/// Copy of `c` with occurrence-ids re-derived from `root` downwards.
Cee with_occurrences(const Cee& c, const std::string& root);

// ---------------------------------------------------------------------------
// Vocabulary and theories

struct PredicateDecl {
    std::string name;
    int arity = 0;
    bool operator==(const PredicateDecl&) const = default;
};

struct Vocabulary {
    std::vector<PredicateDecl> predicates;
    std::vector<std::string> constants;
    std::optional<IntRange> ints;

    const PredicateDecl* find_predicate(const std::string& name) const;
    bool has_constant(const std::string& name) const;

    bool operator==(const Vocabulary&) const = default;
};

enum class SymbolRole { Endogenous, Exogenous };

struct Theory {
    Vocabulary vocabulary;
    std::vector<Cee> cees;
    std::vector<Formula> sentences;

    /// Assigns occurrence-ids (`c<i>` for the i-th CEE) and returns the theory.
    static Theory make(Vocabulary voc, std::vector<Cee> cees, std::vector<Formula> sentences);

    bool operator==(const Theory&) const = default;
};

/// P is endogenous iff some atom-expression of some CEE has predicate P.
std::map<std::string, SymbolRole> classify_symbols(const Theory& t);
std::set<std::string> endogenous_predicates(const Theory& t);

/// Checks closedness, declared symbols and arities. Throws ValidationError.
void validate(const Theory& t);

}  // namespace causalog
