#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "causalog/ast.hpp"
#include "causalog/structure.hpp"

namespace causalog {

/// Variable bindings; later entries shadow earlier ones.
class Bindings {
public:
    Bindings() = default;

    void push(const std::string& var, DomainElement e) { entries_.emplace_back(var, std::move(e)); }
    void pop(std::size_t n = 1) { entries_.resize(entries_.size() - n); }
    const DomainElement* lookup(const std::string& var) const;
    Bindings with(const std::string& var, DomainElement e) const {
        Bindings b = *this;
        b.push(var, std::move(e));
        return b;
    }

    const std::vector<std::pair<std::string, DomainElement>>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    /// `x=a,y=3`, innermost binding of each variable only, in binding order.
    std::string render() const;

    bool operator==(const Bindings&) const = default;

private:
    std::vector<std::pair<std::string, DomainElement>> entries_;
};

/// Denotation of `t`; nullopt when arithmetic leaves the declared integer range.
std::optional<DomainElement> eval_term(const Term& t, const Structure& s, const Bindings& env);

/// Classical two-valued satisfaction. Quantifiers range over s.domain().
bool eval2(const Formula& f, const Structure& s, const Bindings& env = {});

/// Strong Kleene evaluation. Quantifiers range over the base domain, weighted by element existence.
TruthValue eval3(const Formula& f, const PartialStructure& s, const Bindings& env = {});

/// Substitutes bound variables by their elements and folds arithmetic over known integers.
Term substitute(const Term& t, const Bindings& env, const Structure& s);
Formula substitute(const Formula& f, const Bindings& env, const Structure& s);

/// Ground atom for an effect head; nullopt if some argument is undefined.
std::optional<DomainAtom> ground_atom(const std::string& pred, const std::vector<Term>& args, const Structure& s,
                                      const Bindings& env);

}  // namespace causalog
