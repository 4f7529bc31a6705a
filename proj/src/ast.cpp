#include "causalog/ast.hpp"

#include <algorithm>

#include "causalog/errors.hpp"

namespace causalog {

std::string DomainElement::render() const {
    switch (kind) {
        case Kind::Named:
            return name;
        case Kind::Integer:
            return std::to_string(value);
        case Kind::Created:
            return "_p" + std::to_string(value);
    }
    return {};
}

std::string render_tuple(const Tuple& t) {
    std::string out = "(";
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) out += ",";
        out += t[i].render();
    }
    return out + ")";
}

bool is_builtin_predicate(const std::string& name) {
    return name == "=" || name == "~=" || name == "<" || name == ">" || name == "=<" || name == ">=";
}

namespace fo {
Formula atom(std::string pred, std::vector<Term> args) { return {Formula::Atom{std::move(pred), std::move(args)}}; }
Formula truth() { return {Formula::True{}}; }
Formula falsity() { return {Formula::False{}}; }
Formula neg(Formula f) { return {Formula::Not{std::move(f)}}; }
Formula conj(Formula a, Formula b) { return {Formula::And{std::move(a), std::move(b)}}; }
Formula disj(Formula a, Formula b) { return {Formula::Or{std::move(a), std::move(b)}}; }
Formula implies(Formula a, Formula b) { return {Formula::Implies{std::move(a), std::move(b)}}; }
Formula forall(std::vector<std::string> vars, Formula body) {
    return {Formula::Forall{std::move(vars), std::move(body)}};
}
Formula exists(std::vector<std::string> vars, Formula body) {
    return {Formula::Exists{std::move(vars), std::move(body)}};
}
Formula forall_r(std::vector<std::string> vars, Formula qual, Formula body) {
    return {Formula::ForallR{std::move(vars), std::move(qual), std::move(body)}};
}
Formula exists_r(std::vector<std::string> vars, Formula qual, Formula body) {
    return {Formula::ExistsR{std::move(vars), std::move(qual), std::move(body)}};
}
Formula conj_all(const std::vector<Formula>& parts) {
    if (parts.empty()) return truth();
    Formula acc = parts.front();
    for (std::size_t i = 1; i < parts.size(); ++i) acc = conj(acc, parts[i]);
    return acc;
}
}  // namespace fo

namespace cee {
Cee atom(std::string pred, std::vector<Term> args) { return {Cee::Atom{std::move(pred), std::move(args)}, {}}; }
Cee if_then(Formula cond, Cee body) { return {Cee::If{std::move(cond), std::move(body)}, {}}; }
Cee cand(Cee a, Cee b) { return {Cee::And{std::move(a), std::move(b)}, {}}; }
Cee cor(Cee a, Cee b) { return {Cee::Or{std::move(a), std::move(b)}, {}}; }
Cee all(std::vector<std::string> vars, Formula qual, Cee body) {
    return {Cee::All{std::move(vars), std::move(qual), std::move(body)}, {}};
}
Cee select(std::vector<std::string> vars, Formula qual, Cee body) {
    return {Cee::Select{std::move(vars), std::move(qual), std::move(body)}, {}};
}
Cee make_new(std::string var, Cee body) { return {Cee::New{std::move(var), std::move(body)}, {}}; }
}  // namespace cee

Formula desugar_restricted(const Formula& f) {
    return std::visit(
        [&](const auto& n) -> Formula {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, Formula::Atom> || std::is_same_v<N, Formula::True> ||
                          std::is_same_v<N, Formula::False>) {
                return f;
            } else if constexpr (std::is_same_v<N, Formula::Not>) {
                return fo::neg(desugar_restricted(*n.sub));
            } else if constexpr (std::is_same_v<N, Formula::And>) {
                return fo::conj(desugar_restricted(*n.lhs), desugar_restricted(*n.rhs));
            } else if constexpr (std::is_same_v<N, Formula::Or>) {
                return fo::disj(desugar_restricted(*n.lhs), desugar_restricted(*n.rhs));
            } else if constexpr (std::is_same_v<N, Formula::Implies>) {
                return fo::implies(desugar_restricted(*n.lhs), desugar_restricted(*n.rhs));
            } else if constexpr (std::is_same_v<N, Formula::Forall>) {
                return fo::forall(n.vars, desugar_restricted(*n.body));
            } else if constexpr (std::is_same_v<N, Formula::Exists>) {
                return fo::exists(n.vars, desugar_restricted(*n.body));
            } else if constexpr (std::is_same_v<N, Formula::ForallR>) {
                return fo::forall(n.vars, fo::implies(desugar_restricted(*n.qual), desugar_restricted(*n.body)));
            } else {
                return fo::exists(n.vars, fo::conj(desugar_restricted(*n.qual), desugar_restricted(*n.body)));
            }
        },
        f.node);
}

namespace {

void term_vars(const Term& t, const std::set<std::string>& bound, std::set<std::string>& out) {
    if (auto v = std::get_if<Term::Variable>(&t.node)) {
        if (!bound.count(v->name)) out.insert(v->name);
    } else if (auto p = std::get_if<Term::Plus>(&t.node)) {
        term_vars(*p->lhs, bound, out);
        term_vars(*p->rhs, bound, out);
    }
}

void formula_vars(const Formula& f, std::set<std::string> bound, std::set<std::string>& out) {
    std::visit(
        [&](const auto& n) {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, Formula::Atom>) {
                for (const auto& a : n.args) term_vars(a, bound, out);
            } else if constexpr (std::is_same_v<N, Formula::Not>) {
                formula_vars(*n.sub, bound, out);
            } else if constexpr (std::is_same_v<N, Formula::And> || std::is_same_v<N, Formula::Or> ||
                                 std::is_same_v<N, Formula::Implies>) {
                formula_vars(*n.lhs, bound, out);
                formula_vars(*n.rhs, bound, out);
            } else if constexpr (std::is_same_v<N, Formula::Forall> || std::is_same_v<N, Formula::Exists>) {
                bound.insert(n.vars.begin(), n.vars.end());
                formula_vars(*n.body, bound, out);
            } else if constexpr (std::is_same_v<N, Formula::ForallR> || std::is_same_v<N, Formula::ExistsR>) {
                bound.insert(n.vars.begin(), n.vars.end());
                formula_vars(*n.qual, bound, out);
                formula_vars(*n.body, bound, out);
            }
        },
        f.node);
}

}  // namespace

std::set<std::string> free_variables(const Formula& f) {
    std::set<std::string> out;
    formula_vars(f, {}, out);
    return out;
}

Cee with_occurrences(const Cee& c, const std::string& root) {
    Cee out = std::visit(
        [&](const auto& n) -> Cee {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, Cee::Atom>) {
                return {n, {}};
            } else if constexpr (std::is_same_v<N, Cee::If>) {
                return cee::if_then(n.condition, with_occurrences(*n.body, root + ".0"));
            } else if constexpr (std::is_same_v<N, Cee::And>) {
                return cee::cand(with_occurrences(*n.lhs, root + ".0"), with_occurrences(*n.rhs, root + ".1"));
            } else if constexpr (std::is_same_v<N, Cee::Or>) {
                return cee::cor(with_occurrences(*n.lhs, root + ".0"), with_occurrences(*n.rhs, root + ".1"));
            } else if constexpr (std::is_same_v<N, Cee::All>) {
                return cee::all(n.vars, n.qual, with_occurrences(*n.body, root + ".0"));
            } else if constexpr (std::is_same_v<N, Cee::Select>) {
                return cee::select(n.vars, n.qual, with_occurrences(*n.body, root + ".0"));
            } else {
                return cee::make_new(n.var, with_occurrences(*n.body, root + ".0"));
            }
        },
        c.node);
    out.occ = root;
    return out;
}

const PredicateDecl* Vocabulary::find_predicate(const std::string& name) const {
    auto it = std::find_if(predicates.begin(), predicates.end(), [&](const auto& p) { return p.name == name; });
    return it == predicates.end() ? nullptr : &*it;
}

bool Vocabulary::has_constant(const std::string& name) const {
    return std::find(constants.begin(), constants.end(), name) != constants.end();
}

Theory Theory::make(Vocabulary voc, std::vector<Cee> cees, std::vector<Formula> sentences) {
    Theory t;
    t.vocabulary = std::move(voc);
    for (std::size_t i = 0; i < cees.size(); ++i) t.cees.push_back(with_occurrences(cees[i], "c" + std::to_string(i)));
    t.sentences = std::move(sentences);
    return t;
}

namespace {

void collect_heads(const Cee& c, std::set<std::string>& out) {
    std::visit(
        [&](const auto& n) {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, Cee::Atom>) {
                out.insert(n.pred);
            } else if constexpr (std::is_same_v<N, Cee::And> || std::is_same_v<N, Cee::Or>) {
                collect_heads(*n.lhs, out);
                collect_heads(*n.rhs, out);
            } else {
                collect_heads(*n.body, out);
            }
        },
        c.node);
}

}  // namespace

std::set<std::string> endogenous_predicates(const Theory& t) {
    std::set<std::string> out;
    for (const auto& c : t.cees) collect_heads(c, out);
    return out;
}

std::map<std::string, SymbolRole> classify_symbols(const Theory& t) {
    auto endo = endogenous_predicates(t);
    std::map<std::string, SymbolRole> out;
    for (const auto& p : t.vocabulary.predicates)
        out[p.name] = endo.count(p.name) ? SymbolRole::Endogenous : SymbolRole::Exogenous;
    return out;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

class Validator {
public:
    explicit Validator(const Vocabulary& voc) : voc_(voc) {}

    void term(const Term& t, const std::set<std::string>& scope) const {
        if (auto v = std::get_if<Term::Variable>(&t.node)) {
            if (!scope.count(v->name)) throw ValidationError("unbound variable '" + v->name + "'");
        } else if (auto c = std::get_if<Term::Constant>(&t.node)) {
            if (!voc_.has_constant(c->name)) throw ValidationError("undeclared constant '" + c->name + "'");
        } else if (auto p = std::get_if<Term::Plus>(&t.node)) {
            term(*p->lhs, scope);
            term(*p->rhs, scope);
        }
    }

    void atom(const std::string& pred, const std::vector<Term>& args, const std::set<std::string>& scope,
              bool as_effect) const {
        if (is_builtin_predicate(pred)) {
            if (as_effect) throw ValidationError("built-in '" + pred + "' cannot be caused");
            if (args.size() != 2) throw ValidationError("arity mismatch for '" + pred + "'");
        } else {
            const auto* decl = voc_.find_predicate(pred);
            if (!decl) throw ValidationError("undeclared predicate '" + pred + "'");
            if (static_cast<int>(args.size()) != decl->arity)
                throw ValidationError("arity mismatch for '" + pred + "': expected " + std::to_string(decl->arity) +
                                      ", got " + std::to_string(args.size()));
        }
        for (const auto& a : args) term(a, scope);
    }

    void formula(const Formula& f, std::set<std::string> scope) const {
        std::visit(
            [&](const auto& n) {
                using N = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<N, Formula::Atom>) {
                    atom(n.pred, n.args, scope, false);
                } else if constexpr (std::is_same_v<N, Formula::Not>) {
                    formula(*n.sub, scope);
                } else if constexpr (std::is_same_v<N, Formula::And> || std::is_same_v<N, Formula::Or> ||
                                     std::is_same_v<N, Formula::Implies>) {
                    formula(*n.lhs, scope);
                    formula(*n.rhs, scope);
                } else if constexpr (std::is_same_v<N, Formula::Forall> || std::is_same_v<N, Formula::Exists>) {
                    scope.insert(n.vars.begin(), n.vars.end());
                    formula(*n.body, scope);
                } else if constexpr (std::is_same_v<N, Formula::ForallR> || std::is_same_v<N, Formula::ExistsR>) {
                    scope.insert(n.vars.begin(), n.vars.end());
                    formula(*n.qual, scope);
                    formula(*n.body, scope);
                }
            },
            f.node);
    }

    void effect(const Cee& c, std::set<std::string> scope) const {
        std::visit(
            [&](const auto& n) {
                using N = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<N, Cee::Atom>) {
                    atom(n.pred, n.args, scope, true);
                } else if constexpr (std::is_same_v<N, Cee::If>) {
                    formula(n.condition, scope);
                    effect(*n.body, scope);
                } else if constexpr (std::is_same_v<N, Cee::And> || std::is_same_v<N, Cee::Or>) {
                    effect(*n.lhs, scope);
                    effect(*n.rhs, scope);
                } else if constexpr (std::is_same_v<N, Cee::All> || std::is_same_v<N, Cee::Select>) {
                    scope.insert(n.vars.begin(), n.vars.end());
                    formula(n.qual, scope);
                    effect(*n.body, scope);
                } else {
                    scope.insert(n.var);
                    effect(*n.body, scope);
                }
            },
            c.node);
    }

private:
    const Vocabulary& voc_;
};

}  // namespace

void validate(const Theory& t) {
    std::set<std::string> names;
    for (const auto& p : t.vocabulary.predicates) {
        if (is_builtin_predicate(p.name)) throw ValidationError("cannot declare built-in '" + p.name + "'");
        if (!names.insert(p.name).second) throw ValidationError("redeclared symbol '" + p.name + "'");
    }
    for (const auto& c : t.vocabulary.constants)
        if (!names.insert(c).second) throw ValidationError("redeclared symbol '" + c + "'");
    Validator v(t.vocabulary);
    for (const auto& c : t.cees) v.effect(c, {});
    for (const auto& s : t.sentences) v.formula(s, {});
}

}  // namespace causalog
