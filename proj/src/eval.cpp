#include "causalog/eval.hpp"

#include <algorithm>
#include <stdexcept>

namespace causalog {

const DomainElement* Bindings::lookup(const std::string& var) const {
    for (auto it = entries_.rbegin(); it != entries_.rend(); ++it)
        if (it->first == var) return &it->second;
    return nullptr;
}

std::string Bindings::render() const {
    std::string out;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        bool shadowed = false;
        for (std::size_t j = i + 1; j < entries_.size(); ++j) shadowed |= entries_[j].first == entries_[i].first;
        if (shadowed) continue;
        if (!out.empty()) out += ",";
        out += entries_[i].first + "=" + entries_[i].second.render();
    }
    return out;
}

std::optional<DomainElement> eval_term(const Term& t, const Structure& s, const Bindings& env) {
    return std::visit(
        [&](const auto& n) -> std::optional<DomainElement> {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, Term::Variable>) {
                const auto* e = env.lookup(n.name);
                if (!e) throw std::logic_error("unbound variable '" + n.name + "' during evaluation");
                return *e;
            } else if constexpr (std::is_same_v<N, Term::Constant>) {
                return s.constant(n.name);
            } else if constexpr (std::is_same_v<N, Term::Numeral>) {
                if (!s.int_range() || !s.int_range()->contains(n.value)) return std::nullopt;
                return DomainElement::integer(n.value);
            } else if constexpr (std::is_same_v<N, Term::Plus>) {
                auto a = eval_term(*n.lhs, s, env);
                auto b = eval_term(*n.rhs, s, env);
                if (!a || !b || !a->is_integer() || !b->is_integer() || !s.int_range()) return std::nullopt;
                auto sum = a->value + b->value;
                if (!s.int_range()->contains(sum)) return std::nullopt;
                return DomainElement::integer(sum);
            } else {
                return n.element;
            }
        },
        t.node);
}

namespace {

bool builtin_holds(const std::string& op, const DomainElement& a, const DomainElement& b) {
    if (op == "=") return a == b;
    if (op == "~=") return a != b;
    if (!a.is_integer() || !b.is_integer()) return false;
    if (op == "<") return a.value < b.value;
    if (op == ">") return a.value > b.value;
    if (op == "=<") return a.value <= b.value;
    return a.value >= b.value;
}

/// Evaluates atom arguments; nullopt if any is undefined.
std::optional<Tuple> eval_args(const std::vector<Term>& args, const Structure& s, const Bindings& env) {
    Tuple out;
    out.reserve(args.size());
    for (const auto& a : args) {
        auto v = eval_term(a, s, env);
        if (!v) return std::nullopt;
        out.push_back(std::move(*v));
    }
    return out;
}

bool eval2_quant(const std::vector<std::string>& vars, std::size_t i, bool universal, const Formula* qual,
                 const Formula& body, const Structure& s, Bindings& env) {
    if (i == vars.size()) {
        bool q = !qual || eval2(*qual, s, env);
        return universal ? (!q || eval2(body, s, env)) : (q && eval2(body, s, env));
    }
    for (const auto& d : s.domain()) {
        env.push(vars[i], d);
        bool r = eval2_quant(vars, i + 1, universal, qual, body, s, env);
        env.pop();
        if (universal && !r) return false;
        if (!universal && r) return true;
    }
    return universal;
}

TruthValue eval3_quant(const std::vector<std::string>& vars, std::size_t i, bool universal, const Formula* qual,
                       const Formula& body, const PartialStructure& s, Bindings& env) {
    if (i == vars.size()) {
        TruthValue q = qual ? eval3(*qual, s, env) : TruthValue::True;
        if (universal) return q == TruthValue::False ? TruthValue::True : tv_or(tv_not(q), eval3(body, s, env));
        return q == TruthValue::False ? TruthValue::False : tv_and(q, eval3(body, s, env));
    }
    TruthValue acc = universal ? TruthValue::True : TruthValue::False;
    for (const auto& d : s.base().domain()) {
        TruthValue ex = s.exists(d);
        if (ex == TruthValue::False) continue;
        env.push(vars[i], d);
        TruthValue inner = eval3_quant(vars, i + 1, universal, qual, body, s, env);
        env.pop();
        if (universal) {
            acc = tv_and(acc, tv_or(tv_not(ex), inner));
            if (acc == TruthValue::False) return acc;
        } else {
            acc = tv_or(acc, tv_and(ex, inner));
            if (acc == TruthValue::True) return acc;
        }
    }
    return acc;
}

}  // namespace

bool eval2(const Formula& f, const Structure& s, const Bindings& env_in) {
    return std::visit(
        [&](const auto& n) -> bool {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, Formula::Atom>) {
                auto args = eval_args(n.args, s, env_in);
                if (!args) return false;
                if (is_builtin_predicate(n.pred)) return builtin_holds(n.pred, (*args)[0], (*args)[1]);
                return s.holds(n.pred, *args);
            } else if constexpr (std::is_same_v<N, Formula::True>) {
                return true;
            } else if constexpr (std::is_same_v<N, Formula::False>) {
                return false;
            } else if constexpr (std::is_same_v<N, Formula::Not>) {
                return !eval2(*n.sub, s, env_in);
            } else if constexpr (std::is_same_v<N, Formula::And>) {
                return eval2(*n.lhs, s, env_in) && eval2(*n.rhs, s, env_in);
            } else if constexpr (std::is_same_v<N, Formula::Or>) {
                return eval2(*n.lhs, s, env_in) || eval2(*n.rhs, s, env_in);
            } else if constexpr (std::is_same_v<N, Formula::Implies>) {
                return !eval2(*n.lhs, s, env_in) || eval2(*n.rhs, s, env_in);
            } else {
                Bindings env = env_in;
                constexpr bool universal =
                    std::is_same_v<N, Formula::Forall> || std::is_same_v<N, Formula::ForallR>;
                if constexpr (std::is_same_v<N, Formula::Forall> || std::is_same_v<N, Formula::Exists>)
                    return eval2_quant(n.vars, 0, universal, nullptr, *n.body, s, env);
                else
                    return eval2_quant(n.vars, 0, universal, &*n.qual, *n.body, s, env);
            }
        },
        f.node);
}

TruthValue eval3(const Formula& f, const PartialStructure& s, const Bindings& env_in) {
    return std::visit(
        [&](const auto& n) -> TruthValue {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, Formula::Atom>) {
                auto args = eval_args(n.args, s.base(), env_in);
                if (!args) return TruthValue::False;
                if (is_builtin_predicate(n.pred))
                    return builtin_holds(n.pred, (*args)[0], (*args)[1]) ? TruthValue::True : TruthValue::False;
                return s.value(DomainAtom{n.pred, std::move(*args)});
            } else if constexpr (std::is_same_v<N, Formula::True>) {
                return TruthValue::True;
            } else if constexpr (std::is_same_v<N, Formula::False>) {
                return TruthValue::False;
            } else if constexpr (std::is_same_v<N, Formula::Not>) {
                return tv_not(eval3(*n.sub, s, env_in));
            } else if constexpr (std::is_same_v<N, Formula::And>) {
                TruthValue a = eval3(*n.lhs, s, env_in);
                if (a == TruthValue::False) return a;
                return tv_and(a, eval3(*n.rhs, s, env_in));
            } else if constexpr (std::is_same_v<N, Formula::Or>) {
                TruthValue a = eval3(*n.lhs, s, env_in);
                if (a == TruthValue::True) return a;
                return tv_or(a, eval3(*n.rhs, s, env_in));
            } else if constexpr (std::is_same_v<N, Formula::Implies>) {
                TruthValue a = eval3(*n.lhs, s, env_in);
                if (a == TruthValue::False) return TruthValue::True;
                return tv_or(tv_not(a), eval3(*n.rhs, s, env_in));
            } else {
                Bindings env = env_in;
                constexpr bool universal =
                    std::is_same_v<N, Formula::Forall> || std::is_same_v<N, Formula::ForallR>;
                if constexpr (std::is_same_v<N, Formula::Forall> || std::is_same_v<N, Formula::Exists>)
                    return eval3_quant(n.vars, 0, universal, nullptr, *n.body, s, env);
                else
                    return eval3_quant(n.vars, 0, universal, &*n.qual, *n.body, s, env);
            }
        },
        f.node);
}

// ---------------------------------------------------------------------------
// Substitution

namespace {

Bindings without(const Bindings& env, const std::vector<std::string>& vars) {
    Bindings out;
    for (const auto& [v, e] : env.entries())
        if (std::find(vars.begin(), vars.end(), v) == vars.end()) out.push(v, e);
    return out;
}

}  // namespace

Term substitute(const Term& t, const Bindings& env, const Structure& s) {
    return std::visit(
        [&](const auto& n) -> Term {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, Term::Variable>) {
                const auto* e = env.lookup(n.name);
                return e ? Term::element(*e) : t;
            } else if constexpr (std::is_same_v<N, Term::Plus>) {
                Term a = substitute(*n.lhs, env, s);
                Term b = substitute(*n.rhs, env, s);
                Term folded = Term::plus(a, b);
                auto ground = [](const Term& x) {
                    return std::holds_alternative<Term::Element>(x.node) || std::holds_alternative<Term::Numeral>(x.node);
                };
                if (ground(a) && ground(b)) {
                    if (auto v = eval_term(folded, s, {})) return Term::element(*v);
                }
                return folded;
            } else {
                return t;
            }
        },
        t.node);
}

Formula substitute(const Formula& f, const Bindings& env, const Structure& s) {
    if (env.empty()) return f;
    return std::visit(
        [&](const auto& n) -> Formula {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, Formula::Atom>) {
                std::vector<Term> args;
                for (const auto& a : n.args) args.push_back(substitute(a, env, s));
                return fo::atom(n.pred, std::move(args));
            } else if constexpr (std::is_same_v<N, Formula::True> || std::is_same_v<N, Formula::False>) {
                return f;
            } else if constexpr (std::is_same_v<N, Formula::Not>) {
                return fo::neg(substitute(*n.sub, env, s));
            } else if constexpr (std::is_same_v<N, Formula::And>) {
                return fo::conj(substitute(*n.lhs, env, s), substitute(*n.rhs, env, s));
            } else if constexpr (std::is_same_v<N, Formula::Or>) {
                return fo::disj(substitute(*n.lhs, env, s), substitute(*n.rhs, env, s));
            } else if constexpr (std::is_same_v<N, Formula::Implies>) {
                return fo::implies(substitute(*n.lhs, env, s), substitute(*n.rhs, env, s));
            } else if constexpr (std::is_same_v<N, Formula::Forall>) {
                return fo::forall(n.vars, substitute(*n.body, without(env, n.vars), s));
            } else if constexpr (std::is_same_v<N, Formula::Exists>) {
                return fo::exists(n.vars, substitute(*n.body, without(env, n.vars), s));
            } else if constexpr (std::is_same_v<N, Formula::ForallR>) {
                auto inner = without(env, n.vars);
                return fo::forall_r(n.vars, substitute(*n.qual, inner, s), substitute(*n.body, inner, s));
            } else {
                auto inner = without(env, n.vars);
                return fo::exists_r(n.vars, substitute(*n.qual, inner, s), substitute(*n.body, inner, s));
            }
        },
        f.node);
}

std::optional<DomainAtom> ground_atom(const std::string& pred, const std::vector<Term>& args, const Structure& s,
                                      const Bindings& env) {
    auto tuple = eval_args(args, s, env);
    if (!tuple) return std::nullopt;
    return DomainAtom{pred, std::move(*tuple)};
}

}  // namespace causalog
