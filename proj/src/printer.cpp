#include "causalog/printer.hpp"

#include <sstream>

namespace causalog {

namespace {

std::string join(const std::vector<std::string>& xs, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += sep;
        out += xs[i];
    }
    return out;
}

std::string args_text(const std::vector<Term>& args) {
    if (args.empty()) return {};
    std::vector<std::string> parts;
    for (const auto& a : args) parts.push_back(print_term(a));
    return "(" + join(parts, ",") + ")";
}

// Precedence: 0 quantifier body, 1 implication, 2 disjunction, 3 conjunction, 4 negation/atom.
std::string formula_text(const Formula& f, int ctx) {
    auto wrap = [&](int own, std::string s) { return ctx > own ? "(" + s + ")" : s; };
    return std::visit(
        [&](const auto& n) -> std::string {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, Formula::Atom>) {
                if (is_builtin_predicate(n.pred)) return print_term(n.args[0]) + " " + n.pred + " " + print_term(n.args[1]);
                return n.pred + args_text(n.args);
            } else if constexpr (std::is_same_v<N, Formula::True>) {
                return "true";
            } else if constexpr (std::is_same_v<N, Formula::False>) {
                return "false";
            } else if constexpr (std::is_same_v<N, Formula::Not>) {
                return "~" + formula_text(*n.sub, 4);
            } else if constexpr (std::is_same_v<N, Formula::And>) {
                return wrap(3, formula_text(*n.lhs, 3) + " & " + formula_text(*n.rhs, 4));
            } else if constexpr (std::is_same_v<N, Formula::Or>) {
                return wrap(2, formula_text(*n.lhs, 2) + " | " + formula_text(*n.rhs, 3));
            } else if constexpr (std::is_same_v<N, Formula::Implies>) {
                return wrap(1, formula_text(*n.lhs, 2) + " => " + formula_text(*n.rhs, 1));
            } else if constexpr (std::is_same_v<N, Formula::Forall>) {
                return wrap(0, "! " + join(n.vars, ", ") + ": " + formula_text(*n.body, 0));
            } else if constexpr (std::is_same_v<N, Formula::Exists>) {
                return wrap(0, "? " + join(n.vars, ", ") + ": " + formula_text(*n.body, 0));
            } else if constexpr (std::is_same_v<N, Formula::ForallR>) {
                return wrap(0, "! " + join(n.vars, ", ") + " WHERE " + formula_text(*n.qual, 0) + ": " +
                                   formula_text(*n.body, 0));
            } else {
                return wrap(0, "? " + join(n.vars, ", ") + " WHERE " + formula_text(*n.qual, 0) + ": " +
                                   formula_text(*n.body, 0));
            }
        },
        f.node);
}

std::string operand_text(const Cee& c) {
    if (std::holds_alternative<Cee::Atom>(c.node)) return print_cee(c);
    return "(" + print_cee(c) + ")";
}

}  // namespace

std::string print_term(const Term& t) {
    return std::visit(
        [](const auto& n) -> std::string {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, Term::Variable> || std::is_same_v<N, Term::Constant>) {
                return n.name;
            } else if constexpr (std::is_same_v<N, Term::Numeral>) {
                return std::to_string(n.value);
            } else if constexpr (std::is_same_v<N, Term::Plus>) {
                return print_term(*n.lhs) + "+" + print_term(*n.rhs);
            } else {
                return n.element.render();
            }
        },
        t.node);
}

std::string print_formula(const Formula& f) { return formula_text(f, 0); }

std::string print_cee(const Cee& c) {
    return std::visit(
        [](const auto& n) -> std::string {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, Cee::Atom>) {
                return n.pred + args_text(n.args);
            } else if constexpr (std::is_same_v<N, Cee::If>) {
                return "IF " + print_formula(n.condition) + " THEN " + print_cee(*n.body);
            } else if constexpr (std::is_same_v<N, Cee::And>) {
                return operand_text(*n.lhs) + " CAND " + operand_text(*n.rhs);
            } else if constexpr (std::is_same_v<N, Cee::Or>) {
                return operand_text(*n.lhs) + " COR " + operand_text(*n.rhs);
            } else if constexpr (std::is_same_v<N, Cee::All>) {
                return "ALL " + join(n.vars, ", ") + " WHERE " + print_formula(n.qual) + ": " + print_cee(*n.body);
            } else if constexpr (std::is_same_v<N, Cee::Select>) {
                return "SELECT " + join(n.vars, ", ") + " WHERE " + print_formula(n.qual) + ": " + print_cee(*n.body);
            } else {
                return "NEW " + n.var + ": " + print_cee(*n.body);
            }
        },
        c.node);
}

std::string print_vocabulary(const Vocabulary& v) {
    std::ostringstream out;
    out << "vocab {\n";
    for (const auto& p : v.predicates) out << "  pred " << p.name << "/" << p.arity << ";\n";
    for (const auto& c : v.constants) out << "  const " << c << ";\n";
    if (v.ints) out << "  int " << v.ints->lo << ".." << v.ints->hi << ";\n";
    out << "}\n";
    return out.str();
}

std::string print_theory(const Theory& t) {
    std::ostringstream out;
    out << print_vocabulary(t.vocabulary);
    out << "theory {\n";
    for (const auto& c : t.cees) out << "  " << print_cee(c) << ".\n";
    for (const auto& s : t.sentences) out << "  FO: " << print_formula(s) << ".\n";
    out << "}\n";
    return out.str();
}

}  // namespace causalog
