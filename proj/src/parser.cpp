#include "causalog/parser.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "causalog/errors.hpp"

namespace causalog {

namespace {

enum class Tok { Ident, Int, Punct, End };

struct Token {
    Tok kind;
    std::string text;
    std::size_t line;
    std::size_t col;
};

const std::set<std::string> kKeywords = {"ALL", "SELECT", "NEW",  "IF",   "THEN", "CAND",  "COR",
                                         "WHERE", "true", "false", "FO", "CEE",  "vocab", "theory"};

std::vector<Token> lex(std::string_view src) {
    static const std::vector<std::string> puncts = {"<=>", "~=", "=<", ">=", "=>", "..", "(", ")", ",", ".", ":", ";",
                                                    "{",   "}",  "/",  "+",  "~",  "&",  "|", "!", "?", "=", "<", ">",
                                                    "-"};
    std::vector<Token> out;
    std::size_t line = 1, col = 1, i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '%' || (c == '/' && i + 1 < src.size() && src[i + 1] == '/')) {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
            out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), line, col});
            advance(j - i);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            out.push_back({Tok::Int, std::string(src.substr(i, j - i)), line, col});
            advance(j - i);
            continue;
        }
        bool matched = false;
        for (const auto& p : puncts) {
            if (src.substr(i, p.size()) == p) {
                out.push_back({Tok::Punct, p, line, col});
                advance(p.size());
                matched = true;
                break;
            }
        }
        if (!matched) throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
    out.push_back({Tok::End, "", line, col});
    return out;
}

class Parser {
public:
    Parser(std::vector<Token> toks, const Vocabulary* voc) : toks_(std::move(toks)), voc_(voc) {}

    Theory theory() {
        Vocabulary voc = vocabulary();
        voc_ = &voc;
        std::vector<Cee> cees;
        std::vector<Formula> sentences;
        if (accept_ident("theory")) {
            expect("{");
            while (!peek_is("}")) statement(cees, sentences);
            expect("}");
        }
        if (peek().kind != Tok::End) fail("expected end of input");
        return Theory::make(std::move(voc), std::move(cees), std::move(sentences));
    }

    Formula sentence() {
        Formula f = formula();
        accept(".");
        if (peek().kind != Tok::End) fail("unexpected trailing input");
        return f;
    }

    Cee effect_expression() {
        Cee c = cee_expr();
        accept(".");
        if (peek().kind != Tok::End) fail("unexpected trailing input");
        return with_occurrences(c, "c0");
    }

private:
    // -- token helpers ------------------------------------------------------

    const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
    bool peek_is(const std::string& text, std::size_t ahead = 0) const {
        const auto& t = peek(ahead);
        return t.kind != Tok::End && t.kind != Tok::Int && t.text == text;
    }
    bool accept(const std::string& p) {
        if (peek().kind == Tok::Punct && peek().text == p) {
            ++pos_;
            return true;
        }
        return false;
    }
    bool accept_ident(const std::string& kw) {
        if (peek().kind == Tok::Ident && peek().text == kw) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(const std::string& p) {
        if (!accept(p)) fail("expected '" + p + "'");
    }
    void expect_ident(const std::string& kw) {
        if (!accept_ident(kw)) fail("expected '" + kw + "'");
    }
    [[noreturn]] void fail(const std::string& msg) const { fail_at(peek(), msg); }
    [[noreturn]] static void fail_at(const Token& t, const std::string& msg) {
        std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
        throw ParseError(msg + ", found " + found, t.line, t.col);
    }
    std::string identifier() {
        const auto& t = peek();
        if (t.kind != Tok::Ident || kKeywords.count(t.text)) fail("expected identifier");
        ++pos_;
        return t.text;
    }
    std::int64_t integer() {
        bool negative = accept("-");
        const auto& t = peek();
        if (t.kind != Tok::Int) fail("expected integer");
        ++pos_;
        std::int64_t v = std::stoll(t.text);
        return negative ? -v : v;
    }
    std::vector<std::string> variable_list() {
        std::vector<std::string> vars{identifier()};
        while (accept(",")) vars.push_back(identifier());
        return vars;
    }
    bool in_scope(const std::string& name) const {
        return std::find(scope_.rbegin(), scope_.rend(), name) != scope_.rend();
    }

    struct ScopeGuard {
        Parser& p;
        std::size_t n;
        ScopeGuard(Parser& parser, const std::vector<std::string>& vars) : p(parser), n(vars.size()) {
            p.scope_.insert(p.scope_.end(), vars.begin(), vars.end());
        }
        ~ScopeGuard() { p.scope_.resize(p.scope_.size() - n); }
    };

    // -- vocabulary ---------------------------------------------------------

    Vocabulary vocabulary() {
        Vocabulary voc;
        std::set<std::string> names;
        expect_ident("vocab");
        expect("{");
        while (!accept("}")) {
            const Token start = peek();
            if (accept_ident("pred")) {
                const Token at = peek();
                std::string name = identifier();
                expect("/");
                auto arity = integer();
                if (arity < 0) fail_at(at, "negative arity");
                if (!names.insert(name).second) fail_at(at, "redeclared symbol '" + name + "'");
                voc.predicates.push_back({name, static_cast<int>(arity)});
            } else if (accept_ident("const")) {
                do {
                    const Token at = peek();
                    std::string name = identifier();
                    if (!names.insert(name).second) fail_at(at, "redeclared symbol '" + name + "'");
                    voc.constants.push_back(name);
                } while (accept(","));
            } else if (accept_ident("int")) {
                if (voc.ints) fail_at(start, "integer range declared twice");
                IntRange r;
                r.lo = integer();
                expect("..");
                r.hi = integer();
                if (r.hi < r.lo) fail_at(start, "empty integer range");
                voc.ints = r;
            } else {
                fail("expected 'pred', 'const' or 'int'");
            }
            expect(";");
        }
        return voc;
    }

    // -- statements ---------------------------------------------------------

    void statement(std::vector<Cee>& cees, std::vector<Formula>& sentences) {
        if (peek_is("CEE") && peek_is(":", 1)) {
            pos_ += 2;
            cees.push_back(cee_expr());
            expect(".");
            return;
        }
        if (peek_is("FO") && peek_is(":", 1)) {
            pos_ += 2;
            sentences.push_back(formula());
            expect(".");
            return;
        }
        const std::size_t start = pos_;
        std::optional<ParseError> cee_error;
        std::size_t cee_reach = 0;
        try {
            Cee c = cee_expr();
            expect(".");
            cees.push_back(std::move(c));
            return;
        } catch (const ParseError& e) {
            cee_error = e;
            cee_reach = pos_;
        }
        pos_ = start;
        scope_.clear();
        try {
            Formula f = formula();
            expect(".");
            sentences.push_back(std::move(f));
        } catch (const ParseError&) {
            if (cee_reach > pos_) throw *cee_error;
            throw;
        }
    }

    // -- causal effect expressions -------------------------------------------

    Cee cee_expr() {
        if (peek_is("CAND") || peek_is("COR")) {
            bool is_and = peek().text == "CAND";
            ++pos_;
            Cee a = cee_unary();
            Cee b = cee_unary();
            return is_and ? cee::cand(std::move(a), std::move(b)) : cee::cor(std::move(a), std::move(b));
        }
        Cee lhs = cee_unary();
        if (peek_is("CAND")) {
            while (accept_ident("CAND")) lhs = cee::cand(std::move(lhs), cee_unary());
            if (peek_is("COR")) fail("mixing CAND and COR requires parentheses");
        } else if (peek_is("COR")) {
            while (accept_ident("COR")) lhs = cee::cor(std::move(lhs), cee_unary());
            if (peek_is("CAND")) fail("mixing CAND and COR requires parentheses");
        }
        return lhs;
    }

    Cee cee_unary() {
        if (accept_ident("IF")) {
            Formula cond = formula();
            expect_ident("THEN");
            return cee::if_then(std::move(cond), cee_expr());
        }
        if (peek_is("ALL") || peek_is("SELECT")) {
            bool is_all = peek().text == "ALL";
            ++pos_;
            auto vars = variable_list();
            ScopeGuard g(*this, vars);
            Formula qual = accept_ident("WHERE") ? formula() : fo::truth();
            expect(":");
            Cee body = cee_expr();
            return is_all ? cee::all(std::move(vars), std::move(qual), std::move(body))
                          : cee::select(std::move(vars), std::move(qual), std::move(body));
        }
        if (accept_ident("NEW")) {
            std::string var = identifier();
            ScopeGuard g(*this, {var});
            expect(":");
            return cee::make_new(var, cee_expr());
        }
        if (accept("(")) {
            Cee inner = cee_expr();
            expect(")");
            return inner;
        }
        const Token at = peek();
        if (at.kind != Tok::Ident || kKeywords.count(at.text)) fail("expected causal effect expression");
        if (in_scope(at.text)) fail("expected causal effect expression");
        ++pos_;
        auto args = argument_list();
        check_predicate(at, args.size());
        return cee::atom(at.text, std::move(args));
    }

    // -- formulas -----------------------------------------------------------

    Formula formula() {
        Formula lhs = disjunction();
        if (accept("=>")) return fo::implies(std::move(lhs), formula());
        return lhs;
    }

    Formula disjunction() {
        Formula lhs = conjunction();
        while (accept("|")) lhs = fo::disj(std::move(lhs), conjunction());
        return lhs;
    }

    Formula conjunction() {
        Formula lhs = unary();
        while (accept("&")) lhs = fo::conj(std::move(lhs), unary());
        return lhs;
    }

    Formula unary() {
        if (accept("~")) return fo::neg(unary());
        if (peek_is("!") || peek_is("?")) {
            bool universal = peek().text == "!";
            ++pos_;
            auto vars = variable_list();
            ScopeGuard g(*this, vars);
            if (accept_ident("WHERE")) {
                Formula qual = formula();
                expect(":");
                Formula body = formula();
                return universal ? fo::forall_r(std::move(vars), std::move(qual), std::move(body))
                                 : fo::exists_r(std::move(vars), std::move(qual), std::move(body));
            }
            expect(":");
            Formula body = formula();
            return universal ? fo::forall(std::move(vars), std::move(body))
                             : fo::exists(std::move(vars), std::move(body));
        }
        return primary();
    }

    Formula primary() {
        if (accept("(")) {
            Formula inner = formula();
            expect(")");
            return inner;
        }
        if (accept_ident("true")) return fo::truth();
        if (accept_ident("false")) return fo::falsity();
        const Token at = peek();
        if (at.kind == Tok::Ident && !kKeywords.count(at.text) && !in_scope(at.text) && voc_->find_predicate(at.text)) {
            ++pos_;
            auto args = argument_list();
            check_predicate(at, args.size());
            return fo::atom(at.text, std::move(args));
        }
        Term lhs = term();
        static const std::vector<std::string> ops = {"=", "~=", "<", ">", "=<", ">="};
        for (const auto& op : ops) {
            if (accept(op)) return fo::atom(op, {std::move(lhs), term()});
        }
        fail("expected comparison operator");
    }

    std::vector<Term> argument_list() {
        std::vector<Term> args;
        if (accept("(")) {
            if (!accept(")")) {
                do args.push_back(term());
                while (accept(","));
                expect(")");
            }
        }
        return args;
    }

    void check_predicate(const Token& at, std::size_t nargs) const {
        const auto* decl = voc_->find_predicate(at.text);
        if (!decl) fail_at(at, "undeclared predicate '" + at.text + "'");
        if (static_cast<std::size_t>(decl->arity) != nargs)
            fail_at(at, "arity mismatch for '" + at.text + "': expected " + std::to_string(decl->arity) + ", got " +
                            std::to_string(nargs));
    }

    Term term() {
        Term lhs = term_primary();
        while (accept("+")) lhs = Term::plus(std::move(lhs), term_primary());
        return lhs;
    }

    Term term_primary() {
        const Token at = peek();
        if (at.kind == Tok::Int || (at.kind == Tok::Punct && at.text == "-")) return Term::numeral(integer());
        if (at.kind != Tok::Ident || kKeywords.count(at.text)) fail("expected term");
        ++pos_;
        if (in_scope(at.text)) return Term::var(at.text);
        if (voc_->has_constant(at.text)) return Term::constant(at.text);
        fail_at(at, "unbound variable '" + at.text + "'");
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    const Vocabulary* voc_;
    std::vector<std::string> scope_;
};

}  // namespace

Theory parse_theory(std::string_view source) {
    Parser p(lex(source), nullptr);
    Theory t = p.theory();
    validate(t);
    return t;
}

Formula parse_formula(std::string_view source, const Vocabulary& voc) {
    Parser p(lex(source), &voc);
    return p.sentence();
}

Cee parse_cee(std::string_view source, const Vocabulary& voc) {
    Parser p(lex(source), &voc);
    return p.effect_expression();
}

}  // namespace causalog
