#include <doctest.h>

#include <type_traits>
#include <variant>

#include "causalog/ast.hpp"
#include "causalog/errors.hpp"
#include "causalog/parser.hpp"
#include "causalog/printer.hpp"
#include "support/corpus.hpp"
#include "support/properties.hpp"

using namespace causalog;

static_assert(std::variant_size_v<decltype(Cee::node)> == 7, "seven effect-expression forms");

namespace {

const char* kLottery = R"(
vocab {
  pred Applied/1;
  pred PassedTest/1;
  pred Lottery/0;
  pred PermRes/1;
}
theory {
  ALL p WHERE Applied(p) & PassedTest(p): PermRes(p).
  IF Lottery THEN SELECT p WHERE Applied(p): PermRes(p).
}
)";

}  // namespace

TEST_CASE("parser builds the expected tree") {
    Theory t = parse_theory(kLottery);
    REQUIRE(t.cees.size() == 2);
    CHECK(t.sentences.empty());
    const auto* all = std::get_if<Cee::All>(&t.cees[0].node);
    REQUIRE(all);
    CHECK(all->vars == std::vector<std::string>{"p"});
    CHECK(all->qual == fo::conj(fo::atom("Applied", {Term::var("p")}), fo::atom("PassedTest", {Term::var("p")})));
    const auto* head = std::get_if<Cee::Atom>(&all->body->node);
    REQUIRE(head);
    CHECK(head->pred == "PermRes");
    CHECK(head->args == std::vector<Term>{Term::var("p")});
    const auto* iff = std::get_if<Cee::If>(&t.cees[1].node);
    REQUIRE(iff);
    CHECK(iff->condition == fo::atom("Lottery"));
    CHECK(std::holds_alternative<Cee::Select>(iff->body->node));
}

TEST_CASE("occurrence ids follow the tree path") {
    Theory t = parse_theory(kLottery);
    CHECK(t.cees[0].occ == "c0");
    CHECK(t.cees[1].occ == "c1");
    const auto& iff = std::get<Cee::If>(t.cees[1].node);
    CHECK(iff.body->occ == "c1.0");
    CHECK(std::get<Cee::Select>(iff.body->node).body->occ == "c1.0.0");
}

TEST_CASE("symbol classification") {
    auto roles = classify_symbols(parse_theory(kLottery));
    CHECK(roles.at("PermRes") == SymbolRole::Endogenous);
    CHECK(roles.at("Applied") == SymbolRole::Exogenous);
    CHECK(roles.at("Lottery") == SymbolRole::Exogenous);
    CHECK(endogenous_predicates(parse_theory(kLottery)) == std::set<std::string>{"PermRes"});
}

TEST_CASE("connective precedence") {
    Theory t = parse_theory("vocab { pred A/0; pred B/0; pred C/0; }\ntheory { A COR (B CAND C). FO: A | B & C => C. }");
    const auto& c = t.cees[0];
    REQUIRE(std::holds_alternative<Cee::Or>(c.node));
    CHECK(std::holds_alternative<Cee::And>(std::get<Cee::Or>(c.node).rhs->node));
    Formula want = fo::implies(fo::disj(fo::atom("A"), fo::conj(fo::atom("B"), fo::atom("C"))), fo::atom("C"));
    CHECK(t.sentences[0] == want);
}

TEST_CASE("arithmetic terms and integer ranges") {
    Theory t = parse_theory(
        "vocab { pred OnCh/2; pred Pack/1; int 0..8; }\ntheory { ALL p, t WHERE Pack(p) & OnCh(p, t): OnCh(p, t+1). }");
    REQUIRE(t.vocabulary.ints.has_value());
    CHECK(t.vocabulary.ints->lo == 0);
    CHECK(t.vocabulary.ints->hi == 8);
    const auto& all = std::get<Cee::All>(t.cees[0].node);
    const auto& head = std::get<Cee::Atom>(all.body->node);
    CHECK(head.args[1] == Term::plus(Term::var("t"), Term::numeral(1)));
}

TEST_CASE("syntax errors carry line and column") {
    try {
        parse_theory("vocab {\n  pred P/1;\n}\ntheory {\n  P(x.\n}");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 5);
        CHECK(e.column() > 0);
    }
    CHECK_THROWS_AS(parse_theory("vocab { pred P/1 }"), ParseError);
    CHECK_THROWS_AS(parse_theory("vocab { pred P/1; } theory { P(a) }"), Error);
}

TEST_CASE("validation errors") {
    // semantic errors found while parsing are reported with their position
    auto message = [](const char* src) {
        try {
            parse_theory(src);
        } catch (const Error& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message("vocab { pred P/1; const a; } theory { Q(a). }").find("undeclared predicate 'Q'") != std::string::npos);
    CHECK(message("vocab { pred P/1; } theory { P(x). }").find("unbound variable 'x'") != std::string::npos);
    CHECK(message("vocab { pred P/1; const a; } theory { P(a, a). }").find("arity mismatch") != std::string::npos);
    CHECK(message("vocab { pred P/1; pred P/2; }").find("redeclared symbol") != std::string::npos);
    CHECK(message("vocab { pred P/1; } theory { P(x). }").rfind("1:", 0) == 0);
    CHECK_THROWS_AS(parse_theory("vocab { pred P/1; const a; } theory { ALL x WHERE true: x = a. }"), Error);
    CHECK_NOTHROW(parse_theory("vocab { pred P/1; const a; } theory { P(a). }"));
}

TEST_CASE("restricted quantifiers desugar to guarded forms") {
    Vocabulary voc = testsupport::formula_vocabulary();
    Formula f = parse_formula("! x WHERE E(x): P(x)", voc);
    Formula g = parse_formula("? x WHERE E(x): P(x)", voc);
    CHECK(desugar_restricted(f) == parse_formula("! x: E(x) => P(x)", voc));
    CHECK(desugar_restricted(g) == parse_formula("? x: E(x) & P(x)", voc));
    CHECK(free_variables(fo::atom("R", {Term::var("x"), Term::constant("c0")})) == std::set<std::string>{"x"});
}

TEST_CASE("every corpus theory round-trips through the printer") {
    for (const char* name : {"double_select", "empty", "foal", "gear", "jboss", "lottery", "mail", "mail_two",
                             "mail_wrong", "negation_cycle", "or_gear", "president", "scale", "two_new"}) {
        CAPTURE(name);
        Theory t = parse_theory(testsupport::read_text(testsupport::corpus_path(std::string(name) + ".foc")));
        std::string printed = print_theory(t);
        Theory again = parse_theory(printed);
        CHECK(again == t);
        CHECK(print_theory(again) == printed);
    }
}

TEST_CASE("random formulas round-trip") {
    auto r = testsupport::check_formula_roundtrip(101, 300);
    INFO(r.first_failure);
    CHECK(r.ok());
}
