#include <doctest.h>

#include <random>

#include "causalog/errors.hpp"
#include "causalog/parser.hpp"
#include "causalog/structure.hpp"
#include "support/corpus.hpp"

using namespace causalog;

namespace {

Theory lottery() { return parse_theory(testsupport::read_text(testsupport::corpus_path("lottery.foc"))); }

DomainElement N(const char* s) { return DomainElement::named(s); }
DomainElement C(int k) { return DomainElement::created(k, "t"); }

}  // namespace

TEST_CASE("loading an exogenous structure") {
    Theory t = lottery();
    Structure s = load_structure(testsupport::read_text(testsupport::corpus_path("lottery.json")), t.vocabulary,
                                 endogenous_predicates(t));
    CHECK(s.domain().size() == 3);
    CHECK(s.holds("Applied", {N("b")}));
    CHECK_FALSE(s.holds("PassedTest", {N("b")}));
    CHECK(s.holds("Lottery", {}));
}

TEST_CASE("structure validation") {
    Theory t = lottery();
    auto endo = endogenous_predicates(t);
    CHECK_THROWS_AS(load_structure(R"({"domain":["a"],"Nope":[]})", t.vocabulary, endo), ValidationError);
    CHECK_THROWS_AS(load_structure(R"({"domain":["a"],"PermRes":[["a"]]})", t.vocabulary, endo), ValidationError);
    CHECK_THROWS_AS(load_structure(R"({"domain":["a"],"Applied":[["z"]]})", t.vocabulary, endo), ValidationError);
    CHECK_THROWS_AS(load_structure(R"({"domain":["a"],"Applied":[["a","a"]]})", t.vocabulary, endo), ValidationError);
    CHECK_THROWS_AS(load_structure(R"({"domain":["a"],"Lottery":3})", t.vocabulary, endo), ValidationError);
    CHECK_THROWS_AS(load_structure("[1,2", t.vocabulary, endo), ValidationError);
}

TEST_CASE("integers are domain elements") {
    Theory t = parse_theory(testsupport::read_text(testsupport::corpus_path("mail.foc")));
    Structure s = load_structure(testsupport::read_text(testsupport::corpus_path("mail.json")), t.vocabulary,
                                 endogenous_predicates(t));
    CHECK(s.domain().size() == 10);
    CHECK(s.contains(DomainElement::integer(8)));
    CHECK_FALSE(s.contains(DomainElement::integer(9)));
}

TEST_CASE("default extension makes endogenous relations empty") {
    Theory t = lottery();
    Structure exo = load_structure(testsupport::read_text(testsupport::corpus_path("lottery.json")), t.vocabulary,
                                   endogenous_predicates(t));
    Structure d = default_extension(exo, t.vocabulary, endogenous_predicates(t));
    CHECK(d.relations().count("PermRes") == 1);
    CHECK(d.relations().at("PermRes").empty());
    CHECK(d.holds("Applied", {N("a")}));
}

TEST_CASE("json round-trip including created elements") {
    Theory t = parse_theory(testsupport::read_text(testsupport::corpus_path("president.foc")));
    Structure s;
    s.add_element(N("be"));
    s.add_element(C(1));
    s.add_fact("Country", {N("be")});
    s.add_fact("President", {C(1)});
    s.add_fact("PresidentOf", {N("be"), C(1)});
    Structure back = load_model(structure_to_json(s, t.vocabulary), t.vocabulary);
    CHECK(testsupport::brute_equal_modulo_created(s, back));
    CHECK(back.created().size() == 1);
}

TEST_CASE("three-valued overlay") {
    Structure base;
    base.add_element(N("a"));
    PartialStructure p(base, {"P"});
    CHECK(p.value({"P", {N("a")}}) == TruthValue::False);
    p.set({"P", {N("a")}}, TruthValue::Unknown);
    CHECK(p.value({"P", {N("a")}}) == TruthValue::Unknown);
    CHECK_FALSE(p.is_total());
    PartialStructure q = p;
    q.set({"P", {N("a")}}, TruthValue::True);
    CHECK(p.less_precise_than(q));
    CHECK_FALSE(q.less_precise_than(p));
    CHECK(q.is_total());
    CHECK(q.project().holds("P", {N("a")}));
    p.set_default(TruthValue::Unknown);
    CHECK(p.value({"P", {N("b")}}) == TruthValue::Unknown);
}

TEST_CASE("canonical keys identify structures up to created elements") {
    Structure a, b;
    for (auto* s : {&a, &b}) s->add_element(N("m"));
    a.add_element(C(1));
    a.add_element(C(2));
    a.add_fact("Q", {C(1)});
    a.add_fact("R", {N("m"), C(2)});
    b.add_element(C(7));
    b.add_element(C(3));
    b.add_fact("Q", {C(7)});
    b.add_fact("R", {N("m"), C(3)});
    CHECK(canonicalize(a).second == canonicalize(b).second);
    CHECK(equal_modulo_created(a, b));
    b.add_fact("Q", {C(3)});
    CHECK_FALSE(equal_modulo_created(a, b));
    CHECK(equal_modulo_created(a, b, {"Q"}));
}

TEST_CASE("equal_modulo_created agrees with exhaustive bijection search") {
    std::mt19937_64 rng(7);
    auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    auto random_structure = [&](int created) {
        Structure s;
        std::vector<DomainElement> dom = {N("a")};
        s.add_element(N("a"));
        for (int i = 1; i <= created; ++i) {
            dom.push_back(DomainElement::created(uni(1, 50), "t" + std::to_string(i)));
            s.add_element(dom.back());
        }
        s.declare("Q");
        s.declare("R");
        for (const auto& x : dom) {
            if (uni(0, 1)) s.add_fact("Q", {x});
            for (const auto& y : dom)
                if (uni(0, 3) == 0) s.add_fact("R", {x, y});
        }
        return s;
    };
    int equal = 0;
    for (int i = 0; i < 300; ++i) {
        Structure a = random_structure(uni(0, 3));
        Structure b;
        if (i % 2 == 0) {
            // a renamed copy, sometimes perturbed
            std::map<DomainElement, DomainElement> rn;
            int k = 100;
            for (const auto& e : a.created()) rn[e] = DomainElement::created(k--, "u");
            b = a.renamed(rn);
            if (uni(0, 2) == 0) b.add_fact("Q", {N("a")});
        } else {
            b = random_structure(uni(0, 3));
        }
        bool want = testsupport::brute_equal_modulo_created(a, b);
        CAPTURE(i);
        CHECK(equal_modulo_created(a, b) == want);
        CHECK((canonicalize(a).second == canonicalize(b).second) == want);
        equal += want;
    }
    CHECK(equal > 50);
}
