#include <catch_amalgamated.hpp>

#include <asptest/model.hpp>
#include <asptest/parser.hpp>

#include <random>

using namespace asptest;

TEST_CASE("herbrand universe harvests constants") {
    REQUIRE(herbrand_universe(parse_program("p(1). q(X) :- p(X).")) == std::set<Term>{integer(1)});
    REQUIRE(herbrand_universe(parse_program("p :- q. q.")) == std::set<Term>{symbol("a")});
    auto u = herbrand_universe(parse_program("node(1). node(2). node(3). col(X,red) | col(X,blue) | col(X,green) :- node(X)."));
    REQUIRE(u == std::set<Term>{integer(1), integer(2), integer(3), symbol("blue"), symbol("green"), symbol("red")});
}

TEST_CASE("safety") {
    Atom p{"p", {variable("X")}}, q{"q", {variable("X")}};
    CHECK(is_safe(Rule{{p}, {pos(q)}, {}}));
    CHECK_FALSE(is_safe(Rule{{p}, {neg(q)}, {}}));
    Rule cmp{{}, {pos(Atom{"p", {variable("X")}}), Literal{false, Comparison{variable("X"), CompareOp::ne, variable("Y")}}}, {}};
    CHECK_FALSE(is_safe(cmp));
    CHECK(unsafe_variables(cmp.head, cmp.body) == std::set<std::string>{"Y"});
}

TEST_CASE("aggregate-local variables are bound by their condition") {
    Rule r{{}, {pos(Atom{"node", {variable("X")}}),
                Literal{false, CountAggregate{{variable("Y")}, Atom{"inCycle", {variable("X"), variable("Y")}}, CompareOp::eq, integer(0)}}},
           {}};
    CHECK(is_safe(r));
    // X shared with the rule but bound nowhere outside the aggregate
    Rule bad{{}, {Literal{false, CountAggregate{{variable("Y")}, Atom{"e", {variable("X"), variable("Y")}}, CompareOp::eq, variable("X")}}}, {}};
    CHECK_FALSE(is_safe(bad));
}

TEST_CASE("fresh predicate names") {
    CHECK(fresh_predicate({"p", "q"}, "fail") == "__tk_fail_0");
    CHECK(fresh_predicate({"__tk_fail_0"}, "fail") == "__tk_fail_1");
    CHECK(fresh_predicate({}, "miss") == "__tk_miss_0");
}

TEST_CASE("fresh predicate never collides with its input") {
    std::mt19937_64 rng(11);
    for (int round = 0; round < 200; ++round) {
        std::set<std::string> taken;
        auto n = rng() % 8;
        for (std::size_t i = 0; i < n; ++i) taken.insert("__tk_x_" + std::to_string(rng() % 6));
        auto name = fresh_predicate(taken, "x");
        CHECK_FALSE(taken.count(name));
        CHECK(name.rfind("__tk_x_", 0) == 0);
    }
}

TEST_CASE("term order puts integers before symbols") {
    CHECK(compare(integer(3), CompareOp::lt, symbol("a")));
    CHECK(compare(symbol("a"), CompareOp::lt, symbol("b")));
    CHECK(compare(integer(-2), CompareOp::lt, integer(1)));
    CHECK(compare(symbol("red"), CompareOp::ne, symbol("blue")));
}

TEST_CASE("predicate signatures keep arities apart") {
    auto sigs = predicate_signatures(parse_program("p(1). p(1,2). q :- p(1)."));
    CHECK(sigs.count({"p", 1}));
    CHECK(sigs.count({"p", 2}));
    CHECK(sigs.count({"q", 0}));
}

TEST_CASE("the same local variable in two aggregates is two variables") {
    auto p = parse_program(":- #count{Y: p(Y)} = 2, #count{Y: q(Y)} = 1.");
    CHECK(is_safe(p));
}
