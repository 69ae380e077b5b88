#include <catch_amalgamated.hpp>

#include "fixtures.hpp"

#include <asptest/oracle.hpp>
#include <asptest/parser.hpp>

using namespace asptest;

namespace {

Atom atom(const std::string& text) { return parse_ground_atoms(text).at(0); }

AnswerSet set_of(const std::string& text) { return AnswerSet(parse_ground_atoms(text)); }

std::vector<AnswerSet> answer_sets(const std::string& program) {
    return normalized(enumerate(ground(parse_program(program))).answer_sets);
}

std::string rules_text(const GroundProgram& g) {
    std::string out;
    for (const auto& r : g.to_program().rules) out += to_string(r) + "\n";
    return out;
}

Program coloring() {
    auto u = parse_unit("graph_coloring.lp", fixtures::read("graph_coloring.lp"));
    return u.program;
}

} // namespace

TEST_CASE("grounding over the universe") {
    auto g = ground(parse_program("q(X) :- p(X). p(1). p(2)."), GroundingMode::naive);
    auto text = rules_text(g);
    CHECK(text.find("q(1) :- p(1).") != std::string::npos);
    CHECK(text.find("q(2) :- p(2).") != std::string::npos);

    Program p;
    p.rules.push_back(parse_program(":- p(X,Y), X <> Y.").rules.at(0));
    p.rules.push_back(parse_program("u(1). u(2).").rules.at(0));
    p.rules.push_back(parse_program("u(1). u(2).").rules.at(1));
    auto h = ground(p, GroundingMode::naive);
    std::vector<std::string> constraints;
    for (const auto& r : h.to_program().rules)
        if (r.head.empty()) constraints.push_back(to_string(r));
    CHECK(constraints == std::vector<std::string>{":- p(1,2).", ":- p(2,1)."});
}

TEST_CASE("simplified grounding of graph colouring") {
    auto g = ground(coloring());
    std::size_t disjunctive = 0, constraints = 0;
    for (const auto& r : g.rules) {
        if (r.head.size() == 3) ++disjunctive;
        if (r.head.empty()) ++constraints;
    }
    CHECK(disjunctive == 3);
    CHECK(constraints == 9);
    CHECK(g.open.size() == 9);
}

TEST_CASE("reduct") {
    auto g = ground(parse_program("a :- not b. b :- not a."));
    auto r = reduct(g, set_of("a."));
    REQUIRE(r.rules.size() == 1);
    CHECK(to_string(r.to_program().rules[0]) == "a.");
    CHECK(reduct(g, set_of("a. b.")).rules.empty());

    auto pos = ground(parse_program("a. b :- a. c | d :- b."));
    CHECK(reduct(pos, set_of("a. b. c.")).rules == pos.rules);
}

TEST_CASE("answer-set checking") {
    auto g = ground(parse_program("a | b."));
    CHECK(is_answer_set(g, set_of("a.")));
    CHECK_FALSE(is_answer_set(g, set_of("a. b.")));
    CHECK_FALSE(is_answer_set(g, AnswerSet{}));

    auto col = ground(coloring());
    auto facts = "node(1). node(2). node(3). edge(1,2). edge(1,3). edge(2,3). ";
    CHECK(is_answer_set(col, set_of(std::string(facts) + "col(1,red). col(2,blue). col(3,green).")));
    CHECK_FALSE(is_answer_set(col, set_of(std::string(facts) + "col(1,red). col(2,red). col(3,green).")));
}

TEST_CASE("hamiltonian answer set from the buggy encoding") {
    auto u = parse_unit("hamiltonian_buggy.lp", fixtures::read("hamiltonian_buggy.lp"));
    Program p = u.program;
    p.append(parse_program(u.suite.tests[0].input));
    auto g = ground(p);
    std::string input = "node(1). node(2). node(3). node(4). arc(1,2). arc(1,4). arc(2,4). arc(3,1). arc(4,3). start(1). ";
    CHECK(is_answer_set(g, set_of(input + "inCycle(1,2). inCycle(2,4). inCycle(4,3). outCycle(1,4). outCycle(3,1). "
                                          "reached(1). reached(2). reached(4). reached(3).")));
    auto all = enumerate(g);
    CHECK(all.answer_sets.size() == 2); // the real cycle and the path
}

TEST_CASE("enumeration") {
    CHECK(answer_sets("a | b.") == std::vector<AnswerSet>{set_of("a."), set_of("b.")});
    auto r = enumerate(ground(coloring()));
    CHECK(r.answer_sets.size() == 6);
    CHECK(r.exhausted);
    CHECK_FALSE(r.incoherent);

    auto bad = enumerate(ground(parse_program("a. :- a.")));
    CHECK(bad.incoherent);
    CHECK(bad.exhausted);
    CHECK(bad.answer_sets.empty());

    CHECK(answer_sets("a :- not b. b :- not a.").size() == 2);
    CHECK(answer_sets("a :- not a.").empty());
    CHECK(answer_sets("a :- b. b :- a.") == std::vector<AnswerSet>{AnswerSet{}});
    // disjunction with a loop: {a,b} is the only answer set
    CHECK(answer_sets("a | b. a :- b. b :- a.") == std::vector<AnswerSet>{set_of("a. b.")});
}

TEST_CASE("enumeration cap yields a prefix") {
    auto g = ground(coloring());
    auto full = enumerate(g);
    for (std::size_t k = 1; k <= 7; ++k) {
        auto part = enumerate(g, k);
        REQUIRE(part.answer_sets.size() == std::min<std::size_t>(k, 6));
        CHECK(std::equal(part.answer_sets.begin(), part.answer_sets.end(), full.answer_sets.begin()));
        CHECK(part.exhausted == (k > 6));
    }
}

TEST_CASE("answer sets form an antichain") {
    for (auto text : {"a | b | c. a :- b.", "a | b. c | d :- a.", "p | q. q | r. p :- r."}) {
        auto sets = answer_sets(text);
        for (const auto& x : sets)
            for (const auto& y : sets) CHECK_FALSE(x.strictly_within(y));
    }
}

TEST_CASE("aggregates") {
    auto sets = answer_sets("p(1) | q(1). p(2) | q(2). :- #count{X:p(X)} = 1.");
    CHECK(sets == std::vector<AnswerSet>{set_of("p(1). p(2)."), set_of("q(1). q(2).")});
    auto headed = answer_sets("e(1). e(2). s(1) | s(2). none :- #count{X:s(X)} = 0. two :- #count{X:e(X)} >= 2.");
    REQUIRE(headed.size() == 2);
    for (const auto& m : headed) {
        CHECK(m.contains(atom("two")));
        CHECK_FALSE(m.contains(atom("none")));
    }
    CHECK_THROWS_AS(ground(parse_program("p(1). q(X) :- p(X), #count{Y:q(Y)} = 0.")), UnsupportedAggregate);
}

TEST_CASE("weak constraints and penalties") {
    auto u = parse_unit("weak_coloring.lp", fixtures::read("weak_coloring.lp"));
    auto g = ground(u.program);
    std::string facts = "node(1). node(2). node(3). edge(1,2). edge(1,3). edge(2,3). preferablyRed(2). ";
    CHECK(penalty(g, set_of(facts + "col(1,green). col(2,red). col(3,blue)."), 1) == 0);
    CHECK(penalty(g, set_of(facts + "col(1,red). col(2,blue). col(3,green)."), 1) == 1);
    CHECK(penalty(g, set_of(facts + "col(1,red). col(2,blue). col(3,green)."), 0) == 0);

    auto best = optimal_answer_sets(g);
    CHECK(best.optimal);
    REQUIRE(best.answer_sets.size() == 2);
    for (std::size_t i = 0; i < best.answer_sets.size(); ++i) {
        CHECK(best.answer_sets[i].contains(atom("col(2,red)")));
        CHECK(best.cost(i, 1) == 0);
    }
    CHECK(std::find(best.answer_sets.begin(), best.answer_sets.end(),
                    set_of(facts + "col(1,green). col(2,red). col(3,blue).")) != best.answer_sets.end());

    auto plain = optimal_answer_sets(ground(coloring()));
    CHECK(plain.answer_sets.size() == 6);
}

TEST_CASE("dominance over a single level") {
    auto g = ground(parse_program("a | b | c. :~ a. [2@1] :~ b. [1@1] :~ c. [1@1]"));
    auto best = optimal_answer_sets(g);
    CHECK(normalized(best.answer_sets) == std::vector<AnswerSet>{set_of("b."), set_of("c.")});
}

TEST_CASE("higher levels dominate") {
    auto g = ground(parse_program("a | b. :~ a. [1@2] :~ b. [5@1]"));
    auto best = optimal_answer_sets(g);
    CHECK(best.answer_sets == std::vector<AnswerSet>{set_of("b.")});
    CHECK(best.cost(0, 2) == 0);
    CHECK(best.cost(0, 1) == 5);
}

TEST_CASE("capacity") {
    std::string wide;
    for (int i = 0; i < 23; ++i) wide += "p(" + std::to_string(i) + ") | q(" + std::to_string(i) + ").\n";
    CHECK_THROWS_AS(ground(parse_program(wide)), CapacityExceeded);
}
