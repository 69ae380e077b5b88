#include <catch_amalgamated.hpp>

#include "fixtures.hpp"

#include <asptest/parser.hpp>
#include <asptest/serialize.hpp>

using namespace asptest;

namespace {

std::vector<ParseError> errors_of(const std::string& text) {
    try {
        parse_unit("t.lp", text);
    } catch (const ParseFailure& f) {
        return f.errors();
    }
    return {};
}

} // namespace

TEST_CASE("graph colouring fixture") {
    auto u = parse_unit("graph_coloring.lp", fixtures::read("graph_coloring.lp"));
    REQUIRE(u.suite.blocks.count("ToTest"));
    REQUIRE(u.suite.named_rules.size() == 2);
    CHECK(u.suite.rule_order == std::vector<std::string>{"r1", "r2"});
    CHECK(u.suite.anonymous_rules.size() == 6);
    REQUIRE(u.suite.tests.size() == 1);
    const auto& t = u.suite.tests[0];
    CHECK(t.name == "checkColors");
    CHECK(t.scope == std::vector<std::string>{"ToTest"});
    CHECK(t.origin.line == 13);
    REQUIRE(t.asserts.size() == 2);
    auto a0 = std::get<TrueInExactly>(t.asserts[0]);
    CHECK(a0.number == 2);
    CHECK(a0.atoms == std::vector<Atom>{Atom{"col", {integer(1), symbol("red")}}});
    auto a1 = std::get<TrueInExactly>(t.asserts[1]);
    CHECK(a1.number == 1);
    CHECK(a1.atoms.size() == 2);

    const auto& r1 = std::get<Rule>(u.suite.named_rules.at("r1").statement);
    CHECK(r1.origin.line == 8);
    CHECK(r1.head.size() == 3);
    CHECK(std::get<Rule>(u.suite.named_rules.at("r2").statement).origin.line == 11);
}

TEST_CASE("hamiltonian fixture") {
    auto u = parse_unit("hamiltonian_buggy.lp", fixtures::read("hamiltonian_buggy.lp"));
    CHECK(u.suite.blocks.count("hamCycle"));
    CHECK(u.suite.named_rules.size() == 6);
    REQUIRE(u.suite.tests.size() == 1);
    const auto& t = u.suite.tests[0];
    REQUIRE(t.asserts.size() == 1);
    const auto& c = std::get<ConstraintForAll>(t.asserts[0]).constraint;
    CHECK(c.head.empty());
    REQUIRE(c.body.size() == 2);
    CHECK(c.body[1].aggregate() != nullptr);
    CHECK(parse_program(t.input).rules.size() == 10);
}

TEST_CASE("empty text") {
    auto u = parse_unit("e.lp", "");
    CHECK(u.program.empty());
    CHECK(u.suite.empty());
}

TEST_CASE("assertion lists") {
    auto as = parse_assertion_list(R"({ @trueInExactly(number = 2, atoms = "col(1, red)."), @noAnswerSet })");
    REQUIRE(as.size() == 2);
    CHECK(std::get<TrueInExactly>(as[0]).number == 2);
    CHECK(std::holds_alternative<NoAnswerSet>(as[1]));

    auto c = parse_assertion_list(R"({ @constraintForAll(constraint=":-node(X), #count{Y:inCycle(X,Y)}=0.") })");
    REQUIRE(c.size() == 1);
    CHECK(to_string(std::get<ConstraintForAll>(c[0]).constraint) == ":- node(X), #count{Y:inCycle(X,Y)}=0.");

    CHECK_THROWS_AS(parse_assertion_list(R"({ @trueInSome(atoms = "a.") })"), ParseFailure);
    CHECK_THROWS_AS(parse_assertion_list(R"({ @trueInAll(atoms = "p(X).") })"), ParseFailure);
    CHECK_THROWS_AS(parse_assertion_list(R"({ @trueInAtMost(atoms = "a.") })"), ParseFailure);
    CHECK_THROWS_AS(parse_assertion_list(R"({ @bestModelCost(cost = 1) })"), ParseFailure);
}

TEST_CASE("assertion text round-trips") {
    const char* text = R"({ @noAnswerSet, @trueInAll(atoms = "a. b(1,x)."), @trueInAtLeast(number = 3, atoms = "a."),
        @constraintInExactly(number = 0, constraint = ":- p(X), not q(X)."), @bestModelCost(cost = 2, level = 1) })";
    auto as = parse_assertion_list(text);
    std::string again = "{";
    for (std::size_t i = 0; i < as.size(); ++i) again += (i ? ", " : "") + to_string(as[i]);
    again += "}";
    CHECK(parse_assertion_list(again) == as);
}

TEST_CASE("serializer output") {
    Program p;
    p.rules.push_back(Rule{{Atom{"a", {}}, Atom{"b", {}}}, {}, {}});
    CHECK(serialize_program(p) == "a | b.\n");
    auto w = parse_program(":~ not col(X,red), preferablyRed(X). [1@1]");
    REQUIRE(w.weak_constraints.size() == 1);
    CHECK(to_string(w.weak_constraints[0]) == ":~ not col(X,red), preferablyRed(X). [1@1]");
}

TEST_CASE("round trip of fixture programs") {
    for (auto name : {"graph_coloring.lp", "hamiltonian_buggy.lp", "weak_coloring.lp"}) {
        auto p = parse_unit(name, fixtures::read(name)).program;
        CHECK(parse_program(serialize_program(p)) == p);
    }
}

TEST_CASE("stripping annotations leaves the program unchanged") {
    for (auto name : {"graph_coloring.lp", "hamiltonian_buggy.lp", "weak_coloring.lp"}) {
        auto text = fixtures::read(name);
        CHECK(parse_program(strip_annotations(text)) == parse_unit(name, text).program);
    }
}

TEST_CASE("error positions") {
    auto e = errors_of("p(X) :- not q(X).");
    REQUIRE(e.size() == 1);
    CHECK(e[0].kind == ParseErrorKind::safety);
    CHECK(e[0].line == 1);

    e = errors_of("a.\nb :- .\nc.");
    REQUIRE_FALSE(e.empty());
    CHECK(e[0].kind == ParseErrorKind::syntactic);
    CHECK(e[0].line == 2);

    e = errors_of("a.\n  $b.");
    REQUIRE_FALSE(e.empty());
    CHECK(e[0].kind == ParseErrorKind::lexical);
    CHECK(e[0].line == 2);
    CHECK(e[0].column == 3);
}

TEST_CASE("errors inside embedded strings point into the file") {
    std::string text = "a.\n%** @test(name = \"t\", scope = {\"x\"},\n   input = \"p(1). q(\", assert = {@noAnswerSet}) **%\n";
    auto e = errors_of(text);
    REQUIRE_FALSE(e.empty());
    CHECK(e[0].line == 3);
    CHECK(e[0].column > 12);
}

TEST_CASE("annotation errors") {
    CHECK(errors_of("%** @rule(name = \"r\") **%\n")[0].kind == ParseErrorKind::annotation);
    CHECK(errors_of("%** @rule(name = \"r\") **%\n%** @block(name = \"b\") **%\na.")[0].kind == ParseErrorKind::annotation);
    CHECK(errors_of("%** @test(name = \"t\", scope = {\"a\"}, colour = \"x\") **%")[0].kind == ParseErrorKind::annotation);
    CHECK(errors_of("%** @test(name = \"t\", scope = {}) **%")[0].kind == ParseErrorKind::annotation);
    auto dup = errors_of("%** @rule(name = \"r\") **%\na.\n%** @rule(name = \"r\") **%\nb.");
    REQUIRE(dup.size() == 1);
    CHECK(dup[0].kind == ParseErrorKind::duplicate_name);
    CHECK(dup[0].line == 3);
}

TEST_CASE("conflicting block membership") {
    auto e = errors_of("%** @block(name = \"A\") **%\n%** @block(name = \"B\", rules = {\"r\"}) **%\n"
                       "%** @rule(name = \"r\", block = \"A\") **%\na.");
    REQUIRE_FALSE(e.empty());
    CHECK(e[0].kind == ParseErrorKind::duplicate_name);
}

TEST_CASE("escaped quotes in attributes") {
    auto u = parse_unit("q.lp", "%** @test(name = \"say \\\"hi\\\"\", scope = {\"r\"}, assert = {@noAnswerSet}) **%");
    CHECK(u.suite.tests.at(0).name == "say \"hi\"");
}

TEST_CASE("plain comments are skipped") {
    auto u = parse_unit("c.lp", "% line\na. %* block\n spanning *% b.\n");
    CHECK(u.program.rules.size() == 2);
}

TEST_CASE("ground atom lists from solver output") {
    auto atoms = parse_ground_atoms("a. b(1, 2) c(x,-3)");
    REQUIRE(atoms.size() == 3);
    CHECK(atoms[1] == Atom{"b", {integer(1), integer(2)}});
}
