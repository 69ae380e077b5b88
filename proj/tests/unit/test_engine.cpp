#include <catch_amalgamated.hpp>

#include "fixtures.hpp"

#include <asptest/engine.hpp>
#include <asptest/report.hpp>

using namespace asptest;

namespace {

SourceUnit load(const std::string& name) { return parse_unit(fixtures::path(name), fixtures::read(name)); }

Atom atom(const std::string& text) { return parse_ground_atoms(text).at(0); }

const InternalBackend internal;

AssertionResult check(const std::string& program, const std::string& assertion) {
    auto p = parse_program(program);
    auto a = parse_assertion_list("{" + assertion + "}").at(0);
    return check_assertion(p, a, {}, internal);
}

} // namespace

TEST_CASE("scope resolution for graph colouring") {
    auto u    = load("graph_coloring.lp");
    auto spec = u.suite.tests.at(0);
    auto p    = resolve_scope(u.suite, spec);
    CHECK(p.rules.size() == 8);
    CHECK(p.rules[0] == std::get<Rule>(u.suite.named_rules.at("r1").statement));

    auto direct  = spec;
    direct.scope = {"r1", "r2"};
    CHECK(resolve_scope(u.suite, direct) == p);

    auto twice  = spec;
    twice.scope = {"ToTest", "r2"};
    CHECK(resolve_scope(u.suite, twice) == p);

    auto missing  = spec;
    missing.scope = {"nope"};
    CHECK_THROWS_AS(resolve_scope(u.suite, missing), DanglingReference);
}

TEST_CASE("scope from program files and input files") {
    std::map<std::string, std::string> files = {
        {"dir/lib.lp", "%** @rule(name = \"g\") **%\na | b.\n"},
        {"dir/facts.lp", "c.\n%** @test(name = \"ignored\", scope = {\"x\"}, assert = {@noAnswerSet}) **%\n"},
    };
    ScopeContext ctx;
    ctx.base_dir = "dir";
    ctx.loader   = [&](const std::string& p) {
        auto it = files.find(p);
        if (it == files.end()) throw IoFailure("cannot read '" + p + "'");
        return it->second;
    };
    TestSpec spec;
    spec.name          = "t";
    spec.scope         = {"g"};
    spec.program_files = {"lib.lp"};
    spec.input_files   = {"facts.lp"};
    auto p = resolve_scope(TestSuite{}, spec, ctx);
    CHECK(serialize_program(p) == "a | b.\nc.\n");

    spec.input_files = {"absent.lp"};
    CHECK_THROWS_AS(resolve_scope(TestSuite{}, spec, ctx), IoFailure);
}

TEST_CASE("tester program encodings") {
    auto p = parse_program("a | b.");
    auto t = build_tester(p, TrueInAtLeast{1, {atom("a")}}, {});
    CHECK(t.text == "a | b.\n:- not a.\n");
    CHECK(t.model_cap == 1u);

    auto f = build_tester(parse_program("p | q."), ConstraintForAll{parse_constraint(":- p, q.")}, {});
    CHECK(f.text == "p | q.\n__tk_fail_0 :- p, q.\n:- not __tk_fail_0.\n");
    CHECK(f.model_cap == 1u);
    CHECK(f.verdict.kind == VerdictKind::incoherent);

    auto all = build_tester(p, TrueInAll{{atom("a"), atom("b")}}, {});
    CHECK(all.text == "a | b.\n__tk_miss_0 :- not a.\n__tk_miss_0 :- not b.\n:- not __tk_miss_0.\n");

    auto taken = build_tester(p, TrueInAll{{atom("a")}}, {"__tk_miss_0"});
    CHECK(taken.text.find("__tk_miss_1") != std::string::npos);

    CHECK(build_tester(p, TrueInAtMost{2, {atom("a")}}, {}).model_cap == 3u);
    CHECK(build_tester(p, TrueInExactly{0, {atom("a")}}, {}).model_cap == 1u);
    CHECK(build_tester(p, ConstraintInAtLeast{4, parse_constraint(":- a.")}, {}).model_cap == 4u);
    CHECK_FALSE(build_tester(p, BestModelCost{1, 1}, {}).model_cap.has_value());
    CHECK(build_tester(p, NoAnswerSet{}, {}).text == "a | b.\n");
    CHECK_THROWS_AS(build_tester(p, TrueInAtLeast{0, {atom("a")}}, {}), ValidationError);
}

TEST_CASE("verdict rules") {
    auto tp = build_tester(parse_program("a | b."), TrueInAtMost{1, {atom("a")}}, {});
    SolveResult r;
    r.answer_sets = {AnswerSet({atom("a")})};
    CHECK(evaluate(tp, r).verdict == Verdict::inconclusive);
    r.exhausted = true;
    CHECK(evaluate(tp, r).verdict == Verdict::pass);
    r.answer_sets.push_back(AnswerSet({atom("a"), atom("b")}));
    r.exhausted = false;
    auto failed = evaluate(tp, r);
    CHECK(failed.verdict == Verdict::fail);
    CHECK(failed.witness == AnswerSet({atom("a"), atom("b")}));

    auto ge = build_tester(parse_program("a | b."), TrueInAtLeast{2, {atom("a")}}, {});
    SolveResult one;
    one.answer_sets = {AnswerSet({atom("a")})};
    CHECK(evaluate(ge, one).verdict == Verdict::inconclusive);
    one.exhausted = true;
    CHECK(evaluate(ge, one).verdict == Verdict::fail);

    auto inc = build_tester(parse_program("a."), NoAnswerSet{}, {});
    SolveResult nothing;
    CHECK(evaluate(inc, nothing).verdict == Verdict::inconclusive);
}

TEST_CASE("simple assertions on the oracle") {
    auto no = check("a.", "@noAnswerSet");
    CHECK(no.verdict == Verdict::fail);
    CHECK(no.witness == AnswerSet({atom("a")}));
    CHECK(check("a. :- a.", "@noAnswerSet").verdict == Verdict::pass);
    CHECK(check("a | b. c.", "@trueInAll(atoms = \"c.\")").verdict == Verdict::pass);
    CHECK(check("a | b. c.", "@trueInAll(atoms = \"a. c.\")").verdict == Verdict::fail);
    CHECK(check("a | b. c.", "@trueInAtLeast(number = 2, atoms = \"c.\")").verdict == Verdict::pass);
    CHECK(check("a | b.", "@trueInExactly(number = 0, atoms = \"a. b.\")").verdict == Verdict::pass);
    CHECK(check("a | b.", "@constraintInExactly(number = 1, constraint = \":- a.\")").verdict == Verdict::pass);
    CHECK(check("a | b.", "@constraintForAll(constraint = \":- a, b.\")").verdict == Verdict::pass);
    CHECK(check("a.", "@trueInAtLeast(number = 0, atoms = \"a.\")").verdict == Verdict::error);
    CHECK(check("a.", "@bestModelCost(cost = 0, level = 3)").verdict == Verdict::pass);
}

TEST_CASE("graph colouring test passes") {
    auto u = load("graph_coloring.lp");
    auto r = run_suite(u, internal);
    REQUIRE(r.tests.size() == 1);
    CHECK(r.tests[0].name == "checkColors");
    CHECK(r.tests[0].verdict == Verdict::pass);
    CHECK(r.assertion_counts().pass == 2);
}

TEST_CASE("buggy hamiltonian cycle test fails with the path as witness") {
    auto u = load("hamiltonian_buggy.lp");
    auto r = run_suite(u, internal);
    REQUIRE(r.tests.size() == 1);
    REQUIRE(r.tests[0].assertions.size() == 1);
    const auto& a = r.tests[0].assertions[0];
    CHECK(a.verdict == Verdict::fail);
    REQUIRE(a.witness);
    auto cycle = a.witness->filter([](const Atom& x) { return x.predicate == "inCycle" || x.predicate == "outCycle"; });
    CHECK(cycle == AnswerSet(parse_ground_atoms("inCycle(1,2). inCycle(2,4). inCycle(4,3). outCycle(1,4). outCycle(3,1).")));
    for (const auto& x : a.witness->atoms()) CHECK(x.predicate.rfind("__tk_", 0) != 0);
}

TEST_CASE("best model cost") {
    auto u = load("weak_coloring.lp");
    auto r = run_suite(u, internal);
    REQUIRE(r.tests.size() == 2);
    CHECK(r.tests[0].verdict == Verdict::pass);
    CHECK(r.tests[1].verdict == Verdict::fail);
}

TEST_CASE("empty suite") {
    auto r = run_suite(parse_unit("e.lp", "a."), internal);
    CHECK(r.tests.empty());
    CHECK(r.verdict() == Verdict::pass);
}

TEST_CASE("one failing assertion does not stop its siblings") {
    auto u = parse_unit("s.lp", "%** @rule(name = \"r\") **%\na | b.\n"
                                "%** @test(name = \"t\", scope = {\"r\"}, assert = {@trueInAtLeast(number = 0, atoms = \"a.\"), "
                                "@trueInAtLeast(number = 1, atoms = \"a.\")}) **%\n");
    auto r = run_suite(u, internal);
    REQUIRE(r.tests[0].assertions.size() == 2);
    CHECK(r.tests[0].assertions[0].verdict == Verdict::error);
    CHECK(r.tests[0].assertions[1].verdict == Verdict::pass);
    CHECK(r.tests[0].verdict == Verdict::error);
}

TEST_CASE("dangling scope becomes an error verdict") {
    auto u = parse_unit("d.lp", "%** @test(name = \"t\", scope = {\"ghost\"}, assert = {@noAnswerSet}) **%\n");
    auto r = run_suite(u, internal);
    CHECK(r.tests[0].assertions[0].verdict == Verdict::error);
    CHECK(r.tests[0].assertions[0].diagnostics.find("ghost") != std::string::npos);
}

TEST_CASE("parallel runs keep declaration order") {
    std::string text = "%** @rule(name = \"r\") **%\na | b.\n";
    for (int i = 0; i < 12; ++i)
        text += "%** @test(name = \"t" + std::to_string(i) + "\", scope = {\"r\"}, assert = {@trueInAtLeast(number = " +
                std::to_string(i % 3 + 1) + ", atoms = \"a.\")}) **%\n";
    auto u = parse_unit("p.lp", text);
    auto serial   = run_suite(u, internal, 1);
    auto parallel = run_suite(u, internal, 4);
    REQUIRE(parallel.tests.size() == 12);
    for (std::size_t i = 0; i < 12; ++i) {
        CHECK(parallel.tests[i].name == "t" + std::to_string(i));
        CHECK(parallel.tests[i].verdict == serial.tests[i].verdict);
    }
    CHECK(serial.tests[0].verdict == Verdict::pass);
    CHECK(serial.tests[1].verdict == Verdict::fail);
}

TEST_CASE("json report") {
    auto u = load("hamiltonian_buggy.lp");
    auto j = to_json(run_suite(u, internal), "hamiltonian_buggy.lp", "internal");
    CHECK(j["verdict"] == "fail");
    CHECK(j["counts"]["tests"]["fail"] == 1);
    const auto& a = j["tests"][0]["assertions"][0];
    CHECK(a["kind"] == "constraintForAll");
    CHECK(a["witness"].is_array());
    CHECK(a["requested_models"] == 1);
    CHECK(a["executed_code"].get<std::string>().find("__tk_fail_0 :- node(X), #count{Y:inCycle(X,Y)}=0.") != std::string::npos);
}
