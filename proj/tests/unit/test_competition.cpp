#include <catch_amalgamated.hpp>

#include <asptest/competition.hpp>

using namespace asptest;

namespace {
AnswerSet set_of(const std::string& text) { return AnswerSet(parse_ground_atoms(text)); }
} // namespace

TEST_CASE("answer lines") {
    auto r = parse_competition_output("ANSWER\na. b(1,2).");
    REQUIRE(r.answer_sets.size() == 1);
    CHECK(r.answer_sets[0] == set_of("a. b(1,2)."));
    CHECK_FALSE(r.exhausted);
    CHECK_FALSE(r.incoherent);

    auto spaced = parse_competition_output("ANSWER\np(1, 2) q\n");
    CHECK(spaced.answer_sets.at(0) == set_of("p(1,2). q."));
}

TEST_CASE("incoherence markers") {
    for (auto m : {"INCOHERENT", "INCONSISTENT", "UNSATISFIABLE"}) {
        auto r = parse_competition_output(m);
        CHECK(r.incoherent);
        CHECK(r.exhausted);
        CHECK(r.answer_sets.empty());
    }
}

TEST_CASE("costs and optimum") {
    auto r = parse_competition_output("ANSWER\np.\nCOST 2@1\nOPTIMUM FOUND");
    REQUIRE(r.answer_sets.size() == 1);
    CHECK(r.costs == std::map<std::pair<std::size_t, std::int64_t>, std::int64_t>{{{0, 1}, 2}});
    CHECK(r.exhausted);
    CHECK(r.optimal);

    auto bare = parse_competition_output("ANSWER\nc.\nCOST 1 0\nANSWER\nb.\nCOST 0 1\nOPTIMUM\n", {2, 1});
    CHECK(bare.cost(0, 2) == 1);
    CHECK(bare.cost(0, 1) == 0);
    CHECK(bare.cost(1, 1) == 1);
    CHECK(bare.optimal);
}

TEST_CASE("unknown lines are ignored, UNKNOWN is not exhausted") {
    auto r = parse_competition_output("% clingo says hi\nANSWER\na.\nsome chatter\nUNKNOWN\n");
    CHECK(r.answer_sets.size() == 1);
    CHECK_FALSE(r.exhausted);
}

TEST_CASE("empty answer set") {
    auto r = parse_competition_output("ANSWER\n\n");
    REQUIRE(r.answer_sets.size() == 1);
    CHECK(r.answer_sets[0].empty());
}

TEST_CASE("malformed answer lines") {
    CHECK_THROWS_AS(parse_competition_output("ANSWER\np(,"), FormatError);
    CHECK_THROWS_AS(parse_competition_output("x\nANSWER"), FormatError);
    CHECK_THROWS_AS(parse_competition_output("COST 1@1"), FormatError);
    CHECK_THROWS_AS(parse_competition_output("ANSWER\na.\nCOST x@1"), FormatError);
}

TEST_CASE("writer output parses back") {
    SolveResult r;
    r.answer_sets = {set_of("a. p(1,x)."), set_of("b.")};
    r.costs       = {{{0, 1}, 3}, {{0, 2}, 0}, {{1, 1}, 1}, {{1, 2}, 0}};
    r.optimal     = true;
    r.exhausted   = true;
    auto text     = write_competition_output(r);
    CHECK(text == "ANSWER\na. p(1,x).\nCOST 0@2 3@1\nANSWER\nb.\nCOST 0@2 1@1\nOPTIMUM FOUND\n");
    CHECK(parse_competition_output(text) == r);

    SolveResult bad;
    bad.incoherent = true;
    bad.exhausted  = true;
    CHECK(parse_competition_output(write_competition_output(bad)) == bad);

    SolveResult partial;
    partial.answer_sets = {set_of("a.")};
    CHECK(parse_competition_output(write_competition_output(partial)) == partial);
}
