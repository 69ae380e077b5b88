#include <catch_amalgamated.hpp>

#include "property.hpp"

TEST_CASE("brute force agrees with itself on known programs") {
    randprog::BProgram p;
    // a | b.  :- a.   -> {b}
    p.rules.push_back({{{"a", 0}, {"b", 0}}, {}});
    p.rules.push_back({{}, {{randprog::BLit::Kind::atom, false, {"a", 0}, randprog::Op::eq, 0}}});
    auto as = randprog::answer_sets(p);
    REQUIRE(as.size() == 1);
    CHECK(as[0] == (1u << randprog::atom_index("b", 0)));

    // c :- not d.  d :- not c.  -> two answer sets
    randprog::BProgram q;
    q.rules.push_back({{{"c", 0}}, {{randprog::BLit::Kind::atom, true, {"d", 0}, randprog::Op::eq, 0}}});
    q.rules.push_back({{{"d", 0}}, {{randprog::BLit::Kind::atom, true, {"c", 0}, randprog::Op::eq, 0}}});
    CHECK(randprog::answer_sets(q).size() == 2);
}

TEST_CASE("tester verdicts match direct semantics on random programs") {
    asptest::InternalBackend internal;
    auto st = property::run(20240601, 150, internal);
    for (const auto& p : st.problems) WARN(p);
    CHECK(st.assertions == 1500);
    CHECK(st.agree == st.assertions);
    CHECK(st.cap_violations == 0);
    CHECK(st.capped_vs_unbounded_mismatch == 0);
}
