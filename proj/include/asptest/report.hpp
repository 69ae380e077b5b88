#pragma once
// Text and JSON renderings of test reports.

#include "engine.hpp"

#include <json.hpp>

#include <ostream>
#include <string>

namespace asptest {

inline void write_human(std::ostream& os, const SuiteReport& r, const std::string& unit_name = "") {
    if (r.tests.empty()) {
        os << (unit_name.empty() ? "" : unit_name + ": ") << "0 tests\n";
        return;
    }
    for (const auto& t : r.tests) {
        os << "test " << t.name << ": " << to_string(t.verdict) << " (" << t.wall_ms << " ms)\n";
        for (const auto& a : t.assertions) {
            os << "  " << to_string(a.assertion) << "  " << to_string(a.verdict) << "  " << a.wall_ms << " ms\n";
            if (a.verdict != Verdict::pass && !a.diagnostics.empty()) os << "    " << a.diagnostics << '\n';
            if (a.witness) os << "    witness: " << to_string(*a.witness) << '\n';
        }
    }
    auto tc = r.test_counts();
    auto ac = r.assertion_counts();
    os << (unit_name.empty() ? "" : unit_name + ": ") << tc.total() << " tests, " << tc.pass << " passed, " << tc.fail
       << " failed, " << tc.inconclusive << " inconclusive, " << tc.error << " errors; " << ac.pass << "/" << ac.total()
       << " assertions passed (" << r.wall_ms << " ms)\n";
}

namespace detail {

inline nlohmann::json counts_json(const SuiteReport::Counts& c) {
    return {{"total", c.total()}, {"pass", c.pass}, {"fail", c.fail}, {"inconclusive", c.inconclusive}, {"error", c.error}};
}

} // namespace detail

/// {"suite", "backend", "verdict", "wall_ms", "counts": {"tests", "assertions"}, "tests": [
///    {"name", "verdict", "wall_ms", "assertions": [
///       {"assertion", "kind", "verdict", "executed_code", "witness": [atom...] | null,
///        "diagnostics", "wall_ms", "requested_models": n | null}]}]}
inline nlohmann::json to_json(const SuiteReport& r, const std::string& suite = "", const std::string& backend = "") {
    nlohmann::json tests = nlohmann::json::array();
    for (const auto& t : r.tests) {
        nlohmann::json as = nlohmann::json::array();
        for (const auto& a : t.assertions) {
            nlohmann::json w = nullptr;
            if (a.witness) {
                w = nlohmann::json::array();
                for (const auto& atom : a.witness->atoms()) w.push_back(to_string(atom));
            }
            nlohmann::json requested = nullptr;
            if (a.run && a.run->requested_models) requested = *a.run->requested_models;
            as.push_back({{"assertion", to_string(a.assertion)},
                          {"kind", assertion_name(a.assertion)},
                          {"verdict", to_string(a.verdict)},
                          {"executed_code", a.executed_code},
                          {"witness", w},
                          {"diagnostics", a.diagnostics},
                          {"wall_ms", a.wall_ms},
                          {"requested_models", requested}});
        }
        tests.push_back({{"name", t.name}, {"verdict", to_string(t.verdict)}, {"wall_ms", t.wall_ms}, {"assertions", as}});
    }
    return {{"suite", suite},
            {"backend", backend},
            {"verdict", to_string(r.verdict())},
            {"wall_ms", r.wall_ms},
            {"counts", {{"tests", detail::counts_json(r.test_counts())}, {"assertions", detail::counts_json(r.assertion_counts())}}},
            {"tests", tests}};
}

} // namespace asptest
