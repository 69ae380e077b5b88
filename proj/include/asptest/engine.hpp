#pragma once
// Test execution: scope resolution, tester programs per assertion, verdicts.

#include "backend.hpp"
#include "error.hpp"
#include "model.hpp"
#include "parser.hpp"
#include "serialize.hpp"
#include "solve_result.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace asptest {

using FileLoader = std::function<std::string(const std::string& path)>;

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoFailure("error while reading '" + path + "'");
    return ss.str();
}

/// Where a test's relative file references are resolved, and how files are read.
struct ScopeContext {
    FileLoader  loader   = read_file;
    std::string base_dir; ///< directory of the file holding the test
};

inline std::string resolve_path(const ScopeContext& ctx, const std::string& path) {
    std::filesystem::path p(path);
    if (p.is_absolute() || ctx.base_dir.empty()) return path;
    return (std::filesystem::path(ctx.base_dir) / p).string();
}

/// Rules of `block` in declaration order: those listed by the block and those claiming it.
inline std::vector<std::string> block_members(const TestSuite& suite, const std::string& block) {
    const auto&           b = suite.blocks.at(block);
    std::set<std::string> listed(b.listed.begin(), b.listed.end());
    std::vector<std::string> out;
    for (const auto& name : suite.rule_order) {
        if (listed.count(name) || suite.named_rules.at(name).block == block) out.push_back(name);
    }
    for (const auto& name : b.listed)
        if (!suite.named_rules.count(name)) throw DanglingReference(name);
    return out;
}

/// The program a test runs on: its scope (rules and blocks, each rule once), then input and inputFiles.
/// With programFiles, names are looked up in those files instead of the test's own file.
inline Program resolve_scope(const TestSuite& suite, const TestSpec& spec, const ScopeContext& ctx = {}) {
    TestSuite loaded;
    const TestSuite* source = &suite;
    if (!spec.program_files.empty()) {
        std::vector<SourceUnit> units;
        for (const auto& f : spec.program_files) {
            auto path = resolve_path(ctx, f);
            units.push_back(parse_unit(path, ctx.loader(path)));
        }
        loaded = merge_units(std::move(units)).suite;
        source = &loaded;
    }

    Program               p;
    std::set<std::string> taken;
    auto add_rule = [&](const std::string& name) {
        if (!taken.insert(name).second) return;
        const auto& nr = source->named_rules.at(name);
        if (!nr.removed) p.add(nr.statement);
    };
    for (const auto& ref : spec.scope) {
        if (source->named_rules.count(ref)) add_rule(ref);
        else if (source->blocks.count(ref))
            for (const auto& name : block_members(*source, ref)) add_rule(name);
        else throw DanglingReference(ref);
    }
    if (!spec.input.empty()) p.append(parse_program(spec.input, spec.origin.file.empty() ? "input" : spec.origin.file + ":input"));
    for (const auto& f : spec.input_files) {
        auto path = resolve_path(ctx, f);
        p.append(parse_program(strip_annotations(ctx.loader(path)), path));
    }
    return p;
}

// ---------------------------------------------------------------------------
// Tester programs

enum class VerdictKind { incoherent, count_eq, count_le, count_ge, optimum_cost };

struct VerdictRule {
    VerdictKind   kind  = VerdictKind::incoherent;
    std::uint64_t k     = 0;
    std::int64_t  cost  = 0;
    std::int64_t  level = 0;
};

inline std::string to_string(const VerdictRule& v) {
    switch (v.kind) {
        case VerdictKind::incoherent: return "pass-iff-incoherent";
        case VerdictKind::count_eq: return "pass-iff-count-eq(" + std::to_string(v.k) + ")";
        case VerdictKind::count_le: return "pass-iff-count-le(" + std::to_string(v.k) + ")";
        case VerdictKind::count_ge: return "pass-iff-count-ge(" + std::to_string(v.k) + ")";
        case VerdictKind::optimum_cost:
            return "pass-iff-optimum-cost(" + std::to_string(v.cost) + "," + std::to_string(v.level) + ")";
    }
    return "?";
}

struct TesterProgram {
    std::string                text; ///< serialized base + added
    Program                    base;
    std::vector<Rule>          added;
    std::optional<std::size_t> model_cap;
    VerdictRule                verdict;
    SolveMode                  mode = SolveMode::enumerate;

    [[nodiscard]] Program program() const {
        Program p = base;
        p.rules.insert(p.rules.end(), added.begin(), added.end());
        return p;
    }
};

/// Encodes assertion `a` against the scoped program `p`. `names` are the predicates fresh atoms must avoid.
inline TesterProgram build_tester(const Program& p, const Assertion& a, std::set<std::string> names) {
    TesterProgram tp;
    tp.base = p;
    for (const auto& n : predicate_names(p)) names.insert(n);

    auto forbid_missing = [&](const std::vector<Atom>& atoms) { // ← not a, for every a
        for (const auto& atom : atoms) tp.added.push_back(Rule{{}, {neg(atom)}, {}});
    };
    auto counted = [&](VerdictKind kind, std::uint64_t k) {
        tp.verdict = {kind, k, 0, 0};
        tp.model_cap = kind == VerdictKind::count_ge ? k : k + 1;
    };
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, NoAnswerSet>) {
                tp.model_cap = 1;
            }
            else if constexpr (std::is_same_v<T, TrueInAll>) {
                for (const auto& atom : x.atoms) collect_predicates(atom, names);
                Atom miss{fresh_predicate(names, "miss"), {}};
                for (const auto& atom : x.atoms) tp.added.push_back(Rule{{miss}, {neg(atom)}, {}});
                tp.added.push_back(Rule{{}, {neg(miss)}, {}});
                tp.model_cap = 1;
            }
            else if constexpr (std::is_same_v<T, TrueInAtLeast>) {
                if (x.number == 0) throw ValidationError("trueInAtLeast with number = 0 always holds");
                forbid_missing(x.atoms);
                counted(VerdictKind::count_ge, x.number);
            }
            else if constexpr (std::is_same_v<T, TrueInAtMost>) {
                forbid_missing(x.atoms);
                counted(VerdictKind::count_le, x.number);
            }
            else if constexpr (std::is_same_v<T, TrueInExactly>) {
                forbid_missing(x.atoms);
                counted(VerdictKind::count_eq, x.number);
            }
            else if constexpr (std::is_same_v<T, ConstraintForAll>) {
                collect_predicates(x.constraint, names);
                Atom fail{fresh_predicate(names, "fail"), {}};
                tp.added.push_back(Rule{{fail}, x.constraint.body, {}});
                tp.added.push_back(Rule{{}, {neg(fail)}, {}});
                tp.model_cap = 1;
            }
            else if constexpr (std::is_same_v<T, ConstraintInAtLeast>) {
                if (x.number == 0) throw ValidationError("constraintInAtLeast with number = 0 always holds");
                tp.added.push_back(x.constraint);
                counted(VerdictKind::count_ge, x.number);
            }
            else if constexpr (std::is_same_v<T, ConstraintInAtMost>) {
                tp.added.push_back(x.constraint);
                counted(VerdictKind::count_le, x.number);
            }
            else if constexpr (std::is_same_v<T, ConstraintInExactly>) {
                tp.added.push_back(x.constraint);
                counted(VerdictKind::count_eq, x.number);
            }
            else if constexpr (std::is_same_v<T, BestModelCost>) {
                tp.verdict   = {VerdictKind::optimum_cost, 0, x.cost, x.level};
                tp.model_cap = std::nullopt;
                tp.mode      = SolveMode::optimize;
            }
        },
        a);
    tp.text = serialize_program(tp.program());
    return tp;
}

// ---------------------------------------------------------------------------
// Verdicts

enum class Verdict { pass, fail, inconclusive, error };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::inconclusive: return "inconclusive";
        case Verdict::error: return "error";
    }
    return "?";
}

/// Worst of two verdicts: error > fail > inconclusive > pass.
inline Verdict worst(Verdict a, Verdict b) {
    auto rank = [](Verdict v) {
        switch (v) {
            case Verdict::pass: return 0;
            case Verdict::inconclusive: return 1;
            case Verdict::fail: return 2;
            case Verdict::error: return 3;
        }
        return 3;
    };
    return rank(a) >= rank(b) ? a : b;
}

struct AssertionResult {
    Assertion                assertion;
    std::string              executed_code;
    Verdict                  verdict = Verdict::error;
    std::optional<AnswerSet> witness;
    std::string              diagnostics;
    long long                wall_ms = 0;
    std::optional<RawRun>    run;
};

/// Keeps the atoms whose predicate signature occurs in `base`; drops auxiliary atoms.
inline AnswerSet project(const AnswerSet& s, const Program& base) {
    auto sigs = predicate_signatures(base);
    return s.filter([&](const Atom& a) { return sigs.count({a.predicate, a.arity()}) != 0; });
}

inline AssertionResult evaluate(const TesterProgram& tp, const SolveResult& res, const Assertion& a = NoAnswerSet{}) {
    AssertionResult out;
    out.assertion     = a;
    out.executed_code = tp.text;
    const auto n      = res.answer_sets.size();
    auto witness      = [&](std::size_t i) { out.witness = project(res.answer_sets.at(i), tp.base); };
    const auto& v     = tp.verdict;
    switch (v.kind) {
        case VerdictKind::incoherent:
            if (res.incoherent) out.verdict = Verdict::pass;
            else if (n > 0) {
                out.verdict = Verdict::fail;
                witness(0);
                out.diagnostics = "the tester program has an answer set";
            }
            else {
                out.verdict     = Verdict::inconclusive;
                out.diagnostics = "solver stopped before deciding coherence";
            }
            break;
        case VerdictKind::count_ge:
            if (n >= v.k) out.verdict = Verdict::pass;
            else if (res.exhausted) {
                out.verdict     = Verdict::fail;
                out.diagnostics = "found " + std::to_string(n) + " answer sets, expected at least " + std::to_string(v.k);
            }
            else {
                out.verdict     = Verdict::inconclusive;
                out.diagnostics = "only " + std::to_string(n) + " answer sets before the solver stopped";
            }
            break;
        case VerdictKind::count_le:
        case VerdictKind::count_eq:
            if (n > v.k) {
                out.verdict     = Verdict::fail;
                out.diagnostics = "found more than " + std::to_string(v.k) + " answer sets";
                witness(n - 1);
            }
            else if (!res.exhausted) {
                out.verdict     = Verdict::inconclusive;
                out.diagnostics = "enumeration incomplete after " + std::to_string(n) + " answer sets";
            }
            else if (v.kind == VerdictKind::count_eq && n < v.k) {
                out.verdict     = Verdict::fail;
                out.diagnostics = "found " + std::to_string(n) + " answer sets, expected " + std::to_string(v.k);
            }
            else {
                out.verdict = Verdict::pass;
            }
            break;
        case VerdictKind::optimum_cost: {
            if (res.incoherent) {
                out.verdict     = Verdict::fail;
                out.diagnostics = "the program has no answer set";
                break;
            }
            if (n == 0) {
                out.verdict     = Verdict::inconclusive;
                out.diagnostics = "no answer set reported before the solver stopped";
                break;
            }
            if (!tp.base.weak_constraints.empty() && !res.has_costs()) {
                out.verdict     = Verdict::error;
                out.diagnostics = "backend reported no costs";
                break;
            }
            if (!tp.base.weak_constraints.empty() && !res.optimal) {
                out.verdict     = Verdict::inconclusive;
                out.diagnostics = "optimality not established";
                break;
            }
            auto cost = res.cost(n - 1, v.level);
            if (cost == v.cost) out.verdict = Verdict::pass;
            else {
                out.verdict     = Verdict::fail;
                out.diagnostics = "optimal cost at level " + std::to_string(v.level) + " is " + std::to_string(cost);
                witness(n - 1);
            }
            break;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Running tests

struct TestResult {
    std::string                  name;
    std::vector<AssertionResult> assertions;
    Verdict                      verdict = Verdict::pass;
    long long                    wall_ms = 0;
};

struct SuiteReport {
    std::vector<TestResult> tests;
    long long               wall_ms = 0;

    struct Counts {
        std::size_t pass = 0, fail = 0, inconclusive = 0, error = 0;
        [[nodiscard]] std::size_t total() const { return pass + fail + inconclusive + error; }
        void add(Verdict v) {
            switch (v) {
                case Verdict::pass: ++pass; break;
                case Verdict::fail: ++fail; break;
                case Verdict::inconclusive: ++inconclusive; break;
                case Verdict::error: ++error; break;
            }
        }
    };
    [[nodiscard]] Counts test_counts() const {
        Counts c;
        for (const auto& t : tests) c.add(t.verdict);
        return c;
    }
    [[nodiscard]] Counts assertion_counts() const {
        Counts c;
        for (const auto& t : tests)
            for (const auto& a : t.assertions) c.add(a.verdict);
        return c;
    }
    [[nodiscard]] Verdict verdict() const {
        Verdict v = Verdict::pass;
        for (const auto& t : tests) v = worst(v, t.verdict);
        return v;
    }
};

/// Solves and evaluates one assertion; every failure mode becomes a verdict.
inline AssertionResult check_assertion(const Program& scoped, const Assertion& a, const std::set<std::string>& names,
                                       const Backend& backend) {
    auto            start = std::chrono::steady_clock::now();
    AssertionResult out;
    out.assertion = a;
    try {
        auto tp = build_tester(scoped, a, names);
        try {
            auto solved = backend.solve(tp.program(), tp.model_cap, tp.mode);
            out         = evaluate(tp, solved.result, a);
            out.run     = std::move(solved.run);
        } catch (const SolverTimeout& t) {
            out = evaluate(tp, t.partial, a);
            out.run = t.run;
            out.diagnostics = std::string(t.what()) + (out.diagnostics.empty() ? "" : "; " + out.diagnostics);
        } catch (const Error& e) {
            out.executed_code = tp.text;
            out.verdict       = Verdict::error;
            out.diagnostics   = e.what();
        }
    } catch (const Error& e) {
        out.verdict     = Verdict::error;
        out.diagnostics = e.what();
    }
    out.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
    return out;
}

inline TestResult run_test(const TestSuite& suite, const TestSpec& spec, const Backend& backend, const ScopeContext& ctx = {}) {
    auto       start = std::chrono::steady_clock::now();
    TestResult tr;
    tr.name = spec.name;
    std::optional<Program> scoped;
    std::string            scope_error;
    try {
        scoped = resolve_scope(suite, spec, ctx);
    } catch (const Error& e) {
        scope_error = e.what();
    }
    std::set<std::string> names;
    if (scoped) names = predicate_names(*scoped);
    for (const auto& a : spec.asserts) {
        if (!scoped) {
            AssertionResult ar;
            ar.assertion   = a;
            ar.verdict     = Verdict::error;
            ar.diagnostics = scope_error;
            tr.assertions.push_back(std::move(ar));
            continue;
        }
        tr.assertions.push_back(check_assertion(*scoped, a, names, backend));
    }
    for (const auto& a : tr.assertions) tr.verdict = worst(tr.verdict, a.verdict);
    tr.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
    return tr;
}

/// Runs `items` jobs on up to `jobs` threads; results stay in index order.
template <typename R, typename F>
std::vector<R> parallel_map(std::size_t items, std::size_t jobs, F&& fn) {
    std::vector<R> out(items);
    if (jobs <= 1 || items <= 1) {
        for (std::size_t i = 0; i < items; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::min(jobs, items); ++t) {
        pool.emplace_back([&] {
            for (std::size_t i; (i = next++) < items;) out[i] = fn(i);
        });
    }
    for (auto& th : pool) th.join();
    return out;
}

inline ScopeContext context_for(const SourceUnit& unit) {
    ScopeContext ctx;
    auto         first = unit.path.substr(0, unit.path.find(','));
    ctx.base_dir       = std::filesystem::path(first).parent_path().string();
    return ctx;
}

inline SuiteReport run_suite(const SourceUnit& unit, const Backend& backend, std::size_t jobs = 1, std::optional<ScopeContext> ctx = {}) {
    auto        start = std::chrono::steady_clock::now();
    SuiteReport report;
    auto        c     = ctx.value_or(context_for(unit));
    report.tests = parallel_map<TestResult>(unit.suite.tests.size(), jobs,
                                            [&](std::size_t i) { return run_test(unit.suite, unit.suite.tests[i], backend, c); });
    report.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
    return report;
}

} // namespace asptest
