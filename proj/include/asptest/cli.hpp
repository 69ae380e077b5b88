#pragma once
// The asptest command line: check, solve, test, mutate.
// Exit codes are the same for every command: 0 success, 1 semantic failure, 2 tool or environment error.

#include "backend.hpp"
#include "engine.hpp"
#include "mutator.hpp"
#include "report.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace asptest::cli {

enum Exit { ok = 0, failure = 1, error = 2 };

enum class Format { human, json };

struct Options {
    std::vector<std::string> files;
    BackendKind              backend = BackendKind::automatic;
    std::string              solver_path;
    std::vector<std::string> solver_args; ///< replace the default extra arguments when non-empty
    std::string              solver_cap;  ///< cap template, e.g. "-n {n}"
    bool                     solver_file_input = false;
    int                      timeout_seconds   = 60;
    std::size_t              models            = 0; ///< 0 = all
    Format                   format            = Format::human;
    std::size_t              jobs              = 1;
    GroundingMode            grounding         = GroundingMode::simplified;
    std::vector<std::string> ops;
    std::size_t              count          = 10;
    std::uint64_t            seed           = 1;
    std::size_t              ops_per_mutant = 1;
};

inline BackendConfig backend_config(const Options& o) {
    auto cfg = BackendConfig::defaults();
    if (!o.solver_path.empty()) cfg.executable = o.solver_path;
    if (!o.solver_args.empty()) cfg.extra_args = o.solver_args;
    if (!o.solver_cap.empty()) cfg.cap_template = o.solver_cap;
    if (o.solver_file_input) cfg.input = InputMode::temp_file;
    cfg.timeout_seconds = o.timeout_seconds;
    return cfg;
}

/// The backend for test and mutate runs. Capacity is judged per tester program, not up front.
inline std::unique_ptr<Backend> make_backend(const Options& o) {
    auto cfg = backend_config(o);
    switch (o.backend) {
        case BackendKind::internal: return std::make_unique<InternalBackend>(o.grounding);
        case BackendKind::external:
            if (find_executable(cfg.executable).empty()) throw SpawnFailure("solver executable '" + cfg.executable + "' not found");
            return std::make_unique<ExternalBackend>(cfg);
        case BackendKind::automatic: return std::make_unique<AutoBackend>(InternalBackend(o.grounding), cfg);
    }
    throw ValidationError("unknown backend");
}

/// Parses every file (collecting all parse errors) and merges them into one unit.
/// IoFailure propagates; ParseFailure carries the errors of every file.
inline SourceUnit load(const std::vector<std::string>& files) {
    std::vector<SourceUnit> units;
    std::string             messages;
    for (const auto& f : files) {
        auto text = read_file(f);
        try {
            units.push_back(parse_unit(f, std::move(text)));
        } catch (const ParseFailure& e) {
            messages += (messages.empty() ? "" : "\n") + std::string(e.what());
        }
    }
    if (!messages.empty()) throw ValidationError(messages);
    return merge_units(std::move(units));
}

/// Scope and block names that do not resolve; test-file references are left to run time.
inline std::vector<std::string> reference_errors(const SourceUnit& u) {
    std::vector<std::string> out;
    auto where = [&](const SourceSpan& s) {
        return (s.file.empty() ? u.path : s.file) + ':' + std::to_string(s.line) + ':' + std::to_string(s.column) + ": ";
    };
    for (const auto& [name, b] : u.suite.blocks)
        for (const auto& m : b.listed)
            if (!u.suite.named_rules.count(m))
                out.push_back(where(b.origin) + "dangling-reference: block '" + name + "' lists unknown rule '" + m + "'");
    for (const auto& t : u.suite.tests)
        for (const auto& s : t.scope)
            if (!u.suite.named_rules.count(s) && !u.suite.blocks.count(s))
                out.push_back(where(t.origin) + "dangling-reference: test '" + t.name + "' scopes unknown rule or block '" + s + "'");
    return out;
}

inline int cmd_check(const Options& o, std::ostream& out, std::ostream& err) {
    std::vector<SourceUnit> units;
    bool                    bad = false;
    for (const auto& f : o.files) {
        std::string text;
        try {
            text = read_file(f);
        } catch (const IoFailure& e) {
            err << "error: " << e.what() << '\n';
            return error;
        }
        try {
            units.push_back(parse_unit(f, std::move(text)));
        } catch (const ParseFailure& e) {
            err << e.what() << '\n';
            bad = true;
        }
    }
    if (bad) return failure;
    try {
        auto u = merge_units(std::move(units));
        auto refs = reference_errors(u);
        for (const auto& r : refs) err << r << '\n';
        if (!refs.empty()) return failure;
        out << u.path << ": ok (" << u.program.rules.size() + u.program.weak_constraints.size() << " statements, "
            << u.suite.tests.size() << " tests)\n";
    } catch (const ParseFailure& e) {
        err << e.what() << '\n';
        return failure;
    }
    return ok;
}

inline int cmd_solve(const Options& o, std::ostream& out, std::ostream& err) {
    try {
        auto    u    = load(o.files);
        Program p    = u.program;
        auto    mode = p.weak_constraints.empty() ? SolveMode::enumerate : SolveMode::optimize;
        std::unique_ptr<Backend> b;
        if (o.backend == BackendKind::automatic) b = make_backend(o);
        else b = select_backend(o.backend, backend_config(o), p);
        std::optional<std::size_t> cap;
        if (o.models > 0) cap = o.models;
        SolveResult res;
        try {
            res = b->solve(p, cap, mode).result;
        } catch (const SolverTimeout& t) {
            err << "warning: " << t.what() << '\n';
            res = t.partial;
        }
        out << write_competition_output(res);
        return res.incoherent ? failure : ok;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return error;
    }
}

inline int cmd_test(const Options& o, std::ostream& out, std::ostream& err) {
    try {
        auto u = load(o.files);
        auto b = make_backend(o);
        auto r = run_suite(u, *b, o.jobs);
        if (o.format == Format::json) out << to_json(r, u.path, b->name()).dump(2) << '\n';
        else write_human(out, r, u.path);
        switch (r.verdict()) {
            case Verdict::pass: return ok;
            case Verdict::error: return error;
            default: return failure;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return error;
    }
}

inline void write_kill_table(std::ostream& os, const KillReport& r) {
    std::size_t w = 4;
    for (const auto& m : r.mutants)
        for (const auto& op : m.ops) w = std::max(w, op.size());
    os << std::left << std::setw(8) << "mutant" << std::setw(14) << "status" << std::setw(static_cast<int>(w) + 2) << "ops"
       << "killed by\n";
    for (const auto& m : r.mutants) {
        std::string by;
        for (const auto& k : m.killed_by) by += (by.empty() ? "" : ", ") + k;
        for (std::size_t i = 0; i < std::max<std::size_t>(1, m.ops.size()); ++i) {
            if (i == 0) os << std::setw(8) << m.id << std::setw(14) << to_string(m.status);
            else os << std::setw(22) << "";
            os << std::setw(static_cast<int>(w) + 2) << (i < m.ops.size() ? m.ops[i] : "") << (i == 0 ? by : "") << '\n';
        }
    }
    os << std::right;
    for (const auto& [a, n] : r.failures_per_assertion) os << "assertion " << a << " failed on " << n << "/" << r.mutants.size() << " mutants\n";
    os << r.count(MutantStatus::killed) << "/" << r.mutants.size() << " mutants killed, " << r.count(MutantStatus::survived)
       << " survived, " << r.count(MutantStatus::inconclusive) << " inconclusive\n";
}

inline nlohmann::json kill_json(const KillReport& r, const std::string& suite, std::uint64_t seed, bool exhausted) {
    nlohmann::json ms = nlohmann::json::array();
    for (const auto& m : r.mutants)
        ms.push_back({{"id", m.id}, {"ops", m.ops}, {"status", to_string(m.status)}, {"killed_by", m.killed_by}, {"program", m.program}});
    return {{"suite", suite},
            {"seed", seed},
            {"baseline_passed", r.baseline_passed},
            {"loci_exhausted", exhausted},
            {"mutants", ms},
            {"failures_per_assertion", r.failures_per_assertion},
            {"counts",
             {{"total", r.mutants.size()},
              {"killed", r.count(MutantStatus::killed)},
              {"survived", r.count(MutantStatus::survived)},
              {"inconclusive", r.count(MutantStatus::inconclusive)}}}};
}

inline int cmd_mutate(const Options& o, std::ostream& out, std::ostream& err) {
    try {
        auto u = load(o.files);
        std::vector<MutationKind> kinds;
        if (o.ops.empty()) kinds.assign(std::begin(all_mutation_kinds), std::end(all_mutation_kinds));
        for (const auto& name : o.ops) kinds.push_back(parse_mutation_kind(name));
        auto target = mutation_target(u.suite);
        if (target.program.rules.empty()) throw ValidationError("no named rules to mutate");

        bool                exhausted = false;
        std::vector<Mutant> mutants;
        try {
            mutants = generate_mutants(target.program, kinds, o.count, o.seed, o.ops_per_mutant);
        } catch (const ExhaustedLoci& e) {
            err << "warning: " << e.what() << '\n';
            mutants   = e.partial;
            exhausted = true;
        }
        auto b = make_backend(o);
        auto r = mutation_analysis(u, mutants, *b, o.jobs);
        if (!r.baseline_passed) {
            err << "baseline fails: the original program does not pass its tests; refusing mutation analysis\n";
            if (o.format == Format::human) write_human(err, r.baseline, u.path);
        }
        if (o.format == Format::json) out << kill_json(r, u.path, o.seed, exhausted).dump(2) << '\n';
        else if (r.baseline_passed) write_kill_table(out, r);
        return r.all_killed() && !exhausted && !mutants.empty() ? ok : failure;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return error;
    }
}

/// Parses argv and dispatches. Usage errors exit 2.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Unit testing and mutation analysis for answer set programs"};
    app.require_subcommand(1);
    Options o;

    auto backend_opts = [&](CLI::App* c) {
        c->add_option("--backend", o.backend, "internal, external (default: internal when the program fits)")
            ->transform(CLI::CheckedTransformer(
                std::map<std::string, BackendKind>{{"internal", BackendKind::internal}, {"external", BackendKind::external},
                                                   {"auto", BackendKind::automatic}}));
        c->add_option("--solver-path", o.solver_path, "external solver executable (default: $ASP_TESTKIT_SOLVER or clingo)");
        c->add_option("--solver-arg", o.solver_args, "argument for the solver; repeatable; replaces the defaults")->allow_extra_args(false);
        c->add_option("--solver-cap", o.solver_cap, "model cap arguments with {n} placeholder (default \"-n {n}\")");
        c->add_flag("--solver-file-input", o.solver_file_input, "pass the program as a file instead of stdin");
        c->add_option("--timeout", o.timeout_seconds, "solver timeout in seconds")->check(CLI::PositiveNumber);
        c->add_option("--grounding", o.grounding, "internal grounder: simplified or naive")
            ->transform(CLI::CheckedTransformer(
                std::map<std::string, GroundingMode>{{"simplified", GroundingMode::simplified}, {"naive", GroundingMode::naive}}));
    };
    auto files = [&](CLI::App* c) { c->add_option("files", o.files, "input files")->required(); };
    auto format = [&](CLI::App* c) {
        c->add_option("--format", o.format, "human or json")
            ->transform(CLI::CheckedTransformer(std::map<std::string, Format>{{"human", Format::human}, {"json", Format::json}}));
        c->add_option("--jobs,-j", o.jobs, "parallel workers")->check(CLI::PositiveNumber);
    };

    auto* check = app.add_subcommand("check", "parse files and report errors");
    files(check);
    auto* solve = app.add_subcommand("solve", "print answer sets in competition format");
    files(solve);
    backend_opts(solve);
    solve->add_option("-n", o.models, "maximum number of answer sets (0 = all)");
    auto* test = app.add_subcommand("test", "run the annotated tests");
    files(test);
    backend_opts(test);
    format(test);
    auto* mutate = app.add_subcommand("mutate", "mutation analysis of the test suite");
    files(mutate);
    backend_opts(mutate);
    format(mutate);
    mutate->add_option("--ops", o.ops, "comma-separated operators (default: all)")->delimiter(',');
    mutate->add_option("--count", o.count, "number of mutants")->check(CLI::PositiveNumber);
    mutate->add_option("--seed", o.seed, "random seed");
    mutate->add_option("--ops-per-mutant", o.ops_per_mutant, "mutations applied per mutant")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        auto subs = app.get_subcommands();
        out << (subs.empty() ? app.help() : subs.front()->help());
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        err << "run '" << sub->get_name() << " --help' for usage\n";
        return error;
    }
    if (check->parsed()) return cmd_check(o, out, err);
    if (solve->parsed()) return cmd_solve(o, out, err);
    if (test->parsed()) return cmd_test(o, out, err);
    return cmd_mutate(o, out, err);
}

} // namespace asptest::cli
