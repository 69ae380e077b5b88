#pragma once
// Uniform solve interface over the built-in oracle and external competition-format solvers.

#include "competition.hpp"
#include "error.hpp"
#include "ground.hpp"
#include "oracle.hpp"
#include "process.hpp"
#include "serialize.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <unistd.h>

namespace asptest {

enum class InputMode { standard_input, temp_file };

/// How to drive an external solver. The defaults match clingo 5.x; DLV-style systems need
/// other extra_args and cap_template.
struct BackendConfig {
    std::string              executable;
    std::vector<std::string> extra_args   = {"--outf=1", "--quiet=0,0"};
    std::string              cap_template = "-n {n}"; ///< whitespace-split after expansion; {n} = 0 means all models
    int                      timeout_seconds = 60;
    InputMode                input           = InputMode::standard_input;

    /// executable from ASP_TESTKIT_SOLVER, else "clingo"
    static BackendConfig defaults() {
        BackendConfig c;
        const char*   env = std::getenv("ASP_TESTKIT_SOLVER");
        c.executable      = env && *env ? env : "clingo";
        return c;
    }

    void validate() const {
        if (timeout_seconds <= 0) throw ValidationError("solver timeout must be positive");
        if (executable.empty()) throw ValidationError("no solver executable configured");
    }
};

/// Verbatim record of one solver invocation.
struct RawRun {
    std::vector<std::string>   argv;
    std::string                stdin_text;
    std::string                stdout_text;
    std::string                stderr_text;
    int                        exit_status = 0;
    long long                  wall_ms     = 0;
    std::optional<std::size_t> requested_models;
    std::string                temp_path; ///< program file when the solver read one (already deleted)
};

/// The solver ran out of time; `partial` holds what it reported before being killed.
class SolverTimeout : public Error {
public:
    SolverTimeout(SolveResult partial, RawRun run)
        : Error("solver timed out after " + std::to_string(run.wall_ms) + " ms"), partial(std::move(partial)),
          run(std::move(run)) {}
    SolveResult partial;
    RawRun      run;
};

/// Locates `name` like execvp would; empty when not found.
inline std::string find_executable(const std::string& name) {
    if (name.empty()) return {};
    if (name.find('/') != std::string::npos) return ::access(name.c_str(), X_OK) == 0 ? name : std::string{};
    const char* path = std::getenv("PATH");
    std::string dirs = path ? path : "/usr/bin:/bin";
    for (std::size_t start = 0; start <= dirs.size();) {
        auto colon = dirs.find(':', start);
        if (colon == std::string::npos) colon = dirs.size();
        std::string dir  = dirs.substr(start, colon - start);
        std::string full = (dir.empty() ? "." : dir) + "/" + name;
        if (::access(full.c_str(), X_OK) == 0) return full;
        start = colon + 1;
    }
    return {};
}

namespace detail {

inline std::vector<std::string> expand_cap(const std::string& tmpl, std::size_t n) {
    std::string s = tmpl;
    for (auto at = s.find("{n}"); at != std::string::npos; at = s.find("{n}")) s.replace(at, 3, std::to_string(n));
    std::vector<std::string> out;
    std::istringstream       words(s);
    for (std::string w; words >> w;) out.push_back(w);
    return out;
}

inline std::string temp_program_path() {
    static thread_local std::mt19937_64 rng{std::random_device{}()};
    auto dir = std::filesystem::temp_directory_path();
    for (;;) {
        auto p = dir / ("asptest-" + std::to_string(::getpid()) + "-" + std::to_string(rng() % 1000000000) + ".lp");
        if (!std::filesystem::exists(p)) return p.string();
    }
}

} // namespace detail

/// Runs the configured solver on `program_text`. `levels` (highest first) resolves bare COST values.
/// exhausted is set when the solver reported completion: optimum, incoherence, or fewer models than asked.
inline std::pair<SolveResult, RawRun> solve(const BackendConfig& cfg, const std::string& program_text,
                                            std::optional<std::size_t> max_models,
                                            const std::vector<std::int64_t>& levels = {}) {
    cfg.validate();
    RawRun run;
    run.requested_models = max_models;
    run.argv.push_back(cfg.executable);
    run.argv.insert(run.argv.end(), cfg.extra_args.begin(), cfg.extra_args.end());
    for (auto& a : detail::expand_cap(cfg.cap_template, max_models.value_or(0))) run.argv.push_back(a);
    run.stdin_text = program_text;

    std::string feed = program_text;
    if (cfg.input == InputMode::temp_file) {
        run.temp_path = detail::temp_program_path();
        std::ofstream(run.temp_path) << program_text;
        run.argv.push_back(run.temp_path);
        feed.clear();
    }
    ProcessOutcome out;
    try {
        out = run_process(run.argv, feed, std::chrono::seconds(cfg.timeout_seconds));
    } catch (...) {
        if (!run.temp_path.empty()) std::filesystem::remove(run.temp_path);
        throw;
    }
    if (!run.temp_path.empty()) std::filesystem::remove(run.temp_path);
    run.stdout_text = std::move(out.out);
    run.stderr_text = std::move(out.err);
    run.exit_status = out.exit_status;
    run.wall_ms     = out.wall_ms;

    SolveResult res;
    try {
        res = parse_competition_output(run.stdout_text, levels);
    } catch (const FormatError& e) {
        if (out.timed_out) {
            // the last answer line may have been cut; keep what parses
            auto cut = run.stdout_text.rfind("ANSWER");
            res      = cut == std::string::npos ? SolveResult{} : parse_competition_output(run.stdout_text.substr(0, cut), levels);
        }
        else if (run.exit_status != 0) {
            throw BackendError("solver exited with status " + std::to_string(run.exit_status) + ": " + run.stderr_text);
        }
        else {
            throw;
        }
    }
    if (max_models && res.answer_sets.size() > *max_models) {
        res.answer_sets.resize(*max_models);
        res.exhausted = false;
    }
    if (out.timed_out) {
        res.exhausted = false;
        res.optimal   = false;
        throw SolverTimeout(std::move(res), std::move(run));
    }
    if (res.answer_sets.empty() && !res.incoherent) {
        std::string why = run.stderr_text.empty() ? "no answer sets and no incoherence marker" : run.stderr_text;
        throw BackendError("solver '" + cfg.executable + "' produced no usable output (status " +
                           std::to_string(run.exit_status) + "): " + why);
    }
    if (!res.incoherent && !res.optimal && (!max_models || res.answer_sets.size() < *max_models)) res.exhausted = true;
    return {std::move(res), std::move(run)};
}

inline std::vector<std::int64_t> program_levels(const Program& p) {
    std::set<std::int64_t> levels;
    for (const auto& w : p.weak_constraints) levels.insert(w.level);
    return {levels.rbegin(), levels.rend()};
}

namespace detail {

/// Levels of `p` without a violated instance cost 0; weak constraints that ground to nothing leave no trace otherwise.
inline void zero_fill_costs(SolveResult& r, const Program& p) {
    for (auto level : program_levels(p))
        for (std::size_t i = 0; i < r.answer_sets.size(); ++i) r.costs.try_emplace({i, level}, 0);
}

} // namespace detail

enum class SolveMode {
    enumerate, ///< answer sets in solver order, up to the cap
    optimize,  ///< optimal answer sets with their costs
};

struct SolveOutcome {
    SolveResult result;
    RawRun      run;
};

class Backend {
public:
    virtual ~Backend()                                = default;
    [[nodiscard]] virtual std::string name() const    = 0;
    /// Throws CapacityExceeded/UnsupportedAggregate (internal), SpawnFailure/BackendError/SolverTimeout (external).
    virtual SolveOutcome solve(const Program& p, std::optional<std::size_t> cap, SolveMode mode) const = 0;
};

class InternalBackend : public Backend {
public:
    explicit InternalBackend(GroundingMode grounding = GroundingMode::simplified, Capacity cap = {})
        : grounding_(grounding), capacity_(cap) {}

    [[nodiscard]] std::string name() const override { return "internal"; }

    SolveOutcome solve(const Program& p, std::optional<std::size_t> cap, SolveMode mode) const override {
        auto         start = std::chrono::steady_clock::now();
        SolveOutcome out;
        out.run.argv             = {"<internal>"};
        out.run.stdin_text       = serialize_program(p);
        out.run.requested_models = mode == SolveMode::optimize ? std::nullopt : cap;
        auto g                   = ground(p, grounding_, capacity_);
        out.result               = mode == SolveMode::optimize ? optimal_answer_sets(g) : enumerate(g, cap);
        if (mode == SolveMode::optimize) detail::zero_fill_costs(out.result, p);
        out.run.stdout_text      = write_competition_output(out.result);
        out.run.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
        return out;
    }

    /// Grounds once to find out whether `p` is within reach.
    void check(const Program& p) const { (void)ground(p, grounding_, capacity_); }

private:
    GroundingMode grounding_;
    Capacity      capacity_;
};


class ExternalBackend : public Backend {
public:
    explicit ExternalBackend(BackendConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

    [[nodiscard]] std::string          name() const override { return "external"; }
    [[nodiscard]] const BackendConfig& config() const { return cfg_; }

    SolveOutcome solve(const Program& p, std::optional<std::size_t> cap, SolveMode mode) const override {
        Program q = p;
        // without weak constraints the solver enumerates instead of optimizing
        if (mode == SolveMode::enumerate) q.weak_constraints.clear();
        SerializeOptions opts;
        opts.weak_instance_tuples = true;
        auto text = serialize_program(q, opts);
        // a level whose weak constraints have no ground instance vanishes from bare COST lines and shifts
        // the remaining values; a zero-cost instance per level keeps every level present
        for (auto level : program_levels(q)) text += ":~ #true. [0@" + std::to_string(level) + ",level_pin]\n";
        auto [res, run] = asptest::solve(cfg_, text, mode == SolveMode::optimize ? std::nullopt : cap, program_levels(q));
        if (mode == SolveMode::optimize && !res.incoherent && !res.has_costs() && !q.weak_constraints.empty())
            throw BackendError("solver reported no COST lines for a program with weak constraints");
        return {std::move(res), std::move(run)};
    }

private:
    BackendConfig cfg_;
};

/// Internal when the program fits the oracle, external otherwise (if a solver is available).
class AutoBackend : public Backend {
public:
    AutoBackend(InternalBackend internal, std::optional<BackendConfig> external)
        : internal_(std::move(internal)), external_(std::move(external)) {}

    [[nodiscard]] std::string name() const override { return "auto"; }

    SolveOutcome solve(const Program& p, std::optional<std::size_t> cap, SolveMode mode) const override {
        try {
            return internal_.solve(p, cap, mode);
        } catch (const CapacityExceeded&) {
            if (!external_available()) throw;
        } catch (const UnsupportedAggregate&) {
            if (!external_available()) throw;
        }
        return ExternalBackend(*external_).solve(p, cap, mode);
    }

private:
    [[nodiscard]] bool external_available() const { return external_ && !find_executable(external_->executable).empty(); }

    InternalBackend              internal_;
    std::optional<BackendConfig> external_;
};

enum class BackendKind { internal, external, automatic };

/// Builds a backend for `program`. The internal choice grounds the program up front so capacity and
/// aggregate problems surface here; the external choice requires a runnable executable.
inline std::unique_ptr<Backend> select_backend(BackendKind kind, const std::optional<BackendConfig>& cfg, const Program& program) {
    switch (kind) {
        case BackendKind::internal: {
            auto b = std::make_unique<InternalBackend>();
            b->check(program);
            return b;
        }
        case BackendKind::external: {
            BackendConfig c = cfg.value_or(BackendConfig::defaults());
            if (find_executable(c.executable).empty()) throw SpawnFailure("solver executable '" + c.executable + "' not found");
            return std::make_unique<ExternalBackend>(std::move(c));
        }
        case BackendKind::automatic:
            return std::make_unique<AutoBackend>(InternalBackend{}, cfg.value_or(BackendConfig::defaults()));
    }
    throw ValidationError("unknown backend kind");
}

} // namespace asptest
