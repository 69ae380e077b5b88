#pragma once
// Single-point program mutations and the kill analysis that scores a test suite against them.

#include "engine.hpp"
#include "error.hpp"
#include "model.hpp"
#include "serialize.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace asptest {

enum class MutationKind {
    rename_predicates,
    delete_rule,
    delete_literal,
    add_default_negation,
    swap_terms,
    change_aggregates,
    change_math_operators,
    swap_default_negation,
};

inline constexpr MutationKind all_mutation_kinds[] = {
    MutationKind::rename_predicates,    MutationKind::delete_rule, MutationKind::delete_literal,
    MutationKind::add_default_negation, MutationKind::swap_terms,  MutationKind::change_aggregates,
    MutationKind::change_math_operators, MutationKind::swap_default_negation,
};

inline const char* to_string(MutationKind k) {
    switch (k) {
        case MutationKind::rename_predicates: return "renamePredicates";
        case MutationKind::delete_rule: return "deleteRule";
        case MutationKind::delete_literal: return "deleteLiteral";
        case MutationKind::add_default_negation: return "addDefaultNegation";
        case MutationKind::swap_terms: return "swapTerms";
        case MutationKind::change_aggregates: return "changeAggregates";
        case MutationKind::change_math_operators: return "changeMathOperators";
        case MutationKind::swap_default_negation: return "swapDefaultNegation";
    }
    return "?";
}

inline MutationKind parse_mutation_kind(const std::string& name) {
    for (auto k : all_mutation_kinds)
        if (name == to_string(k)) return k;
    throw ValidationError("unknown mutation operator '" + name + "'");
}

/// One mutation with its locus. `site` numbers the atom occurrences of a rule: head atoms first,
/// then body literals (an aggregate counts through its condition atom).
struct MutationOp {
    MutationKind kind = MutationKind::delete_rule;
    std::size_t  rule = 0;
    std::size_t  site = 0;       ///< atom occurrence or body literal index, depending on kind
    std::size_t  arg_a = 0, arg_b = 0; ///< swapTerms positions
    std::string  to;             ///< renamePredicates target name

    friend auto operator<=>(const MutationOp&, const MutationOp&) = default;
};

inline std::string to_string(const MutationOp& op) {
    std::string s = std::string(to_string(op.kind)) + "(rule " + std::to_string(op.rule);
    switch (op.kind) {
        case MutationKind::delete_rule: break;
        case MutationKind::rename_predicates: s += ", site " + std::to_string(op.site) + ", to " + op.to; break;
        case MutationKind::swap_terms:
            s += ", site " + std::to_string(op.site) + ", args " + std::to_string(op.arg_a) + "<->" + std::to_string(op.arg_b);
            break;
        default: s += ", literal " + std::to_string(op.site); break;
    }
    return s + ")";
}

enum class ApplyStatus { applied, inapplicable, unsafe };

struct ApplyResult {
    ApplyStatus status = ApplyStatus::inapplicable;
    Program     program;
};

namespace detail {

inline std::size_t site_count(const Rule& r) { return r.head.size() + r.body.size(); }

/// Atom at occurrence `site` of `r`, or null for comparison literals.
inline Atom* site_atom(Rule& r, std::size_t site) {
    if (site < r.head.size()) return &r.head[site];
    auto& l = r.body.at(site - r.head.size());
    if (auto* a = std::get_if<Atom>(&l.payload)) return a;
    if (auto* g = std::get_if<CountAggregate>(&l.payload)) return &g->condition;
    return nullptr;
}

inline CompareOp adjacent(CompareOp op) {
    switch (op) {
        case CompareOp::eq: return CompareOp::ne;
        case CompareOp::ne: return CompareOp::eq;
        case CompareOp::lt: return CompareOp::le;
        case CompareOp::le: return CompareOp::lt;
        case CompareOp::gt: return CompareOp::ge;
        case CompareOp::ge: return CompareOp::gt;
    }
    return op;
}

} // namespace detail

/// Every locus of `kind` in `p`, in a fixed order.
inline std::vector<MutationOp> mutation_loci(const Program& p, MutationKind kind) {
    std::vector<MutationOp> out;
    std::map<std::size_t, std::set<std::string>> by_arity;
    for (const auto& [name, arity] : predicate_signatures(p)) by_arity[arity].insert(name);
    auto names = predicate_names(p);

    for (std::size_t i = 0; i < p.rules.size(); ++i) {
        Rule r = p.rules[i];
        switch (kind) {
            case MutationKind::delete_rule: out.push_back({kind, i, 0, 0, 0, {}}); break;
            case MutationKind::rename_predicates:
                for (std::size_t s = 0; s < detail::site_count(r); ++s) {
                    const Atom* a = detail::site_atom(r, s);
                    if (!a) continue;
                    bool any = false;
                    for (const auto& other : by_arity[a->arity()]) {
                        if (other == a->predicate) continue;
                        out.push_back({kind, i, s, 0, 0, other});
                        any = true;
                    }
                    if (!any) out.push_back({kind, i, s, 0, 0, fresh_predicate(names, "renamed")});
                }
                break;
            case MutationKind::swap_terms:
                for (std::size_t s = 0; s < detail::site_count(r); ++s) {
                    const Atom* a = detail::site_atom(r, s);
                    if (!a) continue;
                    for (std::size_t x = 0; x < a->args.size(); ++x)
                        for (std::size_t y = x + 1; y < a->args.size(); ++y)
                            if (!(a->args[x] == a->args[y])) out.push_back({kind, i, s, x, y, {}});
                }
                break;
            default:
                for (std::size_t j = 0; j < r.body.size(); ++j) {
                    const auto& l  = r.body[j];
                    bool        ok = false;
                    switch (kind) {
                        case MutationKind::delete_literal: ok = !(r.head.empty() && r.body.size() == 1); break;
                        case MutationKind::add_default_negation: ok = l.atom() && !l.negated; break;
                        case MutationKind::swap_default_negation: ok = l.atom() != nullptr; break;
                        case MutationKind::change_aggregates: ok = l.aggregate() != nullptr; break;
                        case MutationKind::change_math_operators: ok = l.comparison() != nullptr; break;
                        default: break;
                    }
                    if (ok) out.push_back({kind, i, j, 0, 0, {}});
                }
        }
    }
    return out;
}

/// Applies `op`; the rule count only changes for deleteRule. Unsafe results are reported, not returned as applied.
inline ApplyResult apply_op(const Program& p, const MutationOp& op) {
    ApplyResult res;
    res.program = p;
    if (op.rule >= p.rules.size()) return res;
    auto& rules = res.program.rules;
    Rule& r     = rules[op.rule];
    switch (op.kind) {
        case MutationKind::delete_rule:
            rules.erase(rules.begin() + static_cast<std::ptrdiff_t>(op.rule));
            res.status = ApplyStatus::applied;
            return res;
        case MutationKind::rename_predicates: {
            if (op.site >= detail::site_count(r) || op.to.empty()) return res;
            Atom* a = detail::site_atom(r, op.site);
            if (!a || a->predicate == op.to) return res;
            a->predicate = op.to;
            break;
        }
        case MutationKind::swap_terms: {
            if (op.site >= detail::site_count(r)) return res;
            Atom* a = detail::site_atom(r, op.site);
            if (!a || op.arg_a >= a->args.size() || op.arg_b >= a->args.size() || a->args[op.arg_a] == a->args[op.arg_b]) return res;
            std::swap(a->args[op.arg_a], a->args[op.arg_b]);
            break;
        }
        default: {
            if (op.site >= r.body.size()) return res;
            auto& l = r.body[op.site];
            switch (op.kind) {
                case MutationKind::delete_literal:
                    if (r.head.empty() && r.body.size() == 1) return res;
                    r.body.erase(r.body.begin() + static_cast<std::ptrdiff_t>(op.site));
                    break;
                case MutationKind::add_default_negation:
                    if (!l.atom() || l.negated) return res;
                    l.negated = true;
                    break;
                case MutationKind::swap_default_negation:
                    if (!l.atom()) return res;
                    l.negated = !l.negated;
                    break;
                case MutationKind::change_aggregates:
                    if (auto* g = std::get_if<CountAggregate>(&l.payload)) g->op = detail::adjacent(g->op);
                    else return res;
                    break;
                case MutationKind::change_math_operators:
                    if (auto* c = std::get_if<Comparison>(&l.payload)) c->op = detail::adjacent(c->op);
                    else return res;
                    break;
                default: return res;
            }
        }
    }
    res.status = is_safe(r) ? ApplyStatus::applied : ApplyStatus::unsafe;
    return res;
}

struct Mutant {
    std::string              id;
    std::vector<MutationOp>  ops;
    Program                  program;
    std::uint64_t            seed = 0;
    /// original rule index of every rule of `program`
    std::vector<std::size_t> sources;
};

class ExhaustedLoci : public Error {
public:
    ExhaustedLoci(std::size_t wanted, std::vector<Mutant> partial)
        : Error("only " + std::to_string(partial.size()) + " distinct valid mutants exist, " + std::to_string(wanted) + " requested"),
          partial(std::move(partial)) {}
    std::vector<Mutant> partial;
};

/// Up to `count` distinct safe mutants, each made of `ops_per_mutant` random single-point mutations.
/// The same arguments always give the same mutants. Throws ExhaustedLoci (carrying what was found)
/// when fewer distinct mutants exist.
inline std::vector<Mutant> generate_mutants(const Program& p, const std::vector<MutationKind>& kinds, std::size_t count,
                                            std::uint64_t seed, std::size_t ops_per_mutant = 1) {
    if (count == 0) throw ValidationError("mutant count must be at least 1");
    if (ops_per_mutant == 0) throw ValidationError("ops per mutant must be at least 1");
    std::mt19937_64          rng(seed);
    std::vector<Mutant>      out;
    std::set<std::string>    seen{serialize_program(p)};
    std::set<std::vector<MutationOp>> tried;

    // single-point candidates are finite: stop once every one has been drawn
    std::size_t single_total = 0;
    for (auto k : kinds) single_total += mutation_loci(p, k).size();
    std::size_t attempts = 0, budget = 200 + 50 * count + 4 * single_total;

    while (out.size() < count && attempts++ < budget) {
        if (ops_per_mutant == 1 && tried.size() >= single_total) break;
        Program                  cur = p;
        std::vector<std::size_t> sources(p.rules.size());
        for (std::size_t i = 0; i < sources.size(); ++i) sources[i] = i;
        std::vector<MutationOp> ops;
        bool                    valid = true;
        for (std::size_t step = 0; step < ops_per_mutant && valid; ++step) {
            std::vector<std::pair<MutationKind, std::vector<MutationOp>>> applicable;
            for (auto k : kinds) {
                auto loci = mutation_loci(cur, k);
                if (!loci.empty()) applicable.emplace_back(k, std::move(loci));
            }
            if (applicable.empty()) {
                valid = false;
                break;
            }
            const auto& [kind, loci] = applicable[rng() % applicable.size()];
            MutationOp op            = loci[rng() % loci.size()];
            auto       res           = apply_op(cur, op);
            ops.push_back(op);
            if (res.status != ApplyStatus::applied) {
                valid = false;
                break;
            }
            if (op.kind == MutationKind::delete_rule) sources.erase(sources.begin() + static_cast<std::ptrdiff_t>(op.rule));
            cur = std::move(res.program);
        }
        tried.insert(ops);
        if (!valid || ops.size() != ops_per_mutant) continue;
        if (!seen.insert(serialize_program(cur)).second) continue;
        char id[16];
        std::snprintf(id, sizeof id, "m%02zu", out.size() + 1);
        out.push_back(Mutant{id, std::move(ops), std::move(cur), seed, std::move(sources)});
    }
    if (out.size() < count) throw ExhaustedLoci(count, std::move(out));
    return out;
}

// ---------------------------------------------------------------------------
// Analysis

/// The named rules of a unit that mutations act on, in declaration order, and their names.
struct MutationTarget {
    Program                  program;
    std::vector<std::string> names;
};

inline MutationTarget mutation_target(const TestSuite& suite) {
    MutationTarget t;
    for (const auto& name : suite.rule_order) {
        if (const auto* r = std::get_if<Rule>(&suite.named_rules.at(name).statement)) {
            t.program.rules.push_back(*r);
            t.names.push_back(name);
        }
    }
    return t;
}

/// The suite with the mutant's rules in place of the originals.
inline TestSuite apply_mutant(const TestSuite& suite, const MutationTarget& target, const Mutant& m) {
    TestSuite out = suite;
    std::vector<char> kept(target.names.size(), 0);
    for (std::size_t j = 0; j < m.sources.size(); ++j) {
        kept[m.sources[j]] = 1;
        auto& nr           = out.named_rules.at(target.names[m.sources[j]]);
        Rule  r            = m.program.rules[j];
        r.origin           = std::get<Rule>(nr.statement).origin;
        nr.statement       = std::move(r);
    }
    for (std::size_t i = 0; i < kept.size(); ++i)
        if (!kept[i]) out.named_rules.at(target.names[i]).removed = true;
    return out;
}

enum class MutantStatus { killed, survived, inconclusive };

inline const char* to_string(MutantStatus s) {
    switch (s) {
        case MutantStatus::killed: return "killed";
        case MutantStatus::survived: return "survived";
        case MutantStatus::inconclusive: return "inconclusive";
    }
    return "?";
}

struct MutantOutcome {
    std::string              id;
    std::vector<std::string> ops; ///< described with rule names
    MutantStatus             status = MutantStatus::survived;
    std::vector<std::string> killed_by; ///< "test#assertion-index" of failing assertions
    std::string              program;   ///< serialized mutated rules
};

struct KillReport {
    bool                       baseline_passed = false;
    SuiteReport                baseline;
    std::vector<MutantOutcome> mutants;
    /// "test#assertion-index" -> number of mutants on which it failed
    std::map<std::string, std::size_t> failures_per_assertion;

    [[nodiscard]] std::size_t count(MutantStatus s) const {
        return static_cast<std::size_t>(std::count_if(mutants.begin(), mutants.end(), [&](const MutantOutcome& m) { return m.status == s; }));
    }
    [[nodiscard]] bool all_killed() const { return baseline_passed && count(MutantStatus::killed) == mutants.size(); }
};

inline std::string describe(const MutationOp& op, const MutationTarget& t, const std::vector<std::size_t>& sources_before) {
    std::string s = to_string(op);
    if (op.rule < sources_before.size()) s += " on " + t.names[sources_before[op.rule]];
    return s;
}

/// Runs every test against every mutant. Refuses (baseline_passed = false, no mutants run) unless the
/// original suite passes. A mutant is killed when some assertion fails on it.
inline KillReport mutation_analysis(const SourceUnit& unit, const std::vector<Mutant>& mutants, const Backend& backend,
                                    std::size_t jobs = 1) {
    KillReport report;
    report.baseline        = run_suite(unit, backend, jobs);
    report.baseline_passed = report.baseline.verdict() == Verdict::pass;
    if (!report.baseline_passed) return report;

    auto target = mutation_target(unit.suite);
    auto ctx    = context_for(unit);
    report.mutants = parallel_map<MutantOutcome>(mutants.size(), jobs, [&](std::size_t i) {
        const auto&   m = mutants[i];
        MutantOutcome o;
        o.id      = m.id;
        o.program = serialize_program(m.program);
        // replay the ops to name the rules they touched
        std::vector<std::size_t> sources(target.names.size());
        for (std::size_t k = 0; k < sources.size(); ++k) sources[k] = k;
        for (const auto& op : m.ops) {
            o.ops.push_back(describe(op, target, sources));
            if (op.kind == MutationKind::delete_rule && op.rule < sources.size())
                sources.erase(sources.begin() + static_cast<std::ptrdiff_t>(op.rule));
        }
        SourceUnit mu = unit;
        mu.suite      = apply_mutant(unit.suite, target, m);
        auto r        = run_suite(mu, backend, 1, ctx);
        bool unsure   = false;
        for (const auto& t : r.tests) {
            for (std::size_t a = 0; a < t.assertions.size(); ++a) {
                auto v = t.assertions[a].verdict;
                if (v == Verdict::fail) o.killed_by.push_back(t.name + "#" + std::to_string(a));
                else if (v != Verdict::pass) unsure = true;
            }
        }
        o.status = !o.killed_by.empty() ? MutantStatus::killed : unsure ? MutantStatus::inconclusive : MutantStatus::survived;
        return o;
    });
    for (const auto& t : report.baseline.tests)
        for (std::size_t a = 0; a < t.assertions.size(); ++a) report.failures_per_assertion[t.name + "#" + std::to_string(a)] = 0;
    for (const auto& m : report.mutants)
        for (const auto& k : m.killed_by) ++report.failures_per_assertion[k];
    return report;
}

} // namespace asptest
