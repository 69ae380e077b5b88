#pragma once
// Exhaustive answer-set search over a ground program. Correctness first: every candidate
// interpretation is checked against the reduct, nothing is learned between candidates.

#include "ground.hpp"
#include "solve_result.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

namespace asptest {

/// Truth assignment indexed by AtomId.
using Interpretation = std::vector<char>;

inline Interpretation interpretation_of(const GroundProgram& g, const AnswerSet& s) {
    Interpretation in(g.atoms.size(), 0);
    for (const auto& a : s.atoms())
        if (auto id = g.atoms.find(a)) in[*id] = 1;
    return in;
}

inline AnswerSet answer_set_of(const GroundProgram& g, const Interpretation& in) {
    std::vector<Atom> atoms;
    for (AtomId a = 0; a < in.size(); ++a)
        if (in[a]) atoms.push_back(g.atoms.atom(a));
    return AnswerSet(std::move(atoms));
}

inline bool holds(const GroundAggregate& agg, const Interpretation& in) {
    std::set<std::vector<Term>> tuples;
    for (const auto& [tuple, cond] : agg.elements)
        if (in[cond]) tuples.insert(tuple);
    return compare(integer(static_cast<std::int64_t>(tuples.size())), agg.op, agg.guard);
}

template <typename R>
bool body_holds(const R& r, const Interpretation& in) {
    for (auto a : r.pos)
        if (!in[a]) return false;
    for (auto a : r.neg)
        if (in[a]) return false;
    for (const auto& g : r.aggregates)
        if (!holds(g, in)) return false;
    return true;
}

inline bool satisfies(const GroundRule& r, const Interpretation& in) {
    if (!body_holds(r, in)) return true;
    return std::any_of(r.head.begin(), r.head.end(), [&](AtomId h) { return in[h] != 0; });
}

/// Gelfond-Lifschitz reduct: rules whose negative body (or an aggregate, read like negation) is
/// falsified by `i` disappear, the rest lose their negative body and aggregates.
inline GroundProgram reduct(const GroundProgram& g, const AnswerSet& i) {
    Interpretation in = interpretation_of(g, i);
    GroundProgram  out;
    out.atoms   = g.atoms;
    out.certain = g.certain;
    out.open    = g.open;
    for (const auto& r : g.rules) {
        if (std::any_of(r.neg.begin(), r.neg.end(), [&](AtomId a) { return in[a] != 0; })) continue;
        if (!std::all_of(r.aggregates.begin(), r.aggregates.end(), [&](const GroundAggregate& a) { return holds(a, in); }))
            continue;
        out.rules.push_back(GroundRule{r.head, r.pos, {}, {}});
    }
    return out;
}

namespace detail {

/// Tiny DPLL over at most a few dozen variables, clauses as signed literals (+v / -v, 1-based).
class SmallSat {
public:
    explicit SmallSat(std::size_t vars) : assign_(vars + 1, 0) {}
    void add(std::vector<int> clause) { clauses_.push_back(std::move(clause)); }
    bool solve() { return search(); }

private:
    int value(int lit) const {
        int v = assign_[static_cast<std::size_t>(std::abs(lit))];
        return lit > 0 ? v : -v;
    }
    bool search() {
        std::vector<int> trail;
        auto undo = [&] {
            for (int v : trail) assign_[static_cast<std::size_t>(v)] = 0;
        };
        for (bool changed = true; changed;) {
            changed = false;
            for (const auto& c : clauses_) {
                int unassigned = 0, last = 0;
                bool sat = false;
                for (int l : c) {
                    int v = value(l);
                    if (v > 0) {
                        sat = true;
                        break;
                    }
                    if (v == 0) {
                        ++unassigned;
                        last = l;
                    }
                }
                if (sat) continue;
                if (unassigned == 0) {
                    undo();
                    return false;
                }
                if (unassigned == 1) {
                    assign_[static_cast<std::size_t>(std::abs(last))] = last > 0 ? 1 : -1;
                    trail.push_back(std::abs(last));
                    changed = true;
                }
            }
        }
        int pick = 0;
        for (std::size_t v = 1; v < assign_.size(); ++v)
            if (assign_[v] == 0) {
                pick = static_cast<int>(v);
                break;
            }
        if (pick == 0) return true;
        for (int sign : {-1, 1}) {
            assign_[static_cast<std::size_t>(pick)] = static_cast<char>(sign);
            if (search()) return true;
        }
        assign_[static_cast<std::size_t>(pick)] = 0;
        undo();
        return false;
    }

    std::vector<signed char>      assign_;
    std::vector<std::vector<int>> clauses_;
};

/// True iff some proper subset of `in` is a model of the reduct of `g` w.r.t. `in`.
/// Certain atoms belong to every model of the reduct, so only open atoms true in `in` are free.
inline bool has_smaller_model(const GroundProgram& g, const Interpretation& in, const std::vector<char>& is_certain) {
    std::vector<int> var(g.atoms.size(), 0);
    int              n = 0;
    for (auto a : g.open)
        if (in[a]) var[a] = ++n;
    if (n == 0) return false;
    SmallSat sat(static_cast<std::size_t>(n));
    for (const auto& r : g.rules) {
        if (r.head.empty()) continue; // constraints satisfied by `in` stay satisfied on subsets
        if (std::any_of(r.neg.begin(), r.neg.end(), [&](AtomId a) { return in[a] != 0; })) continue;
        if (!std::all_of(r.aggregates.begin(), r.aggregates.end(), [&](const GroundAggregate& a) { return holds(a, in); }))
            continue;
        std::vector<int> clause;
        bool             satisfied = false;
        for (auto b : r.pos) {
            if (!in[b]) satisfied = true; // false in every subset
            else if (var[b]) clause.push_back(-var[b]);
        }
        for (auto h : r.head) {
            if (is_certain[h]) satisfied = true;
            else if (in[h] && var[h]) clause.push_back(var[h]);
        }
        if (satisfied) continue;
        sat.add(std::move(clause));
    }
    std::vector<int> some_false;
    for (int v = 1; v <= n; ++v) some_false.push_back(-v);
    sat.add(std::move(some_false));
    return sat.solve();
}

} // namespace detail

/// Checks `in` (atoms outside the table are ignored) against the answer-set definition:
/// a model of g whose reduct admits no smaller model.
inline bool is_answer_set(const GroundProgram& g, const Interpretation& in) {
    for (const auto& r : g.rules)
        if (!satisfies(r, in)) return false;
    std::vector<char> is_certain(g.atoms.size(), 0);
    for (auto a : g.certain) is_certain[a] = 1;
    for (auto a : g.certain)
        if (!in[a]) return false;
    // atoms that head no rule can never be supported
    std::vector<char> is_open(g.atoms.size(), 0);
    for (auto a : g.open) is_open[a] = 1;
    for (AtomId a = 0; a < in.size(); ++a)
        if (in[a] && !is_certain[a] && !is_open[a]) return false;
    return !detail::has_smaller_model(g, in, is_certain);
}

inline bool is_answer_set(const GroundProgram& g, const AnswerSet& i) {
    for (const auto& a : i.atoms())
        if (!g.atoms.find(a)) return false;
    return is_answer_set(g, interpretation_of(g, i));
}

/// Sum of the costs of the weak constraints at `level` whose body `in` satisfies.
inline std::int64_t penalty(const GroundProgram& g, const Interpretation& in, std::int64_t level) {
    std::int64_t sum = 0;
    for (const auto& w : g.weak_constraints)
        if (w.level == level && body_holds(w, in)) sum += w.cost;
    return sum;
}

inline std::int64_t penalty(const GroundProgram& g, const AnswerSet& m, std::int64_t level) {
    return penalty(g, interpretation_of(g, m), level);
}

/// Levels carrying weak constraints, highest first.
inline std::vector<std::int64_t> weak_levels(const GroundProgram& g) {
    std::set<std::int64_t> levels;
    for (const auto& w : g.weak_constraints) levels.insert(w.level);
    return {levels.rbegin(), levels.rend()};
}

/// Answer sets of `g` in binary-counter order over the open atoms (lowest id is the lowest bit).
/// Stops after `cap` answer sets; `exhausted` then tells whether the scan finished anyway.
inline SolveResult enumerate(const GroundProgram& g, std::optional<std::size_t> cap = std::nullopt) {
    SolveResult res;
    const auto  levels = weak_levels(g);

    Interpretation base(g.atoms.size(), 0);
    for (auto a : g.certain) base[a] = 1;

    // Rules mentioning no open atom evaluate the same for every candidate.
    std::vector<char> is_open(g.atoms.size(), 0);
    for (auto a : g.open) is_open[a] = 1;
    auto touches_open = [&](const GroundRule& r) {
        auto any = [&](const std::vector<AtomId>& v) { return std::any_of(v.begin(), v.end(), [&](AtomId a) { return is_open[a] != 0; }); };
        if (any(r.head) || any(r.pos) || any(r.neg)) return true;
        for (const auto& agg : r.aggregates)
            for (const auto& e : agg.elements)
                if (is_open[e.second]) return true;
        return false;
    };
    std::vector<const GroundRule*> dynamic;
    for (const auto& r : g.rules) {
        if (touches_open(r)) dynamic.push_back(&r);
        else if (!satisfies(r, base)) {
            res.exhausted  = true;
            res.incoherent = true;
            return res;
        }
    }

    std::vector<char> is_certain(g.atoms.size(), 0);
    for (auto a : g.certain) is_certain[a] = 1;

    const std::size_t n     = g.open.size();
    const std::uint64_t end = std::uint64_t{1} << n;
    Interpretation      in  = base;
    for (std::uint64_t mask = 0; mask < end; ++mask) {
        if (cap && res.answer_sets.size() >= *cap) {
            res.exhausted = false;
            return res;
        }
        for (std::size_t i = 0; i < n; ++i) in[g.open[i]] = static_cast<char>((mask >> i) & 1U);
        bool model = std::all_of(dynamic.begin(), dynamic.end(), [&](const GroundRule* r) { return satisfies(*r, in); });
        if (!model || detail::has_smaller_model(g, in, is_certain)) continue;
        std::size_t idx = res.answer_sets.size();
        res.answer_sets.push_back(answer_set_of(g, in));
        for (auto l : levels) res.costs[{idx, l}] = penalty(g, in, l);
    }
    res.exhausted  = true;
    res.incoherent = res.answer_sets.empty();
    return res;
}

/// Cost vector of answer set `idx`, highest level first, over `levels`.
inline std::vector<std::int64_t> cost_vector(const SolveResult& r, std::size_t idx, const std::vector<std::int64_t>& levels) {
    std::vector<std::int64_t> out;
    for (auto l : levels) out.push_back(r.cost(idx, l));
    return out;
}

/// The non-dominated answer sets with their costs; `optimal` is set on a coherent program.
inline SolveResult optimal_answer_sets(const GroundProgram& g) {
    SolveResult all = enumerate(g);
    if (all.incoherent) return all;
    const auto levels = weak_levels(g);
    std::optional<std::vector<std::int64_t>> best;
    for (std::size_t i = 0; i < all.answer_sets.size(); ++i) {
        auto v = cost_vector(all, i, levels);
        if (!best || v < *best) best = v;
    }
    SolveResult out;
    out.exhausted = true;
    out.optimal   = true;
    for (std::size_t i = 0; i < all.answer_sets.size(); ++i) {
        if (cost_vector(all, i, levels) != *best) continue;
        std::size_t idx = out.answer_sets.size();
        out.answer_sets.push_back(all.answer_sets[i]);
        for (auto l : levels) out.costs[{idx, l}] = all.cost(i, l);
    }
    return out;
}

} // namespace asptest
