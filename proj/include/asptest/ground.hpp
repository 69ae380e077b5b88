#pragma once
// Instantiation of safe programs into variable-free rules over a dense atom table.

#include "error.hpp"
#include "model.hpp"
#include "serialize.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace asptest {

using AtomId = std::uint32_t;

struct GroundAggregate {
    CompareOp op = CompareOp::eq;
    Term      guard;
    /// (tuple, condition atom); elements whose condition can never hold are omitted
    std::vector<std::pair<std::vector<Term>, AtomId>> elements;

    friend auto operator<=>(const GroundAggregate&, const GroundAggregate&) = default;
};

struct GroundRule {
    std::vector<AtomId>          head;
    std::vector<AtomId>          pos;
    std::vector<AtomId>          neg;
    std::vector<GroundAggregate> aggregates;

    friend auto operator<=>(const GroundRule&, const GroundRule&) = default;
};

struct GroundWeak {
    std::vector<AtomId>          pos;
    std::vector<AtomId>          neg;
    std::vector<GroundAggregate> aggregates;
    std::int64_t                 cost  = 0;
    std::int64_t                 level = 0;
    std::size_t                  source = 0; ///< index of the weak constraint it instantiates

    friend auto operator<=>(const GroundWeak&, const GroundWeak&) = default;
};

/// Bijection between ground atoms and dense ids; ids follow the atom order.
class AtomTable {
public:
    AtomTable() = default;
    explicit AtomTable(const std::set<Atom>& atoms) : atoms_(atoms.begin(), atoms.end()) {}

    [[nodiscard]] std::size_t size() const { return atoms_.size(); }
    [[nodiscard]] const Atom& atom(AtomId id) const { return atoms_[id]; }
    [[nodiscard]] const std::vector<Atom>& atoms() const { return atoms_; }
    [[nodiscard]] std::optional<AtomId> find(const Atom& a) const {
        auto it = std::lower_bound(atoms_.begin(), atoms_.end(), a);
        if (it == atoms_.end() || !(*it == a)) return std::nullopt;
        return static_cast<AtomId>(it - atoms_.begin());
    }
    [[nodiscard]] AtomId id(const Atom& a) const { return *find(a); }

private:
    std::vector<Atom> atoms_;
};

struct GroundProgram {
    std::vector<GroundRule> rules;
    std::vector<GroundWeak> weak_constraints;
    AtomTable               atoms;
    /// Atoms derivable from facts through definite rules: true in every answer set.
    std::vector<AtomId> certain;
    /// Atoms left open for enumeration: rule heads that are not certain, ascending id order.
    std::vector<AtomId> open;

    /// The ground rules as AST, for display and comparison.
    [[nodiscard]] Program to_program() const {
        Program p;
        auto    lit_body = [&](const std::vector<AtomId>& pos, const std::vector<AtomId>& neg,
                            const std::vector<GroundAggregate>& aggs) {
            std::vector<Literal> body;
            for (auto a : pos) body.push_back(asptest::pos(atoms.atom(a)));
            for (auto a : neg) body.push_back(asptest::neg(atoms.atom(a)));
            for (const auto& g : aggs) {
                // a ground aggregate has no single condition atom; render element-wise
                for (const auto& [tuple, a] : g.elements)
                    body.push_back(Literal{false, CountAggregate{tuple, atoms.atom(a), g.op, g.guard}});
                if (g.elements.empty())
                    body.push_back(Literal{false, CountAggregate{{integer(0)}, Atom{"__tk_false", {}}, g.op, g.guard}});
            }
            return body;
        };
        for (const auto& r : rules) {
            Rule out;
            for (auto h : r.head) out.head.push_back(atoms.atom(h));
            out.body = lit_body(r.pos, r.neg, r.aggregates);
            p.rules.push_back(std::move(out));
        }
        for (const auto& w : weak_constraints) {
            WeakConstraint out;
            out.body  = lit_body(w.pos, w.neg, w.aggregates);
            out.cost  = w.cost;
            out.level = w.level;
            p.weak_constraints.push_back(std::move(out));
        }
        return p;
    }
};

enum class GroundingMode {
    /// Instantiate against the atoms a rule head can possibly derive.
    simplified,
    /// Instantiate every variable over the whole Herbrand universe.
    naive,
};

struct Capacity {
    std::size_t max_open_atoms = 22;
    std::size_t max_rules      = 5000;
};

namespace detail {

using Substitution = std::map<std::string, Term>;

inline Term substitute(const Term& t, const Substitution& s) {
    if (auto* v = std::get_if<Variable>(&t)) {
        auto it = s.find(v->name);
        if (it != s.end()) return it->second;
    }
    return t;
}

inline Atom substitute(const Atom& a, const Substitution& s) {
    Atom out{a.predicate, {}};
    out.args.reserve(a.args.size());
    for (const auto& t : a.args) out.args.push_back(substitute(t, s));
    return out;
}

/// Extends `s` so that `pattern` instantiates to `ground`; false on mismatch.
inline bool match(const Atom& pattern, const Atom& ground, Substitution& s) {
    if (pattern.predicate != ground.predicate || pattern.args.size() != ground.args.size()) return false;
    for (std::size_t i = 0; i < pattern.args.size(); ++i) {
        const Term& p = pattern.args[i];
        if (auto* v = std::get_if<Variable>(&p)) {
            auto [it, fresh] = s.emplace(v->name, ground.args[i]);
            if (!fresh && !(it->second == ground.args[i])) return false;
        }
        else if (!(p == ground.args[i])) {
            return false;
        }
    }
    return true;
}

/// Ground atoms grouped by (predicate, arity).
class AtomStore {
public:
    bool insert(const Atom& a) {
        if (!all_.insert(a).second) return false;
        by_sig_[{a.predicate, a.arity()}].push_back(a);
        return true;
    }
    [[nodiscard]] bool contains(const Atom& a) const { return all_.count(a) != 0; }
    [[nodiscard]] const std::vector<Atom>& with_signature(const Atom& pattern) const {
        static const std::vector<Atom> none;
        auto it = by_sig_.find({pattern.predicate, pattern.arity()});
        return it == by_sig_.end() ? none : it->second;
    }
    [[nodiscard]] const std::set<Atom>& all() const { return all_; }

private:
    std::set<Atom>                                                   all_;
    std::map<std::pair<std::string, std::size_t>, std::vector<Atom>> by_sig_;
};

inline bool holds(const Comparison& c, const Substitution& s) { return compare(substitute(c.lhs, s), c.op, substitute(c.rhs, s)); }

/// Every substitution binding the positive atoms of `body` to atoms of `store`, filtered by comparisons.
inline void join(const std::vector<Literal>& body, const AtomStore& store, const std::function<void(const Substitution&)>& emit) {
    std::vector<const Atom*>       positives;
    std::vector<const Comparison*> comparisons;
    for (const auto& l : body) {
        if (auto* a = l.atom(); a && !l.negated) positives.push_back(a);
        else if (auto* c = l.comparison()) comparisons.push_back(c);
    }
    Substitution s;
    std::function<void(std::size_t)> step = [&](std::size_t i) {
        if (i == positives.size()) {
            for (auto* c : comparisons)
                if (!holds(*c, s)) return;
            emit(s);
            return;
        }
        for (const auto& candidate : store.with_signature(*positives[i])) {
            Substitution saved = s;
            if (match(*positives[i], candidate, s)) step(i + 1);
            s = std::move(saved);
        }
    };
    step(0);
}

/// Every assignment of `vars` over `universe`, filtered by the comparisons of `body`.
inline void enumerate_assignments(const std::vector<std::string>& vars, const std::vector<Term>& universe,
                                  const std::vector<Literal>& body, const std::function<void(const Substitution&)>& emit) {
    Substitution s;
    std::function<void(std::size_t)> step = [&](std::size_t i) {
        if (i == vars.size()) {
            for (const auto& l : body)
                if (auto* c = l.comparison(); c && !holds(*c, s)) return;
            emit(s);
            return;
        }
        for (const auto& t : universe) {
            s[vars[i]] = t;
            step(i + 1);
        }
        s.erase(vars[i]);
    };
    step(0);
}

inline std::vector<std::string> global_variables(const std::vector<Atom>& head, const std::vector<Literal>& body) {
    std::set<std::string> vs;
    for (const auto& a : head) collect_vars(a, vs);
    for (const auto& l : body) {
        if (auto* a = l.atom()) collect_vars(*a, vs);
        else if (auto* c = l.comparison()) {
            collect_vars(c->lhs, vs);
            collect_vars(c->rhs, vs);
        }
        else if (auto* g = l.aggregate()) collect_vars(g->guard, vs);
    }
    // variables occurring only inside aggregate elements are local to each aggregate
    return {vs.begin(), vs.end()};
}

/// Predicates whose aggregate condition depends on the head of the rule containing the aggregate.
inline void check_aggregate_recursion(const Program& p) {
    std::map<std::string, std::set<std::string>> deps;
    auto sig = [](const Atom& a) { return a.predicate + '/' + std::to_string(a.arity()); };
    for (const auto& r : p.rules) {
        for (const auto& h : r.head) {
            auto& d = deps[sig(h)];
            for (const auto& l : r.body) {
                if (auto* a = l.atom()) d.insert(sig(*a));
                else if (auto* g = l.aggregate()) d.insert(sig(g->condition));
            }
        }
    }
    auto reaches = [&](const std::string& from, const std::set<std::string>& targets) {
        std::set<std::string>    seen{from};
        std::vector<std::string> todo{from};
        while (!todo.empty()) {
            auto cur = todo.back();
            todo.pop_back();
            if (targets.count(cur)) return true;
            for (const auto& n : deps[cur])
                if (seen.insert(n).second) todo.push_back(n);
        }
        return false;
    };
    for (const auto& r : p.rules) {
        if (r.head.empty()) continue;
        std::set<std::string> heads;
        for (const auto& h : r.head) heads.insert(sig(h));
        for (const auto& l : r.body) {
            if (auto* g = l.aggregate(); g && reaches(sig(g->condition), heads))
                throw UnsupportedAggregate("recursive aggregate in '" + to_string(r) +
                                           "' is not supported by the internal oracle");
        }
    }
}

} // namespace detail

/// Grounds a safe program. Throws CapacityExceeded when the open atoms or the ground rules exceed `cap`,
/// and UnsupportedAggregate for aggregates whose condition depends on the head of their own rule.
inline GroundProgram ground(const Program& p, GroundingMode mode = GroundingMode::simplified, Capacity cap = {}) {
    using namespace detail;
    check_aggregate_recursion(p);

    const std::set<Term>    universe_set = herbrand_universe(p);
    const std::vector<Term> universe(universe_set.begin(), universe_set.end());

    // Possible atoms: heads derivable while ignoring negation and aggregates.
    AtomStore possible;
    if (mode == GroundingMode::simplified) {
        for (bool changed = true; changed;) {
            changed = false;
            for (const auto& r : p.rules) {
                if (r.head.empty()) continue;
                join(r.body, possible, [&](const Substitution& s) {
                    for (const auto& h : r.head) changed |= possible.insert(substitute(h, s));
                });
            }
        }
    }

    struct RawBody {
        std::vector<Atom> pos, neg;
        struct Agg {
            CompareOp                                       op;
            Term                                            guard;
            std::vector<std::pair<std::vector<Term>, Atom>> elements;
        };
        std::vector<Agg> aggs;
    };
    std::set<Atom> base;
    std::vector<std::pair<std::vector<Atom>, RawBody>> raw_rules;
    std::vector<std::tuple<RawBody, std::int64_t, std::int64_t, std::size_t>> raw_weak;
    std::size_t instances = 0;

    auto instantiate_body = [&](const std::vector<Literal>& body, const Substitution& s) {
        RawBody out;
        for (const auto& l : body) {
            if (auto* a = l.atom()) {
                Atom g = substitute(*a, s);
                base.insert(g);
                (l.negated ? out.neg : out.pos).push_back(std::move(g));
            }
            else if (auto* agg = l.aggregate()) {
                RawBody::Agg ga{agg->op, substitute(agg->guard, s), {}};
                Atom         cond = substitute(agg->condition, s);
                auto add = [&](const Substitution& local) {
                    Atom              c = substitute(cond, local);
                    std::vector<Term> tuple;
                    for (const auto& t : agg->tuple) tuple.push_back(substitute(substitute(t, s), local));
                    if (mode == GroundingMode::simplified && !possible.contains(c)) return;
                    base.insert(c);
                    ga.elements.emplace_back(std::move(tuple), std::move(c));
                };
                if (mode == GroundingMode::simplified) {
                    for (const auto& candidate : possible.with_signature(cond)) {
                        Substitution local;
                        if (match(cond, candidate, local)) add(local);
                    }
                }
                else {
                    std::set<std::string> locals;
                    collect_vars(cond, locals);
                    for (const auto& t : agg->tuple) collect_vars(substitute(t, s), locals);
                    enumerate_assignments({locals.begin(), locals.end()}, universe, {}, add);
                }
                std::sort(ga.elements.begin(), ga.elements.end());
                ga.elements.erase(std::unique(ga.elements.begin(), ga.elements.end()), ga.elements.end());
                out.aggs.push_back(std::move(ga));
            }
        }
        return out;
    };

    auto for_each_instance = [&](const std::vector<Atom>& head, const std::vector<Literal>& body,
                                 const std::function<void(const Substitution&)>& emit) {
        auto guarded = [&](const Substitution& s) {
            if (++instances > cap.max_rules * 4 + 100000) throw CapacityExceeded(0, instances, cap.max_open_atoms, cap.max_rules);
            emit(s);
        };
        if (mode == GroundingMode::simplified) join(body, possible, guarded);
        else enumerate_assignments(global_variables(head, body), universe, body, guarded);
    };

    for (const auto& r : p.rules) {
        for_each_instance(r.head, r.body, [&](const Substitution& s) {
            std::vector<Atom> head;
            for (const auto& h : r.head) {
                head.push_back(substitute(h, s));
                base.insert(head.back());
            }
            raw_rules.emplace_back(std::move(head), instantiate_body(r.body, s));
        });
    }
    for (std::size_t i = 0; i < p.weak_constraints.size(); ++i) {
        const auto& w = p.weak_constraints[i];
        for_each_instance({}, w.body, [&](const Substitution& s) {
            raw_weak.emplace_back(instantiate_body(w.body, s), w.cost, w.level, i);
        });
    }

    GroundProgram g;
    g.atoms = AtomTable(base);
    auto ids = [&](const std::vector<Atom>& as) {
        std::vector<AtomId> out;
        for (const auto& a : as) out.push_back(g.atoms.id(a));
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    };
    auto aggs = [&](const RawBody& b) {
        std::vector<GroundAggregate> out;
        for (const auto& a : b.aggs) {
            GroundAggregate ga{a.op, a.guard, {}};
            for (const auto& [tuple, atom] : a.elements) ga.elements.emplace_back(tuple, g.atoms.id(atom));
            out.push_back(std::move(ga));
        }
        return out;
    };
    std::set<GroundRule> seen_rules;
    for (const auto& [head, body] : raw_rules) {
        GroundRule gr{ids(head), ids(body.pos), ids(body.neg), aggs(body)};
        if (seen_rules.insert(gr).second) g.rules.push_back(std::move(gr));
    }
    // Distinct ground instances of one weak constraint are charged separately; identical
    // instances arising from the same statement are one instance.
    std::set<GroundWeak> seen_weak;
    for (const auto& [body, cost, level, source] : raw_weak) {
        GroundWeak gw{ids(body.pos), ids(body.neg), aggs(body), cost, level, source};
        if (seen_weak.insert(gw).second) g.weak_constraints.push_back(std::move(gw));
    }

    // Certain atoms: least model of the definite rules.
    std::vector<char> certain(g.atoms.size(), 0);
    for (bool changed = true; changed;) {
        changed = false;
        for (const auto& r : g.rules) {
            if (r.head.size() != 1 || !r.neg.empty() || !r.aggregates.empty() || certain[r.head[0]]) continue;
            if (std::all_of(r.pos.begin(), r.pos.end(), [&](AtomId a) { return certain[a]; })) {
                certain[r.head[0]] = 1;
                changed            = true;
            }
        }
    }
    std::vector<char> in_head(g.atoms.size(), 0);
    for (const auto& r : g.rules)
        for (auto h : r.head) in_head[h] = 1;
    for (AtomId a = 0; a < g.atoms.size(); ++a) {
        if (certain[a]) g.certain.push_back(a);
        else if (in_head[a]) g.open.push_back(a);
    }
    if (g.open.size() > cap.max_open_atoms || g.rules.size() + g.weak_constraints.size() > cap.max_rules)
        throw CapacityExceeded(g.open.size(), g.rules.size() + g.weak_constraints.size(), cap.max_open_atoms, cap.max_rules);
    return g;
}

} // namespace asptest
