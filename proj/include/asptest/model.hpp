#pragma once
// Abstract syntax of programs and test annotations, plus the Herbrand helpers shared by all modules.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace asptest {

struct IntegerConstant {
    std::int64_t value = 0;
    friend auto operator<=>(const IntegerConstant&, const IntegerConstant&) = default;
};

struct SymbolicConstant {
    std::string name;
    friend auto operator<=>(const SymbolicConstant&, const SymbolicConstant&) = default;
};

struct Variable {
    std::string name;
    friend auto operator<=>(const Variable&, const Variable&) = default;
};

/// Alternative order fixes the total order on constants: integers, then symbols (bytewise), then variables.
using Term = std::variant<IntegerConstant, SymbolicConstant, Variable>;

inline Term integer(std::int64_t v) { return IntegerConstant{v}; }
inline Term symbol(std::string n) { return SymbolicConstant{std::move(n)}; }
inline Term variable(std::string n) { return Variable{std::move(n)}; }

inline bool is_variable(const Term& t) { return std::holds_alternative<Variable>(t); }

struct Atom {
    std::string       predicate;
    std::vector<Term> args;

    [[nodiscard]] std::size_t arity() const { return args.size(); }
    [[nodiscard]] bool        is_ground() const { return std::none_of(args.begin(), args.end(), is_variable); }

    friend auto operator<=>(const Atom&, const Atom&) = default;
    friend bool operator==(const Atom&, const Atom&)  = default;
};

enum class CompareOp { eq, ne, lt, le, gt, ge };

inline const char* to_string(CompareOp op) {
    switch (op) {
        case CompareOp::eq: return "=";
        case CompareOp::ne: return "<>";
        case CompareOp::lt: return "<";
        case CompareOp::le: return "<=";
        case CompareOp::gt: return ">";
        case CompareOp::ge: return ">=";
    }
    return "?";
}

template <typename T>
bool compare(const T& lhs, CompareOp op, const T& rhs) {
    switch (op) {
        case CompareOp::eq: return lhs == rhs;
        case CompareOp::ne: return !(lhs == rhs);
        case CompareOp::lt: return lhs < rhs;
        case CompareOp::le: return !(rhs < lhs);
        case CompareOp::gt: return rhs < lhs;
        case CompareOp::ge: return !(lhs < rhs);
    }
    return false;
}

struct Comparison {
    Term      lhs;
    CompareOp op = CompareOp::eq;
    Term      rhs;
    friend bool operator==(const Comparison&, const Comparison&) = default;
};

/// `#count{tuple : condition} op guard`, guard on the right only.
struct CountAggregate {
    std::vector<Term> tuple;
    Atom              condition;
    CompareOp         op = CompareOp::eq;
    Term              guard;
    friend bool operator==(const CountAggregate&, const CountAggregate&) = default;
};

struct Literal {
    bool                                             negated = false;
    std::variant<Atom, Comparison, CountAggregate> payload;

    [[nodiscard]] const Atom*           atom() const { return std::get_if<Atom>(&payload); }
    [[nodiscard]] Atom*                 atom() { return std::get_if<Atom>(&payload); }
    [[nodiscard]] const Comparison*     comparison() const { return std::get_if<Comparison>(&payload); }
    [[nodiscard]] const CountAggregate* aggregate() const { return std::get_if<CountAggregate>(&payload); }

    friend bool operator==(const Literal&, const Literal&) = default;
};

inline Literal pos(Atom a) { return Literal{false, std::move(a)}; }
inline Literal neg(Atom a) { return Literal{true, std::move(a)}; }

struct SourceSpan {
    std::string file;
    int         line   = 0;
    int         column = 0;
};

/// Source spans never take part in equality.
struct Rule {
    std::vector<Atom>    head;
    std::vector<Literal> body;
    SourceSpan           origin;

    [[nodiscard]] bool is_constraint() const { return head.empty(); }
    [[nodiscard]] bool is_fact() const { return head.size() == 1 && body.empty(); }

    friend bool operator==(const Rule& a, const Rule& b) { return a.head == b.head && a.body == b.body; }
};

struct WeakConstraint {
    std::vector<Literal> body;
    std::int64_t         cost  = 0;
    std::int64_t         level = 0;
    SourceSpan           origin;

    friend bool operator==(const WeakConstraint& a, const WeakConstraint& b) {
        return a.body == b.body && a.cost == b.cost && a.level == b.level;
    }
};

using Statement = std::variant<Rule, WeakConstraint>;

struct Program {
    std::vector<Rule>           rules;
    std::vector<WeakConstraint> weak_constraints;

    void add(Statement s) {
        if (auto* r = std::get_if<Rule>(&s)) rules.push_back(std::move(*r));
        else weak_constraints.push_back(std::get<WeakConstraint>(std::move(s)));
    }
    void append(const Program& other) {
        rules.insert(rules.end(), other.rules.begin(), other.rules.end());
        weak_constraints.insert(weak_constraints.end(), other.weak_constraints.begin(), other.weak_constraints.end());
    }
    [[nodiscard]] bool empty() const { return rules.empty() && weak_constraints.empty(); }

    friend bool operator==(const Program&, const Program&) = default;
};

// ---------------------------------------------------------------------------
// Assertions

struct NoAnswerSet {
    friend bool operator==(const NoAnswerSet&, const NoAnswerSet&) = default;
};
struct TrueInAll {
    std::vector<Atom> atoms;
    friend bool operator==(const TrueInAll&, const TrueInAll&) = default;
};
struct TrueInAtLeast {
    std::uint64_t     number = 0;
    std::vector<Atom> atoms;
    friend bool operator==(const TrueInAtLeast&, const TrueInAtLeast&) = default;
};
struct TrueInAtMost {
    std::uint64_t     number = 0;
    std::vector<Atom> atoms;
    friend bool operator==(const TrueInAtMost&, const TrueInAtMost&) = default;
};
struct TrueInExactly {
    std::uint64_t     number = 0;
    std::vector<Atom> atoms;
    friend bool operator==(const TrueInExactly&, const TrueInExactly&) = default;
};
struct ConstraintForAll {
    Rule constraint;
    friend bool operator==(const ConstraintForAll&, const ConstraintForAll&) = default;
};
struct ConstraintInAtLeast {
    std::uint64_t number = 0;
    Rule          constraint;
    friend bool operator==(const ConstraintInAtLeast&, const ConstraintInAtLeast&) = default;
};
struct ConstraintInAtMost {
    std::uint64_t number = 0;
    Rule          constraint;
    friend bool operator==(const ConstraintInAtMost&, const ConstraintInAtMost&) = default;
};
struct ConstraintInExactly {
    std::uint64_t number = 0;
    Rule          constraint;
    friend bool operator==(const ConstraintInExactly&, const ConstraintInExactly&) = default;
};
struct BestModelCost {
    std::int64_t cost  = 0;
    std::int64_t level = 0;
    friend bool operator==(const BestModelCost&, const BestModelCost&) = default;
};

using Assertion = std::variant<NoAnswerSet, TrueInAll, TrueInAtLeast, TrueInAtMost, TrueInExactly, ConstraintForAll,
                               ConstraintInAtLeast, ConstraintInAtMost, ConstraintInExactly, BestModelCost>;

/// Annotation keyword of an assertion, e.g. "trueInExactly".
inline const char* assertion_name(const Assertion& a) {
    static constexpr const char* names[] = {"noAnswerSet",        "trueInAll",          "trueInAtLeast",
                                            "trueInAtMost",       "trueInExactly",      "constraintForAll",
                                            "constraintInAtLeast", "constraintInAtMost", "constraintInExactly",
                                            "bestModelCost"};
    return names[a.index()];
}

struct TestSpec {
    std::string              name;
    std::vector<std::string> scope;
    std::vector<std::string> program_files;
    std::string              input;
    std::vector<std::string> input_files;
    std::vector<Assertion>   asserts;
    SourceSpan               origin;
};

struct NamedRule {
    std::string name;
    Statement   statement;
    std::string block;   ///< block claimed via `@rule(block=...)`, empty if none
    bool        removed = false; ///< deleted in a mutant; scopes naming it resolve to nothing
};

struct Block {
    std::string              name;
    std::vector<std::string> listed; ///< rules named by `@block(rules={...})`; claims via `@rule(block=...)` live on NamedRule
    SourceSpan               origin;
};

struct TestSuite {
    std::map<std::string, NamedRule> named_rules;
    std::vector<std::string>         rule_order; ///< named rules in declaration order
    std::map<std::string, Block>     blocks;
    std::vector<TestSpec>            tests;
    std::vector<Statement>           anonymous_rules;

    [[nodiscard]] bool empty() const { return named_rules.empty() && blocks.empty() && tests.empty() && anonymous_rules.empty(); }
};

// ---------------------------------------------------------------------------
// Variable and constant harvesting

namespace detail {
inline void collect_vars(const Term& t, std::set<std::string>& out) {
    if (auto* v = std::get_if<Variable>(&t)) out.insert(v->name);
}
inline void collect_vars(const Atom& a, std::set<std::string>& out) {
    for (const auto& t : a.args) collect_vars(t, out);
}
inline void collect_aggregate_vars(const CountAggregate& agg, std::set<std::string>& out) {
    for (const auto& t : agg.tuple) collect_vars(t, out);
    collect_vars(agg.condition, out);
}
inline void collect_consts(const Term& t, std::set<Term>& out) {
    if (!is_variable(t)) out.insert(t);
}
inline void collect_consts(const Atom& a, std::set<Term>& out) {
    for (const auto& t : a.args) collect_consts(t, out);
}
inline void collect_consts(const Literal& l, std::set<Term>& out) {
    if (auto* a = l.atom()) collect_consts(*a, out);
    else if (auto* c = l.comparison()) {
        collect_consts(c->lhs, out);
        collect_consts(c->rhs, out);
    }
    else if (auto* g = l.aggregate()) {
        for (const auto& t : g->tuple) collect_consts(t, out);
        collect_consts(g->condition, out);
        collect_consts(g->guard, out);
    }
}
} // namespace detail

/// Variables of a body that are unsafe: not bound by a positive body atom. Variables local to an
/// aggregate element (occurring nowhere outside aggregates) are bound by the element's condition atom,
/// separately in each aggregate.
inline std::set<std::string> unsafe_variables(const std::vector<Atom>& head, const std::vector<Literal>& body) {
    std::set<std::string> bound;
    for (const auto& l : body) {
        if (auto* a = l.atom(); a && !l.negated) detail::collect_vars(*a, bound);
    }
    // occurrences outside each aggregate, to tell global from local aggregate variables
    std::set<std::string> unsafe;
    auto                  need = [&](const std::set<std::string>& vs) {
        for (const auto& v : vs)
            if (!bound.count(v)) unsafe.insert(v);
    };
    std::set<std::string> global;
    for (const auto& a : head) detail::collect_vars(a, global);
    for (const auto& l : body) {
        if (auto* a = l.atom()) detail::collect_vars(*a, global);
        else if (auto* c = l.comparison()) {
            detail::collect_vars(c->lhs, global);
            detail::collect_vars(c->rhs, global);
        }
        else if (auto* g = l.aggregate()) detail::collect_vars(g->guard, global);
    }
    need(global);
    for (const auto& l : body) {
        const auto* g = l.aggregate();
        if (!g) continue;
        std::set<std::string> mine, in_condition;
        detail::collect_aggregate_vars(*g, mine);
        detail::collect_vars(g->condition, in_condition);
        for (const auto& v : mine) {
            if (global.count(v)) {
                if (!bound.count(v)) unsafe.insert(v);
            }
            else if (!in_condition.count(v)) {
                unsafe.insert(v);
            }
        }
    }
    return unsafe;
}

inline bool is_safe(const Rule& r) { return unsafe_variables(r.head, r.body).empty(); }
inline bool is_safe(const WeakConstraint& w) { return unsafe_variables({}, w.body).empty(); }

inline bool is_ground(const std::vector<Literal>& body) {
    std::set<std::string> vars;
    for (const auto& l : body) {
        if (auto* a = l.atom()) detail::collect_vars(*a, vars);
        else if (auto* c = l.comparison()) {
            detail::collect_vars(c->lhs, vars);
            detail::collect_vars(c->rhs, vars);
        }
        else if (auto* g = l.aggregate()) {
            detail::collect_aggregate_vars(*g, vars);
            detail::collect_vars(g->guard, vars);
        }
    }
    return vars.empty();
}

inline bool is_safe(const Program& p) {
    return std::all_of(p.rules.begin(), p.rules.end(), [](const Rule& r) { return is_safe(r); }) &&
           std::all_of(p.weak_constraints.begin(), p.weak_constraints.end(),
                       [](const WeakConstraint& w) { return is_safe(w); });
}

/// All constants of `p`; `{a}` when `p` mentions none.
inline std::set<Term> herbrand_universe(const Program& p) {
    std::set<Term> out;
    for (const auto& r : p.rules) {
        for (const auto& a : r.head) detail::collect_consts(a, out);
        for (const auto& l : r.body) detail::collect_consts(l, out);
    }
    for (const auto& w : p.weak_constraints)
        for (const auto& l : w.body) detail::collect_consts(l, out);
    if (out.empty()) out.insert(symbol("a"));
    return out;
}

inline void collect_predicates(const Atom& a, std::set<std::string>& out) { out.insert(a.predicate); }
inline void collect_predicates(const std::vector<Literal>& body, std::set<std::string>& out) {
    for (const auto& l : body) {
        if (auto* a = l.atom()) out.insert(a->predicate);
        else if (auto* g = l.aggregate()) out.insert(g->condition.predicate);
    }
}
inline void collect_predicates(const Rule& r, std::set<std::string>& out) {
    for (const auto& a : r.head) out.insert(a.predicate);
    collect_predicates(r.body, out);
}

inline std::set<std::string> predicate_names(const Program& p) {
    std::set<std::string> out;
    for (const auto& r : p.rules) collect_predicates(r, out);
    for (const auto& w : p.weak_constraints) collect_predicates(w.body, out);
    return out;
}

/// Predicate signatures (name, arity) occurring in `p`.
inline std::set<std::pair<std::string, std::size_t>> predicate_signatures(const Program& p) {
    std::set<std::pair<std::string, std::size_t>> out;
    auto add = [&](const Atom& a) { out.emplace(a.predicate, a.arity()); };
    auto add_body = [&](const std::vector<Literal>& body) {
        for (const auto& l : body) {
            if (auto* a = l.atom()) add(*a);
            else if (auto* g = l.aggregate()) add(g->condition);
        }
    };
    for (const auto& r : p.rules) {
        for (const auto& a : r.head) add(a);
        add_body(r.body);
    }
    for (const auto& w : p.weak_constraints) add_body(w.body);
    return out;
}

/// `__tk_<stem>_<i>` for the smallest `i` not in `taken`.
inline std::string fresh_predicate(const std::set<std::string>& taken, const std::string& stem) {
    for (std::size_t i = 0;; ++i) {
        std::string name = "__tk_" + stem + "_" + std::to_string(i);
        if (!taken.count(name)) return name;
    }
}

} // namespace asptest
