#pragma once
// Text rendering of the AST. Output is valid input for the parser and for competition-format solvers.

#include "model.hpp"

#include <sstream>
#include <string>

namespace asptest {

struct SerializeOptions {
    /// Append `, <id>, <body variables>` to weak-constraint weights so that solvers summing over
    /// distinct weight tuples charge every violated ground instance separately.
    bool weak_instance_tuples = false;
};

inline std::string to_string(const Term& t) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, IntegerConstant>) return std::to_string(v.value);
            else return v.name;
        },
        t);
}

inline std::string join_terms(const std::vector<Term>& ts) {
    std::string out;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (i) out += ',';
        out += to_string(ts[i]);
    }
    return out;
}

inline std::string to_string(const Atom& a) {
    if (a.args.empty()) return a.predicate;
    return a.predicate + '(' + join_terms(a.args) + ')';
}

inline std::string to_string(const Literal& l) {
    std::string out = l.negated ? "not " : "";
    if (auto* a = l.atom()) out += to_string(*a);
    else if (auto* c = l.comparison()) out += to_string(c->lhs) + to_string(c->op) + to_string(c->rhs);
    else if (auto* g = l.aggregate()) {
        out += "#count{" + join_terms(g->tuple) + ':' + to_string(g->condition) + '}' + to_string(g->op) +
               to_string(g->guard);
    }
    return out;
}

inline std::string join_body(const std::vector<Literal>& body) {
    std::string out;
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (i) out += ", ";
        out += to_string(body[i]);
    }
    return out;
}

inline std::string to_string(const Rule& r) {
    std::string out;
    for (std::size_t i = 0; i < r.head.size(); ++i) {
        if (i) out += " | ";
        out += to_string(r.head[i]);
    }
    if (!r.body.empty()) out += (r.head.empty() ? ":- " : " :- ") + join_body(r.body);
    return out + '.';
}

inline std::string to_string(const WeakConstraint& w, const SerializeOptions& opts = {}, std::size_t id = 0) {
    std::string out = ":~ " + join_body(w.body) + ". [" + std::to_string(w.cost) + '@' + std::to_string(w.level);
    if (opts.weak_instance_tuples) {
        out += ',' + std::to_string(id);
        std::set<std::string> vars;
        for (const auto& l : w.body) {
            if (auto* a = l.atom()) detail::collect_vars(*a, vars);
            else if (auto* c = l.comparison()) {
                detail::collect_vars(c->lhs, vars);
                detail::collect_vars(c->rhs, vars);
            }
            else if (auto* g = l.aggregate()) detail::collect_vars(g->guard, vars);
        }
        for (const auto& v : vars) out += ',' + v;
    }
    return out + ']';
}

inline std::string to_string(const Statement& s) {
    return std::visit([](const auto& x) { return to_string(x); }, s);
}

/// One statement per line.
inline std::string serialize_program(const Program& p, const SerializeOptions& opts = {}) {
    std::string out;
    for (const auto& r : p.rules) out += to_string(r) + '\n';
    for (std::size_t i = 0; i < p.weak_constraints.size(); ++i) out += to_string(p.weak_constraints[i], opts, i) + '\n';
    return out;
}

/// Period-separated ground atoms, the form used by `atoms = "..."` attributes.
inline std::string atoms_text(const std::vector<Atom>& atoms) {
    std::string out;
    for (const auto& a : atoms) {
        if (!out.empty()) out += ' ';
        out += to_string(a) + '.';
    }
    return out;
}

inline std::string escape_string(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

/// Annotation text of an assertion, e.g. `@trueInExactly(number = 2, atoms = "col(1,red).")`.
inline std::string to_string(const Assertion& a) {
    std::ostringstream os;
    os << '@' << assertion_name(a);
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, NoAnswerSet>) {}
            else if constexpr (std::is_same_v<T, TrueInAll>) os << "(atoms = \"" << atoms_text(x.atoms) << "\")";
            else if constexpr (std::is_same_v<T, TrueInAtLeast> || std::is_same_v<T, TrueInAtMost> ||
                               std::is_same_v<T, TrueInExactly>)
                os << "(number = " << x.number << ", atoms = \"" << atoms_text(x.atoms) << "\")";
            else if constexpr (std::is_same_v<T, ConstraintForAll>)
                os << "(constraint = \"" << escape_string(to_string(x.constraint)) << "\")";
            else if constexpr (std::is_same_v<T, BestModelCost>)
                os << "(cost = " << x.cost << ", level = " << x.level << ')';
            else
                os << "(number = " << x.number << ", constraint = \"" << escape_string(to_string(x.constraint))
                   << "\")";
        },
        a);
    return os.str();
}

} // namespace asptest
