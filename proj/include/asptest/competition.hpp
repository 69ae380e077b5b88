#pragma once
// Reader and writer for the line-oriented output format of the ASP Competition:
//
//   ANSWER                      next line: the atoms of one answer set, each optionally followed by '.'
//   COST <c>@<l> ...            costs of the preceding answer set (some solvers print bare <c> per level,
//                               highest level first; a level hint resolves those)
//   OPTIMUM FOUND | OPTIMUM     the last reported costs are optimal, search complete
//   INCOHERENT | INCONSISTENT | UNSATISFIABLE
//   UNKNOWN
//
// Any other line is ignored.

#include "error.hpp"
#include "parser.hpp"
#include "solve_result.hpp"

#include <charconv>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace asptest {

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline std::optional<std::int64_t> to_int(std::string_view s) {
    std::int64_t v   = 0;
    auto [ptr, ec]   = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

} // namespace detail

/// Parses solver output. `levels` lists the weak-constraint levels of the solved program, highest first;
/// it is only needed for solvers printing bare cost values.
inline SolveResult parse_competition_output(std::string_view text, const std::vector<std::int64_t>& levels = {}) {
    SolveResult res;
    std::vector<std::string_view> lines;
    for (std::size_t start = 0; start <= text.size();) {
        auto nl = text.find('\n', start);
        if (nl == std::string_view::npos) nl = text.size();
        lines.push_back(detail::trim(text.substr(start, nl - start)));
        start = nl + 1;
    }
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string_view line = lines[i];
        if (line == "ANSWER") {
            if (i + 1 >= lines.size())
                throw FormatError("ANSWER marker without an atom line", static_cast<int>(i + 1));
            std::string_view atoms = lines[++i];
            try {
                res.answer_sets.emplace_back(atoms.empty() ? std::vector<Atom>{} : parse_ground_atoms(atoms));
            } catch (const ParseFailure& e) {
                throw FormatError("unparseable answer line '" + std::string(atoms) + "'", static_cast<int>(i + 1));
            }
        }
        else if (line.rfind("COST", 0) == 0 && (line.size() == 4 || line[4] == ' ')) {
            if (res.answer_sets.empty()) throw FormatError("COST line before any answer set", static_cast<int>(i + 1));
            std::size_t idx = res.answer_sets.size() - 1;
            std::istringstream words{std::string(line.substr(4))};
            std::string        w;
            std::size_t        position = 0;
            while (words >> w) {
                auto at = w.find('@');
                std::optional<std::int64_t> c, l;
                if (at != std::string::npos) {
                    c = detail::to_int(std::string_view(w).substr(0, at));
                    l = detail::to_int(std::string_view(w).substr(at + 1));
                }
                else {
                    c = detail::to_int(w);
                    if (position < levels.size()) l = levels[position];
                    else if (levels.empty()) l = 0;
                }
                if (!c || !l) throw FormatError("bad cost entry '" + w + "'", static_cast<int>(i + 1));
                res.costs[{idx, *l}] = *c;
                ++position;
            }
        }
        else if (line == "OPTIMUM FOUND" || line == "OPTIMUM") {
            res.optimal   = true;
            res.exhausted = true;
        }
        else if (line == "INCOHERENT" || line == "INCONSISTENT" || line == "UNSATISFIABLE") {
            res.incoherent = true;
            res.exhausted  = true;
        }
        else if (line == "UNKNOWN") {
            res.exhausted = false;
        }
    }
    return res;
}

/// Renders a result in the same format; atoms are written with a trailing '.'.
inline std::string write_competition_output(const SolveResult& r) {
    std::string out;
    if (r.incoherent) return "INCOHERENT\n";
    for (std::size_t i = 0; i < r.answer_sets.size(); ++i) {
        out += "ANSWER\n";
        std::string atoms;
        for (const auto& a : r.answer_sets[i].atoms()) {
            if (!atoms.empty()) atoms += ' ';
            atoms += to_string(a) + '.';
        }
        out += atoms + '\n';
        std::string cost;
        for (auto it = r.costs.rbegin(); it != r.costs.rend(); ++it) {
            if (it->first.first != i) continue;
            cost += ' ' + std::to_string(it->second) + '@' + std::to_string(it->first.second);
        }
        if (!cost.empty()) out += "COST" + cost + '\n';
    }
    if (r.optimal) out += "OPTIMUM FOUND\n";
    else if (!r.exhausted) out += "UNKNOWN\n";
    return out;
}

} // namespace asptest
