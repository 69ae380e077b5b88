#pragma once

#include "model.hpp"
#include "serialize.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace asptest {

/// A set of ground atoms, kept sorted and duplicate-free.
class AnswerSet {
public:
    AnswerSet() = default;
    explicit AnswerSet(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
        std::sort(atoms_.begin(), atoms_.end());
        atoms_.erase(std::unique(atoms_.begin(), atoms_.end()), atoms_.end());
    }

    [[nodiscard]] const std::vector<Atom>& atoms() const { return atoms_; }
    [[nodiscard]] std::size_t              size() const { return atoms_.size(); }
    [[nodiscard]] bool                     empty() const { return atoms_.empty(); }
    [[nodiscard]] bool contains(const Atom& a) const { return std::binary_search(atoms_.begin(), atoms_.end(), a); }
    [[nodiscard]] bool contains_all(const std::vector<Atom>& as) const {
        return std::all_of(as.begin(), as.end(), [&](const Atom& a) { return contains(a); });
    }
    /// Proper-subset test.
    [[nodiscard]] bool strictly_within(const AnswerSet& other) const {
        return size() < other.size() && std::includes(other.atoms_.begin(), other.atoms_.end(), atoms_.begin(), atoms_.end());
    }

    template <typename Pred>
    [[nodiscard]] AnswerSet filter(Pred&& keep) const {
        std::vector<Atom> out;
        std::copy_if(atoms_.begin(), atoms_.end(), std::back_inserter(out), keep);
        return AnswerSet(std::move(out));
    }

    friend auto operator<=>(const AnswerSet&, const AnswerSet&) = default;
    friend bool operator==(const AnswerSet&, const AnswerSet&)  = default;

private:
    std::vector<Atom> atoms_;
};

inline std::string to_string(const AnswerSet& s) {
    std::string out = "{";
    for (std::size_t i = 0; i < s.atoms().size(); ++i) {
        if (i) out += ", ";
        out += to_string(s.atoms()[i]);
    }
    return out + '}';
}

/// Normalised outcome of one solver run.
struct SolveResult {
    std::vector<AnswerSet> answer_sets;
    bool                   exhausted  = false; ///< enumeration completed; no further answer sets exist
    bool                   incoherent = false;
    bool                   optimal    = false; ///< the solver proved the reported costs optimal
    /// (answer-set index, level) -> penalty
    std::map<std::pair<std::size_t, std::int64_t>, std::int64_t> costs;

    [[nodiscard]] bool has_costs() const { return !costs.empty(); }

    /// Penalty of answer set `index` at `level`; an absent entry is an empty sum.
    [[nodiscard]] std::int64_t cost(std::size_t index, std::int64_t level) const {
        auto it = costs.find({index, level});
        return it == costs.end() ? 0 : it->second;
    }

    friend bool operator==(const SolveResult&, const SolveResult&) = default;
};

/// Answer sets as an order-insensitive collection.
inline std::vector<AnswerSet> normalized(std::vector<AnswerSet> sets) {
    std::sort(sets.begin(), sets.end());
    sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
    return sets;
}

} // namespace asptest
