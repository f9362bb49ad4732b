#pragma once

// Candidate score intervals derived from the known answers, including the
// pairwise bounds with shared unknown questions eliminated.

#include "topk/model.hpp"

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace topk {

struct Interval {
    double lb = 0.0;
    double ub = 0.0;

    [[nodiscard]] double width() const noexcept { return ub - lb; }
    [[nodiscard]] bool contains(const Interval& other, double tol = 1e-9) const noexcept
    {
        return other.lb >= lb - tol && other.ub <= ub + tol;
    }
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// `a >= b` for two candidate scores on the same grid, robust to rounding.
[[nodiscard]] bool score_geq(double a, double b, double step) noexcept;

/// Per-candidate split of questions into known contribution and unknown
/// question ids, built once per known-store state. All pairwise queries
/// (eliminated bounds, dominance, shared unknowns) are answered from it.
class ScoreModel {
public:
    ScoreModel(std::span<const Candidate> candidates, const ScoringSpec& spec,
               const KnownStore& knowns);

    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
    [[nodiscard]] const ScoringSpec& spec() const noexcept { return *spec_; }
    [[nodiscard]] double step() const noexcept { return spec_->grid_step(); }

    [[nodiscard]] Interval bounds(std::size_t i) const;
    [[nodiscard]] std::int64_t unknown_ticks(std::size_t i) const { return entries_[i].ticks; }

    /// Bounds of (i, j) with every unknown question common to both fixed at
    /// its lowest possible value.
    [[nodiscard]] std::pair<Interval, Interval> eliminated(std::size_t i, std::size_t j) const;

    [[nodiscard]] bool dominates(std::size_t i, std::size_t j) const;
    [[nodiscard]] bool strictly_dominates(std::size_t i, std::size_t j) const;

    /// Width (in grid steps, one side) of the unknowns shared by i and j and
    /// not asked by `exclude`.
    [[nodiscard]] std::int64_t shared_ticks(std::size_t i, std::size_t j,
                                            std::size_t exclude) const;
    [[nodiscard]] std::int64_t shared_ticks(std::size_t i, std::size_t j) const;

    /// Unknown questions across all candidates, sorted.
    [[nodiscard]] const std::vector<Question>& unknowns() const noexcept { return unknowns_; }
    /// Ids (into unknowns()) of candidate i's unknown questions, sorted.
    [[nodiscard]] const std::vector<std::uint32_t>& unknown_ids(std::size_t i) const
    {
        return entries_[i].unknown;
    }

    /// Weighted width of unknown question u in grid steps.
    [[nodiscard]] std::int64_t question_ticks(std::uint32_t u) const { return question_ticks_[u]; }

    /// Lowest possible grid tick of unknown question u and how many grid
    /// values it may still take.
    [[nodiscard]] std::int64_t question_lo(std::uint32_t u) const { return question_lo_[u]; }
    [[nodiscard]] std::int64_t question_levels(std::uint32_t u) const
    {
        return question_levels_[u];
    }

private:
    struct Entry {
        double lb = 0.0;  // known contribution + unknowns at minimum
        std::int64_t ticks = 0;
        std::vector<std::uint32_t> unknown;
    };

    const ScoringSpec* spec_;
    std::vector<Question> unknowns_;
    std::vector<std::int64_t> question_ticks_;  // per unknown id, weighted width
    std::vector<std::int64_t> question_lo_;
    std::vector<std::int64_t> question_levels_;
    std::vector<Entry> entries_;
};

[[nodiscard]] Interval score_bounds(const Candidate& c, const ScoringSpec& spec,
                                    const KnownStore& knowns);

[[nodiscard]] std::pair<Interval, Interval> eliminated_bounds(const Candidate& a,
                                                              const Candidate& b,
                                                              const ScoringSpec& spec,
                                                              const KnownStore& knowns);

/// True iff a's eliminated lower bound reaches b's eliminated upper bound,
/// i.e. F(a) >= F(b) under every completion of the unknowns.
[[nodiscard]] bool dominates(const Candidate& a, const Candidate& b, const ScoringSpec& spec,
                             const KnownStore& knowns);

}  // namespace topk
