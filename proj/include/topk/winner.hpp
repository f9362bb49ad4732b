#pragma once

// Estimators of P(c = c*), the probability that each candidate is the true
// top-k set, given the current score bounds.

#include "topk/bounds.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>

namespace topk {

struct WinnerDistribution {
    Eigen::VectorXd probs;  // aligned with candidate ids, sums to one
    Eigen::VectorXd raw;    // unnormalized products
    bool all_zero = false;  // raw summed to zero; probs fell back to uniform

    [[nodiscard]] Eigen::Index argmax() const;  // lowest id on ties
};

/// Scales `raw` to sum to one. An all-zero vector becomes uniform with
/// `all_zero` set. Negative entries throw.
[[nodiscard]] WinnerDistribution normalize(Eigen::VectorXd raw);

/// Product of pairwise P(F(c) >= F(c_i)) over the full uniform bound pdfs.
[[nodiscard]] WinnerDistribution prob_ind(const ScoreModel& model);
[[nodiscard]] WinnerDistribution prob_ind(std::span<const Candidate> candidates,
                                          const ScoringSpec& spec, const KnownStore& knowns);

/// Chained pairwise estimator accounting for shared entities.
///
/// For a target c the opponents are visited in id order. Each term compares
/// c and the opponent on their eliminated bounds, so unknown questions they
/// share cannot tilt the comparison. Consecutive opponents o, o' that share
/// unknowns T outside c are coupled: having conditioned on F(c) >= F(o), the
/// posterior of T's contribution (uniform prior, o's score = T + rest) is
/// carried into o' whose score pdf becomes rest' (+) posterior(T). Only the
/// latest link is kept, giving O(m^2) work per term and O(m) state.
///
/// Without shared unknowns every term is the plain max-convolution, so on
/// entity-disjoint candidates this equals prob_ind exactly.
[[nodiscard]] WinnerDistribution prob_dep(const ScoreModel& model);
[[nodiscard]] WinnerDistribution prob_dep(std::span<const Candidate> candidates,
                                          const ScoringSpec& spec, const KnownStore& knowns);

/// Exact winner distribution by enumerating every grid assignment of the
/// unknown questions (each equally likely). Tied maxima share the count.
/// Throws ValidationError when the assignment count exceeds `cap`.
[[nodiscard]] WinnerDistribution brute_force_winner_dist(const ScoreModel& model,
                                                         std::uint64_t cap = 10'000'000);
[[nodiscard]] WinnerDistribution brute_force_winner_dist(std::span<const Candidate> candidates,
                                                         const ScoringSpec& spec,
                                                         const KnownStore& knowns,
                                                         std::uint64_t cap = 10'000'000);

}  // namespace topk
