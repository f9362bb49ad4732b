#pragma once

// Next-question policies: entropy of the winner distribution, the QEF
// question score, EntrRed and the random baseline.

#include "topk/model.hpp"
#include "topk/winner.hpp"

#include <cstdint>
#include <span>

namespace topk {

struct QuestionScore {
    Question question;
    double score = 0.0;
};

/// Shannon entropy in nats; zero-probability terms contribute nothing.
[[nodiscard]] double entropy(const Eigen::VectorXd& probs);
[[nodiscard]] inline double entropy(const WinnerDistribution& dist)
{
    return entropy(dist.probs);
}

/// Sum over (affected, unaffected) candidate pairs of |P(c) - P(c')|, where
/// the affected candidates are those whose score includes q.
[[nodiscard]] double qef_score(const Question& q, const Eigen::VectorXd& probs,
                               std::span<const Candidate> candidates);

/// QEF of every question in `questions`, in the given order.
[[nodiscard]] std::vector<QuestionScore> qef_scores(std::span<const Question> questions,
                                                    const Eigen::VectorXd& probs,
                                                    std::span<const Candidate> candidates);

/// Picks the most probable candidate (lowest id on ties), restricts the
/// unknowns to that candidate's questions (all unknowns if none remain) and
/// returns the highest-QEF question, first in question order on ties.
[[nodiscard]] Question select_entr_red(std::span<const Candidate> candidates,
                                       const Eigen::VectorXd& probs,
                                       std::span<const Question> unknowns);

/// Uniform draw from `unknowns` with a seeded generator.
[[nodiscard]] Question select_random(std::span<const Question> unknowns, std::uint64_t seed);

}  // namespace topk
