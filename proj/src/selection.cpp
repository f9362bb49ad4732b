#include "topk/selection.hpp"

#include "topk/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace topk {

namespace {

bool affects(const Question& q, const Candidate& c)
{
    return std::all_of(q.args.begin(), q.args.end(),
                       [&](const EntityId& e) { return c.contains(e); });
}

}  // namespace

double entropy(const Eigen::VectorXd& probs)
{
    double h = 0.0;
    for (Eigen::Index i = 0; i < probs.size(); ++i) {
        if (probs[i] > 0.0) {
            h -= probs[i] * std::log(probs[i]);
        }
    }
    return h;
}

double qef_score(const Question& q, const Eigen::VectorXd& probs,
                 std::span<const Candidate> candidates)
{
    if (static_cast<std::size_t>(probs.size()) != candidates.size()) {
        throw ValidationError("winner distribution does not match the candidate list");
    }
    std::vector<double> inside;
    std::vector<double> outside;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        (affects(q, candidates[i]) ? inside : outside).push_back(probs[static_cast<Eigen::Index>(i)]);
    }
    double score = 0.0;
    for (double p : inside) {
        for (double p2 : outside) {
            score += std::abs(p - p2);
        }
    }
    return score;
}

std::vector<QuestionScore> qef_scores(std::span<const Question> questions,
                                      const Eigen::VectorXd& probs,
                                      std::span<const Candidate> candidates)
{
    std::vector<QuestionScore> out;
    out.reserve(questions.size());
    for (const auto& q : questions) {
        out.push_back({q, qef_score(q, probs, candidates)});
    }
    return out;
}

Question select_entr_red(std::span<const Candidate> candidates, const Eigen::VectorXd& probs,
                         std::span<const Question> unknowns)
{
    if (unknowns.empty()) {
        throw ValidationError("no unknown questions to select from");
    }
    if (static_cast<std::size_t>(probs.size()) != candidates.size() || candidates.empty()) {
        throw ValidationError("winner distribution does not match the candidate list");
    }
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < probs.size(); ++i) {
        if (probs[i] > probs[best]) {
            best = i;
        }
    }
    const Candidate& leader = candidates[static_cast<std::size_t>(best)];

    std::vector<Question> considered;
    for (const auto& q : unknowns) {
        if (affects(q, leader)) {
            considered.push_back(q);
        }
    }
    if (considered.empty()) {
        considered.assign(unknowns.begin(), unknowns.end());
    }
    std::sort(considered.begin(), considered.end());

    const auto scores = qef_scores(considered, probs, candidates);
    std::size_t pick = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        if (scores[i].score > scores[pick].score) {
            pick = i;
        }
    }
    return scores[pick].question;
}

Question select_random(std::span<const Question> unknowns, std::uint64_t seed)
{
    if (unknowns.empty()) {
        throw ValidationError("no unknown questions to select from");
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, unknowns.size() - 1);
    return unknowns[pick(rng)];
}

}  // namespace topk
