#include "topk/bounds.hpp"

#include "topk/error.hpp"

#include <algorithm>
#include <array>
#include <map>

namespace topk {

bool score_geq(double a, double b, double step) noexcept
{
    return a - b >= -1e-7 * step;
}

ScoreModel::ScoreModel(std::span<const Candidate> candidates, const ScoringSpec& spec,
                       const KnownStore& knowns)
    : spec_(&spec)
{
    std::vector<std::vector<Question>> per_candidate;
    per_candidate.reserve(candidates.size());
    std::map<Question, std::uint32_t> ids;
    for (const auto& c : candidates) {
        per_candidate.push_back(questions_of(c, spec));
        for (const auto& q : per_candidate.back()) {
            if (!knowns.contains(q)) {
                ids.emplace(q, 0);
            }
        }
    }
    unknowns_.reserve(ids.size());
    for (auto& [q, id] : ids) {
        id = static_cast<std::uint32_t>(unknowns_.size());
        unknowns_.push_back(q);
        const auto w = static_cast<std::int64_t>(spec.construct(q.construct).weight);
        std::int64_t lo = 0;
        std::int64_t hi = spec.grid_ticks();
        if (auto r = knowns.find_range(q)) {
            lo = spec.to_tick(r->first);
            hi = spec.to_tick(r->second);
        }
        question_lo_.push_back(lo);
        question_levels_.push_back(hi - lo + 1);
        question_ticks_.push_back(w * (hi - lo));
    }

    entries_.reserve(candidates.size());
    for (const auto& questions : per_candidate) {
        Entry e;
        for (const auto& q : questions) {
            const double w = spec.construct(q.construct).weight;
            if (auto v = knowns.find(q)) {
                e.lb += w * *v;
            } else {
                const auto id = ids.at(q);
                e.lb += w * spec.from_tick(question_lo_[id]);
                e.ticks += question_ticks_[id];
                e.unknown.push_back(id);
            }
        }
        std::sort(e.unknown.begin(), e.unknown.end());
        entries_.push_back(std::move(e));
    }
}

Interval ScoreModel::bounds(std::size_t i) const
{
    const auto& e = entries_.at(i);
    return {e.lb, e.lb + step() * static_cast<double>(e.ticks)};
}

std::int64_t ScoreModel::shared_ticks(std::size_t i, std::size_t j) const
{
    const auto& a = entries_.at(i).unknown;
    const auto& b = entries_.at(j).unknown;
    std::int64_t total = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            total += question_ticks_[*ia];
            ++ia;
            ++ib;
        }
    }
    return total;
}

std::int64_t ScoreModel::shared_ticks(std::size_t i, std::size_t j, std::size_t exclude) const
{
    const auto& a = entries_.at(i).unknown;
    const auto& b = entries_.at(j).unknown;
    const auto& x = entries_.at(exclude).unknown;
    std::int64_t total = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            if (!std::binary_search(x.begin(), x.end(), *ia)) {
                total += question_ticks_[*ia];
            }
            ++ia;
            ++ib;
        }
    }
    return total;
}

std::pair<Interval, Interval> ScoreModel::eliminated(std::size_t i, std::size_t j) const
{
    // Shared unknowns already sit at the minimum in lb; only the upper side moves.
    const double shared = step() * static_cast<double>(shared_ticks(i, j));
    auto a = bounds(i);
    auto b = bounds(j);
    a.ub -= shared;
    b.ub -= shared;
    return {a, b};
}

bool ScoreModel::dominates(std::size_t i, std::size_t j) const
{
    const auto [a, b] = eliminated(i, j);
    return score_geq(a.lb, b.ub, step());
}

bool ScoreModel::strictly_dominates(std::size_t i, std::size_t j) const
{
    const auto [a, b] = eliminated(i, j);
    return !score_geq(b.ub, a.lb, step());
}

Interval score_bounds(const Candidate& c, const ScoringSpec& spec, const KnownStore& knowns)
{
    const std::array<Candidate, 1> one{c};
    return ScoreModel(one, spec, knowns).bounds(0);
}

std::pair<Interval, Interval> eliminated_bounds(const Candidate& a, const Candidate& b,
                                                const ScoringSpec& spec, const KnownStore& knowns)
{
    const std::array<Candidate, 2> pair{a, b};
    return ScoreModel(pair, spec, knowns).eliminated(0, 1);
}

bool dominates(const Candidate& a, const Candidate& b, const ScoringSpec& spec,
               const KnownStore& knowns)
{
    const std::array<Candidate, 2> pair{a, b};
    return ScoreModel(pair, spec, knowns).dominates(0, 1);
}

}  // namespace topk
