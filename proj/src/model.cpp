#include "topk/model.hpp"

#include "topk/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace topk {

namespace {

constexpr double kGridTolerance = 1e-9;

// All size-r subsets of `items` (already sorted), in lexicographic order.
void for_each_combination(std::span<const EntityId> items, std::size_t r,
                          const std::function<void(std::vector<EntityId>)>& visit)
{
    if (r > items.size()) {
        return;
    }
    std::vector<std::size_t> idx(r);
    for (std::size_t i = 0; i < r; ++i) {
        idx[i] = i;
    }
    const std::size_t n = items.size();
    while (true) {
        std::vector<EntityId> combo;
        combo.reserve(r);
        for (auto i : idx) {
            combo.push_back(items[i]);
        }
        visit(std::move(combo));
        std::size_t pos = r;
        while (pos > 0 && idx[pos - 1] == n - r + pos - 1) {
            --pos;
        }
        if (pos == 0) {
            return;
        }
        ++idx[pos - 1];
        for (std::size_t j = pos; j < r; ++j) {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

}  // namespace

EntityId::EntityId(std::string value) : value_(std::move(value))
{
    if (value_.empty()) {
        throw ValidationError("entity id must be nonempty");
    }
}

ScoringSpec::ScoringSpec(std::vector<Construct> constructs, double min_score, double max_score,
                         double grid_step, Aggregation aggregation)
    : constructs_(std::move(constructs)),
      min_(min_score),
      max_(max_score),
      step_(grid_step),
      ticks_(0),
      aggregation_(aggregation)
{
    if (!std::isfinite(min_) || !std::isfinite(max_) || !(min_ < max_)) {
        throw ValidationError("score range requires min < max");
    }
    if (!std::isfinite(step_) || step_ <= 0.0) {
        throw ValidationError("grid step must be positive");
    }
    const double ratio = (max_ - min_) / step_;
    if (std::abs(ratio - std::round(ratio)) > kGridTolerance * std::max(1.0, ratio)) {
        throw ValidationError("grid step must divide the score range");
    }
    ticks_ = std::llround(ratio);
    if (constructs_.empty()) {
        throw ValidationError("scoring function needs at least one construct");
    }
    std::set<std::string> names;
    for (const auto& c : constructs_) {
        if (c.name.empty()) {
            throw ValidationError("construct name must be nonempty");
        }
        if (!names.insert(c.name).second) {
            throw ValidationError("duplicate construct name: " + c.name);
        }
        if (c.arity < 1) {
            throw ValidationError("construct arity must be positive: " + c.name);
        }
        if (!(c.weight >= 0.0) || c.weight != std::floor(c.weight)) {
            throw ValidationError("construct weight must be a non-negative integer: " + c.name);
        }
    }
}

std::vector<double> ScoringSpec::grid_values() const
{
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(ticks_ + 1));
    for (std::int64_t t = 0; t <= ticks_; ++t) {
        out.push_back(from_tick(t));
    }
    return out;
}

bool ScoringSpec::on_grid(double v) const noexcept
{
    if (!std::isfinite(v)) {
        return false;
    }
    const double ratio = (v - min_) / step_;
    const double r = std::round(ratio);
    return std::abs(ratio - r) <= kGridTolerance * std::max(1.0, std::abs(ratio)) && r >= 0.0
        && r <= static_cast<double>(ticks_);
}

std::int64_t ScoringSpec::to_tick(double v) const
{
    if (!on_grid(v)) {
        throw ValidationError("score " + std::to_string(v) + " is not on the grid ["
                              + std::to_string(min_) + ", " + std::to_string(max_) + "] step "
                              + std::to_string(step_));
    }
    return std::llround((v - min_) / step_);
}

std::int64_t ScoringSpec::question_ticks(std::size_t construct) const
{
    return static_cast<std::int64_t>(constructs_.at(construct).weight) * ticks_;
}

std::optional<std::size_t> ScoringSpec::find_construct(std::string_view name) const
{
    for (std::size_t i = 0; i < constructs_.size(); ++i) {
        if (constructs_[i].name == name) {
            return i;
        }
    }
    return std::nullopt;
}

std::size_t ScoringSpec::construct_index(std::string_view name) const
{
    if (auto i = find_construct(name)) {
        return *i;
    }
    throw ValidationError("unknown construct: " + std::string(name));
}

Question Question::make(std::size_t construct, std::vector<EntityId> args)
{
    std::sort(args.begin(), args.end());
    if (std::adjacent_find(args.begin(), args.end()) != args.end()) {
        throw ValidationError("question arguments must be distinct entities");
    }
    return Question{construct, std::move(args)};
}

std::string to_string(const Question& q, const ScoringSpec& spec)
{
    std::string out = spec.construct(q.construct).name + "(";
    for (std::size_t i = 0; i < q.args.size(); ++i) {
        if (i > 0) {
            out += ",";
        }
        out += q.args[i].str();
    }
    return out + ")";
}

std::optional<double> KnownStore::find(const Question& q) const
{
    if (auto it = answers_.find(q); it != answers_.end()) {
        return it->second;
    }
    return std::nullopt;
}

std::optional<std::pair<double, double>> KnownStore::find_range(const Question& q) const
{
    if (auto it = ranges_.find(q); it != ranges_.end()) {
        return it->second;
    }
    return std::nullopt;
}

Candidate Candidate::make(std::size_t id, std::vector<EntityId> members)
{
    std::sort(members.begin(), members.end());
    if (members.empty()) {
        throw ValidationError("candidate must have at least one member");
    }
    if (std::adjacent_find(members.begin(), members.end()) != members.end()) {
        throw ValidationError("candidate members must be distinct");
    }
    return Candidate{id, std::move(members)};
}

bool Candidate::contains(const EntityId& e) const
{
    return std::binary_search(members.begin(), members.end(), e);
}

void validate(const Problem& p)
{
    std::set<EntityId> entities;
    for (const auto& e : p.entities) {
        if (!entities.insert(e).second) {
            throw ValidationError("duplicate entity id: " + e.str());
        }
    }
    if (p.k == 0 || p.k > p.entities.size()) {
        throw ValidationError("k must be in [1, number of entities]");
    }
    std::set<std::vector<EntityId>> seen;
    for (std::size_t i = 0; i < p.candidates.size(); ++i) {
        const auto& c = p.candidates[i];
        if (c.id != i) {
            throw ValidationError("candidate ids must be their positions");
        }
        if (c.members.size() != p.k) {
            throw ValidationError("candidate size differs from k");
        }
        for (const auto& m : c.members) {
            if (!entities.contains(m)) {
                throw ValidationError("candidate references unknown entity: " + m.str());
            }
        }
        if (!seen.insert(c.members).second) {
            throw ValidationError("duplicate candidate");
        }
    }
    auto check_values = [&](const auto& map) {
        for (const auto& [q, v] : map) {
            if (q.construct >= p.spec.constructs().size()
                || q.args.size() != static_cast<std::size_t>(p.spec.construct(q.construct).arity)) {
                throw ValidationError("question does not match its construct");
            }
            for (const auto& a : q.args) {
                if (!entities.contains(a)) {
                    throw ValidationError("score references unknown entity: " + a.str());
                }
            }
            (void)p.spec.to_tick(v);
        }
    };
    check_values(p.knowns.answers());
    if (p.ground_truth) {
        check_values(*p.ground_truth);
        for (const auto& [q, v] : p.knowns.answers()) {
            auto it = p.ground_truth->find(q);
            if (it != p.ground_truth->end() && it->second != v) {
                throw ValidationError("known answer disagrees with ground truth: "
                                      + to_string(q, p.spec));
            }
        }
    }
}

std::vector<Question> questions_of(const Candidate& c, const ScoringSpec& spec)
{
    std::vector<Question> out;
    for (std::size_t ci = 0; ci < spec.constructs().size(); ++ci) {
        const auto arity = static_cast<std::size_t>(spec.construct(ci).arity);
        for_each_combination(c.members, arity, [&](std::vector<EntityId> args) {
            out.push_back(Question{ci, std::move(args)});
        });
    }
    return out;
}

std::vector<Question> build_question_universe(const ScoringSpec& spec,
                                              std::span<const Candidate> candidates)
{
    if (candidates.empty()) {
        throw ValidationError("no candidates");
    }
    std::set<Question> all;
    for (const auto& c : candidates) {
        for (auto& q : questions_of(c, spec)) {
            all.insert(std::move(q));
        }
    }
    return {all.begin(), all.end()};
}

std::vector<Question> unknown_questions(std::span<const Question> universe,
                                        const KnownStore& knowns)
{
    std::vector<Question> out;
    for (const auto& q : universe) {
        if (!knowns.contains(q)) {
            out.push_back(q);
        }
    }
    return out;
}

KnownStore record_response(KnownStore knowns, const ScoringSpec& spec, const Question& q,
                           double v)
{
    (void)spec.to_tick(v);
    if (auto r = knowns.find_range(q)) {
        if (v < r->first - 1e-12 || v > r->second + 1e-12) {
            throw ValidationError("answer outside the narrowed range for " + to_string(q, spec));
        }
        knowns.ranges_.erase(q);
    }
    auto [it, inserted] = knowns.answers_.emplace(q, v);
    if (!inserted && it->second != v) {
        throw ValidationError("conflicting answer for " + to_string(q, spec));
    }
    return knowns;
}

KnownStore record_range(KnownStore knowns, const ScoringSpec& spec, const Question& q,
                        double lo, double hi)
{
    const auto lo_tick = spec.to_tick(lo);
    const auto hi_tick = spec.to_tick(hi);
    if (lo_tick > hi_tick) {
        throw ValidationError("range needs lo <= hi for " + to_string(q, spec));
    }
    if (auto v = knowns.find(q)) {
        const auto t = spec.to_tick(*v);
        if (t < lo_tick || t > hi_tick) {
            throw ValidationError("range excludes the known answer for " + to_string(q, spec));
        }
        return knowns;
    }
    auto [new_lo, new_hi] = std::pair{lo_tick, hi_tick};
    if (auto it = knowns.ranges_.find(q); it != knowns.ranges_.end()) {
        new_lo = std::max(new_lo, spec.to_tick(it->second.first));
        new_hi = std::min(new_hi, spec.to_tick(it->second.second));
        if (new_lo > new_hi) {
            throw ValidationError("conflicting ranges for " + to_string(q, spec));
        }
    }
    if (new_lo == new_hi) {
        knowns.ranges_.erase(q);
        return record_response(std::move(knowns), spec, q, spec.from_tick(new_lo));
    }
    knowns.ranges_[q] = {spec.from_tick(new_lo), spec.from_tick(new_hi)};
    return knowns;
}

double exact_score(const Candidate& c, const ScoringSpec& spec,
                   const std::map<Question, double>& values)
{
    double total = 0.0;
    for (const auto& q : questions_of(c, spec)) {
        auto it = values.find(q);
        if (it == values.end()) {
            throw ValidationError("no value for " + to_string(q, spec));
        }
        total += spec.construct(q.construct).weight * it->second;
    }
    return total;
}

}  // namespace topk
