#include "topk/engine.hpp"

#include "topk/error.hpp"
#include "topk/selection.hpp"
#include "topk/winner.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <memory>
#include <set>

namespace topk {

namespace {

using Clock = std::chrono::steady_clock;

class Stopwatch {
public:
    explicit Stopwatch(std::int64_t& sink) : sink_(sink), start_(Clock::now()) {}
    ~Stopwatch()
    {
        sink_ += std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start_).count();
    }
    Stopwatch(const Stopwatch&) = delete;
    Stopwatch& operator=(const Stopwatch&) = delete;

private:
    std::int64_t& sink_;
    Clock::time_point start_;
};

std::uint64_t mix_seed(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::vector<Interval> all_bounds(const ScoreModel& model)
{
    std::vector<Interval> out;
    out.reserve(model.size());
    for (std::size_t i = 0; i < model.size(); ++i) {
        out.push_back(model.bounds(i));
    }
    return out;
}

// Mutable state of one solve run. Candidate indices are problem positions.
class Run {
public:
    Run(const Problem& problem, const Policy& policy, Oracle& oracle, const Limits& limits)
        : problem_(problem), policy_(policy), oracle_(oracle), limits_(limits),
          knowns_(problem.knowns)
    {
        for (std::size_t i = 0; i < problem.candidates.size(); ++i) {
            alive_.push_back(i);
        }
    }

    SolveResult operator()()
    {
        if (problem_.candidates.empty()) {
            throw ValidationError("no candidates");
        }
        refresh();
        if (!limits_.max_calls) {
            max_calls_ = askable().size();
        } else {
            max_calls_ = *limits_.max_calls;
        }
        if (policy_.selector == Selector::Baseline) {
            return run_baseline();
        }
        std::optional<WinnerDistribution> dist;
        while (!winner_) {
            const auto open = askable();
            if (open.empty()) {
                return finish_uncertified(dist);
            }
            if (!dist && policy_.selector != Selector::Random) {
                dist = estimate();
            }
            Question q;
            {
                Stopwatch sw(result_.nanos.selection);
                if (policy_.selector == Selector::Random) {
                    q = select_random(open, mix_seed(policy_.rng_seed + result_.oracle_calls));
                } else {
                    q = select_entr_red(alive_candidates(), dist->probs, open);
                }
            }
            ask(q);
            refresh();
            dist.reset();
            if (winner_) {
                record_one_hot(*winner_);
            } else if (policy_.selector == Selector::Random) {
                stamp_last();
            } else {
                dist = estimate();
                record_probs(dist->probs);
            }
        }
        return finish(*winner_, true);
    }

private:
    // Rebuilds bounds for all candidates, prunes and looks for a winner.
    void refresh()
    {
        Stopwatch sw(result_.nanos.bounds);
        full_ = std::make_unique<ScoreModel>(problem_.candidates, problem_.spec, knowns_);
        if (policy_.selector != Selector::Baseline) {
            const auto model = alive_model();
            const auto keep = surviving_candidates(model);
            if (keep.size() != alive_.size()) {
                std::vector<std::size_t> next;
                for (auto i : keep) {
                    next.push_back(alive_[i]);
                }
                for (auto i : alive_) {
                    if (!std::binary_search(next.begin(), next.end(), i)) {
                        pruned_.push_back(i);
                    }
                }
                std::sort(pruned_.begin(), pruned_.end());
                alive_ = std::move(next);
            }
        }
        const auto model = alive_model();
        if (auto w = find_winner(model)) {
            winner_ = alive_[*w];
        }
    }

    [[nodiscard]] std::vector<Candidate> alive_candidates() const
    {
        std::vector<Candidate> out;
        out.reserve(alive_.size());
        for (auto i : alive_) {
            out.push_back(problem_.candidates[i]);
        }
        return out;
    }

    [[nodiscard]] ScoreModel alive_model() const
    {
        return ScoreModel(alive_candidates(), problem_.spec, knowns_);
    }

    // Unknown questions of the live candidates that have not been narrowed.
    [[nodiscard]] std::vector<Question> askable() const
    {
        const auto model = alive_model();
        std::vector<Question> out;
        for (const auto& q : model.unknowns()) {
            if (!knowns_.find_range(q)) {
                out.push_back(q);
            }
        }
        return out;
    }

    WinnerDistribution estimate()
    {
        Stopwatch sw(result_.nanos.probability);
        const auto model = alive_model();
        return policy_.selector == Selector::EntrRedInd ? prob_ind(model) : prob_dep(model);
    }

    void ask(const Question& q)
    {
        if (result_.oracle_calls >= max_calls_) {
            throw BudgetExceeded(finish_partial());
        }
        OracleResponse response;
        {
            Stopwatch sw(result_.nanos.oracle);
            response = oracle_.ask(q);
        }
        ++result_.oracle_calls;
        if (response.kind == OracleResponse::Kind::Point) {
            knowns_ = record_response(std::move(knowns_), problem_.spec, q, response.value());
        } else {
            const std::array<OracleResponse, 1> one{response};
            const auto pdf = process_responses(one, problem_.spec);
            knowns_ = record_range(std::move(knowns_), problem_.spec, q, pdf.min_supported(),
                                   pdf.max_supported());
        }
        TraceStep step;
        step.iteration = result_.oracle_calls;
        step.question = q;
        step.response = response;
        result_.steps.push_back(std::move(step));
    }

    // Called after refresh(): fills the bounds and pruned set of the last step.
    void stamp_last()
    {
        auto& step = result_.steps.back();
        step.bounds = all_bounds(*full_);
        step.pruned = pruned_;
    }

    void record_probs(const Eigen::VectorXd& alive_probs)
    {
        stamp_last();
        auto& step = result_.steps.back();
        step.probs.assign(problem_.candidates.size(), 0.0);
        for (std::size_t i = 0; i < alive_.size(); ++i) {
            step.probs[alive_[i]] = alive_probs[static_cast<Eigen::Index>(i)];
        }
        step.entropy = entropy(alive_probs);
    }

    // A certified answer has no remaining uncertainty.
    void record_one_hot(std::size_t winner)
    {
        if (result_.steps.empty()) {
            return;
        }
        stamp_last();
        auto& step = result_.steps.back();
        step.probs.assign(problem_.candidates.size(), 0.0);
        step.probs[winner] = 1.0;
        step.entropy = 0.0;
    }

    SolveResult run_baseline()
    {
        if (alive_.size() == 1) {
            return finish(alive_.front(), true);
        }
        for (const auto& q : askable()) {
            ask(q);
            {
                Stopwatch sw(result_.nanos.bounds);
                full_ = std::make_unique<ScoreModel>(problem_.candidates, problem_.spec, knowns_);
            }
            stamp_last();
        }
        refresh();
        if (winner_) {
            record_one_hot(*winner_);
            return finish(*winner_, true);
        }
        return finish_uncertified(std::nullopt);
    }

    // No askable question is left but range answers keep the winner open.
    SolveResult finish_uncertified(const std::optional<WinnerDistribution>& dist)
    {
        std::size_t pick = alive_.front();
        if (dist) {
            pick = alive_[static_cast<std::size_t>(dist->argmax())];
        } else {
            for (auto i : alive_) {
                if (full_->bounds(i).lb > full_->bounds(pick).lb) {
                    pick = i;
                }
            }
        }
        return finish(pick, false);
    }

    SolveResult finish(std::size_t winner, bool certified)
    {
        result_.winner = problem_.candidates[winner];
        result_.certified = certified;
        return std::move(result_);
    }

    SolveResult finish_partial()
    {
        SolveResult partial = result_;
        partial.certified = false;
        partial.winner = problem_.candidates[alive_.front()];
        return partial;
    }

    const Problem& problem_;
    const Policy& policy_;
    Oracle& oracle_;
    const Limits& limits_;
    KnownStore knowns_;
    std::vector<std::size_t> alive_;
    std::vector<std::size_t> pruned_;
    std::unique_ptr<ScoreModel> full_;
    std::optional<std::size_t> winner_;
    std::size_t max_calls_ = 0;
    SolveResult result_;
};

nlohmann::json response_json(const OracleResponse& r)
{
    if (r.kind == OracleResponse::Kind::Point) {
        return r.value();
    }
    return nlohmann::json::array({r.lo, r.hi});
}

}  // namespace

std::string_view to_string(Selector s) noexcept
{
    switch (s) {
    case Selector::EntrRedDep:
        return "ENTRRED_DEP";
    case Selector::EntrRedInd:
        return "ENTRRED_IND";
    case Selector::Random:
        return "RANDOM";
    case Selector::Baseline:
        return "BASELINE";
    }
    return "?";
}

Selector parse_selector(std::string_view text)
{
    if (text == "entrred-dep" || text == "ENTRRED_DEP") {
        return Selector::EntrRedDep;
    }
    if (text == "entrred-ind" || text == "ENTRRED_IND") {
        return Selector::EntrRedInd;
    }
    if (text == "random" || text == "RANDOM") {
        return Selector::Random;
    }
    if (text == "baseline" || text == "BASELINE") {
        return Selector::Baseline;
    }
    throw ValidationError("unknown policy: " + std::string(text));
}

std::vector<Candidate> enumerate_candidates(std::span<const EntityId> entities, std::size_t k,
                                            std::optional<std::size_t> cap)
{
    const std::size_t n = entities.size();
    if (k == 0 || k > n) {
        throw ValidationError("k must be in [1, number of entities]");
    }
    std::vector<Candidate> out;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) {
        idx[i] = i;
    }
    while (!cap || out.size() < *cap) {
        std::vector<EntityId> members;
        members.reserve(k);
        for (auto i : idx) {
            members.push_back(entities[i]);
        }
        out.push_back(Candidate::make(out.size(), std::move(members)));
        std::size_t pos = k;
        while (pos > 0 && idx[pos - 1] == n - k + pos - 1) {
            --pos;
        }
        if (pos == 0) {
            break;
        }
        ++idx[pos - 1];
        for (std::size_t j = pos; j < k; ++j) {
            idx[j] = idx[j - 1] + 1;
        }
    }
    return out;
}

std::optional<std::size_t> find_winner(const ScoreModel& model)
{
    for (std::size_t i = 0; i < model.size(); ++i) {
        bool all = true;
        for (std::size_t j = 0; j < model.size() && all; ++j) {
            all = i == j || model.dominates(i, j);
        }
        if (all) {
            return i;
        }
    }
    return std::nullopt;
}

std::optional<Candidate> find_winner(std::span<const Candidate> candidates,
                                     const ScoringSpec& spec, const KnownStore& knowns)
{
    if (auto i = find_winner(ScoreModel(candidates, spec, knowns))) {
        return candidates[*i];
    }
    return std::nullopt;
}

std::vector<std::size_t> surviving_candidates(const ScoreModel& model)
{
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < model.size(); ++j) {
        bool dominated = false;
        for (std::size_t i = 0; i < model.size() && !dominated; ++i) {
            dominated = i != j && model.strictly_dominates(i, j);
        }
        if (!dominated) {
            out.push_back(j);
        }
    }
    return out;
}

std::vector<Candidate> prune_dominated(std::span<const Candidate> candidates,
                                       const ScoringSpec& spec, const KnownStore& knowns)
{
    std::vector<Candidate> out;
    for (auto i : surviving_candidates(ScoreModel(candidates, spec, knowns))) {
        out.push_back(candidates[i]);
    }
    return out;
}

SolveResult solve(const Problem& problem, const Policy& policy, Oracle& oracle,
                  const Limits& limits)
{
    return Run(problem, policy, oracle, limits)();
}

void write_trace(std::ostream& out, const SolveResult& result, const ScoringSpec& spec,
                 const TraceOptions& options)
{
    using nlohmann::json;
    for (const auto& step : result.steps) {
        json args = json::array();
        for (const auto& a : step.question.args) {
            args.push_back(a.str());
        }
        json bounds = json::array();
        for (const auto& b : step.bounds) {
            bounds.push_back({b.lb, b.ub});
        }
        json line{
            {"iter", step.iteration},
            {"question", {{"construct", spec.construct(step.question.construct).name},
                          {"args", std::move(args)}}},
            {"response", response_json(step.response)},
            {"bounds", std::move(bounds)},
            {"probs", step.probs},
            {"entropy", step.entropy ? json(*step.entropy) : json(nullptr)},
            {"pruned", step.pruned},
        };
        out << line.dump() << '\n';
    }
    json members = json::array();
    for (const auto& m : result.winner.members) {
        members.push_back(m.str());
    }
    const auto ns = [&](std::int64_t v) { return options.timings ? v : 0; };
    json last{
        {"winner", {{"id", result.winner.id}, {"members", std::move(members)}}},
        {"oracleCalls", result.oracle_calls},
        {"certified", result.certified},
        {"perTaskNanos", {{"bounds", ns(result.nanos.bounds)},
                          {"probability", ns(result.nanos.probability)},
                          {"selection", ns(result.nanos.selection)},
                          {"oracle", ns(result.nanos.oracle)}}},
    };
    out << last.dump() << '\n';
}

}  // namespace topk
