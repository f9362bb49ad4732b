#include "topk/winner.hpp"

#include "topk/distribution.hpp"
#include "topk/error.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace topk {

namespace {

// Nearest integer; inputs are lattice offsets so only rounding noise is removed.
std::int64_t nearest(double x)
{
    return static_cast<std::int64_t>(x < 0.0 ? x - 0.5 : x + 0.5);
}

std::int64_t ticks_of(const Interval& iv, double step)
{
    return nearest(iv.width() / step);
}

// P(A >= B) for A, B uniform on the grid points of a and b. Same counting as
// geq_probability without materializing either pdf.
double uniform_geq(const Interval& a, const Interval& b, double step)
{
    const std::int64_t na = ticks_of(a, step) + 1;
    const std::int64_t nb = ticks_of(b, step) + 1;
    const std::int64_t offset = nearest((a.lb - b.lb) / step);
    std::int64_t pairs = 0;
    for (std::int64_t i = 0; i < na; ++i) {
        // b values at indices 0..i + offset lie at or below a's i-th value
        pairs += std::clamp<std::int64_t>(i + offset + 1, 0, nb);
    }
    return static_cast<double>(pairs) / static_cast<double>(na * nb);
}

// Fraction of a's uniform grid points at or above b.lb + x * step, for x in
// 0..out.size()-1.
void uniform_tail(const Interval& a, const Interval& b, double step, std::vector<double>& out)
{
    const std::int64_t na = ticks_of(a, step) + 1;
    const std::int64_t offset = nearest((b.lb - a.lb) / step);
    const double mass = 1.0 / static_cast<double>(na);
    for (std::size_t x = 0; x < out.size(); ++x) {
        const std::int64_t first = static_cast<std::int64_t>(x) + offset;
        out[x] = static_cast<double>(std::clamp<std::int64_t>(na - first, 0, na)) * mass;
    }
}

// Per-target working memory for the chained terms; reused across opponents.
struct Chain {
    std::vector<double> carried;  // posterior of the carried shared part, by tick
    std::vector<double> opponent;  // opponent score pdf, from its eliminated lb
    std::vector<double> scratch;
};

// P(C >= V) with C uniform on `own` and V = R + T, R uniform on the ticks of
// `theirs` minus the carried width and T ~ chain.carried.
double chained_term(const Interval& own, const Interval& theirs, double step, Chain& chain)
{
    const auto shared = static_cast<std::int64_t>(chain.carried.size()) - 1;
    const std::int64_t rest = ticks_of(theirs, step) - shared;
    auto& v = chain.opponent;
    v.assign(static_cast<std::size_t>(rest + shared + 1), 0.0);
    const double r_mass = 1.0 / static_cast<double>(rest + 1);
    for (std::int64_t s = 0; s <= shared; ++s) {
        const double w = chain.carried[static_cast<std::size_t>(s)] * r_mass;
        for (std::int64_t r = 0; r <= rest; ++r) {
            v[static_cast<std::size_t>(s + r)] += w;
        }
    }
    // sum over own's points c of P(V <= c), V indexed from theirs.lb
    const std::int64_t na = ticks_of(own, step) + 1;
    const std::int64_t offset = nearest((own.lb - theirs.lb) / step);
    const auto nv = static_cast<std::int64_t>(v.size());
    double acc = 0.0;
    double total = 0.0;
    std::int64_t j = 0;
    for (std::int64_t i = 0; i < na; ++i) {
        for (; j < nv && j <= i + offset; ++j) {
            acc += v[static_cast<std::size_t>(j)];
        }
        total += j >= nv ? 1.0 : acc;
    }
    return std::min(1.0, total / static_cast<double>(na));
}

// Posterior of the shared part T (0..shared ticks above its minimum) of an
// opponent's eliminated score V = T + R, given the evidence C >= V with C
// uniform on `own`. T and R are uniform a priori. Leaves chain.carried empty
// when the evidence is impossible.
void carry_shared_part(const Interval& own, const Interval& theirs, std::int64_t shared,
                       double step, Chain& chain)
{
    const std::int64_t rest = ticks_of(theirs, step) - shared;
    auto& likelihood = chain.scratch;
    likelihood.resize(static_cast<std::size_t>(rest + shared + 1));
    uniform_tail(own, theirs, step, likelihood);
    auto& post = chain.carried;
    post.assign(static_cast<std::size_t>(shared + 1), 0.0);
    double z = 0.0;
    for (std::int64_t s = 0; s <= shared; ++s) {
        double acc = 0.0;
        for (std::int64_t r = 0; r <= rest; ++r) {
            acc += likelihood[static_cast<std::size_t>(s + r)];
        }
        post[static_cast<std::size_t>(s)] = acc;
        z += acc;
    }
    if (!(z > 0.0)) {
        post.clear();
        return;
    }
    for (auto& p : post) {
        p *= 1.0 / z;
    }
}

}  // namespace

Eigen::Index WinnerDistribution::argmax() const
{
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < probs.size(); ++i) {
        if (probs[i] > probs[best]) {
            best = i;
        }
    }
    return best;
}

WinnerDistribution normalize(Eigen::VectorXd raw)
{
    if ((raw.array() < 0.0).any()) {
        throw ValidationError("winner weights must be nonnegative");
    }
    WinnerDistribution out;
    const double sum = raw.sum();
    if (sum > 0.0) {
        out.probs = raw / sum;
    } else {
        out.probs = Eigen::VectorXd::Constant(raw.size(), 1.0 / static_cast<double>(raw.size()));
        out.all_zero = true;
    }
    out.raw = std::move(raw);
    return out;
}

WinnerDistribution prob_ind(const ScoreModel& model)
{
    const auto m = static_cast<Eigen::Index>(model.size());
    const double step = model.step();
    // prefix sums once per candidate, then each pair is a single O(m) pass
    std::vector<DiscretePdf> pdfs;
    std::vector<Eigen::VectorXd> cdfs;
    pdfs.reserve(model.size());
    cdfs.reserve(model.size());
    for (std::size_t i = 0; i < model.size(); ++i) {
        pdfs.push_back(uniform_grid_pdf(model.bounds(i), step));
        cdfs.push_back(pdfs.back().cdf());
    }
    Eigen::VectorXd raw = Eigen::VectorXd::Ones(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto& a = pdfs[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < m; ++j) {
            if (i == j) {
                continue;
            }
            const auto& b = pdfs[static_cast<std::size_t>(j)];
            const auto& cdf_b = cdfs[static_cast<std::size_t>(j)];
            const std::int64_t offset = nearest((a.origin() - b.origin()) / step);
            const auto nb = static_cast<std::int64_t>(b.size());
            double term = 0.0;
            for (Eigen::Index x = 0; x < a.size(); ++x) {
                const std::int64_t y = x + offset;  // a's x-th value inside b's support
                if (y >= 0) {
                    term += a.masses()[x] * (y >= nb - 1 ? 1.0 : cdf_b[y]);
                }
            }
            raw[i] *= std::min(1.0, term);
        }
    }
    return normalize(std::move(raw));
}

WinnerDistribution prob_dep(const ScoreModel& model)
{
    const std::size_t count = model.size();
    const double step = model.step();
    std::vector<Interval> bounds(count);
    for (std::size_t i = 0; i < count; ++i) {
        bounds[i] = model.bounds(i);
    }
    // Shared widths come from marks instead of pairwise merges: in_target
    // flags the target's unknowns, owner[u] is the last opponent holding u.
    constexpr auto kNone = static_cast<std::size_t>(-1);
    std::vector<char> in_target(model.unknowns().size(), 0);
    std::vector<std::size_t> owner(model.unknowns().size(), kNone);

    Eigen::VectorXd raw = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(count));
    Chain chain;
    for (std::size_t c = 0; c < count; ++c) {
        for (auto u : model.unknown_ids(c)) {
            in_target[u] = 1;
        }
        double product = 1.0;
        chain.carried.clear();
        // opponents in id order, skipping c
        for (std::size_t o = c == 0 ? 1 : 0; o < count && product > 0.0;) {
            const std::size_t next = o + 1 == c ? o + 2 : o + 1;
            std::int64_t shared = 0;
            for (auto u : model.unknown_ids(o)) {
                shared += in_target[u] ? model.question_ticks(u) : 0;
                owner[u] = o;
            }
            Interval own = bounds[c];
            Interval theirs = bounds[o];
            own.ub -= step * static_cast<double>(shared);
            theirs.ub -= step * static_cast<double>(shared);

            if (chain.carried.empty()) {
                product *= uniform_geq(own, theirs, step);
            } else {
                product *= chained_term(own, theirs, step, chain);
            }

            std::int64_t link = 0;
            if (next < count) {
                for (auto u : model.unknown_ids(next)) {
                    link += owner[u] == o && !in_target[u] ? model.question_ticks(u) : 0;
                }
            }
            if (link > 0) {
                carry_shared_part(own, theirs, link, step, chain);
            } else {
                chain.carried.clear();
            }
            o = next;
        }
        raw[static_cast<Eigen::Index>(c)] = product;
        for (auto u : model.unknown_ids(c)) {
            in_target[u] = 0;
        }
    }
    return normalize(std::move(raw));
}

WinnerDistribution brute_force_winner_dist(const ScoreModel& model, std::uint64_t cap)
{
    const auto& spec = model.spec();
    const std::size_t count = model.size();
    const std::size_t unknown = model.unknowns().size();
    std::vector<std::uint64_t> levels(unknown);
    std::uint64_t total = 1;
    for (std::size_t u = 0; u < unknown; ++u) {
        levels[u] = static_cast<std::uint64_t>(model.question_levels(static_cast<std::uint32_t>(u)));
        if (total > cap / levels[u]) {
            throw ValidationError("brute force enumeration exceeds the cap");
        }
        total *= levels[u];
    }

    // Scores in grid steps relative to candidate 0's lower bound.
    const double step = model.step();
    std::vector<std::int64_t> score(count);
    for (std::size_t i = 0; i < count; ++i) {
        score[i] = std::llround((model.bounds(i).lb - model.bounds(0).lb) / step);
    }
    std::vector<std::vector<std::size_t>> touched(unknown);
    for (std::size_t i = 0; i < count; ++i) {
        for (auto u : model.unknown_ids(i)) {
            touched[u].push_back(i);
        }
    }
    std::vector<std::int64_t> weight(unknown);
    for (std::size_t u = 0; u < unknown; ++u) {
        weight[u] = static_cast<std::int64_t>(spec.construct(model.unknowns()[u].construct).weight);
    }

    Eigen::VectorXd wins = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(count));
    std::vector<std::uint64_t> digit(unknown, 0);
    std::vector<std::size_t> tied;
    tied.reserve(count);
    for (std::uint64_t a = 0; a < total; ++a) {
        std::int64_t best = score[0];
        tied.assign(1, 0);
        for (std::size_t i = 1; i < count; ++i) {
            if (score[i] > best) {
                best = score[i];
                tied.assign(1, i);
            } else if (score[i] == best) {
                tied.push_back(i);
            }
        }
        const double share = 1.0 / static_cast<double>(tied.size());
        for (auto i : tied) {
            wins[static_cast<Eigen::Index>(i)] += share;
        }
        // Odometer step with incremental score updates.
        for (std::size_t u = 0; u < unknown; ++u) {
            if (digit[u] + 1 < levels[u]) {
                ++digit[u];
                for (auto i : touched[u]) {
                    score[i] += weight[u];
                }
                break;
            }
            const auto back = static_cast<std::int64_t>(digit[u]) * weight[u];
            digit[u] = 0;
            for (auto i : touched[u]) {
                score[i] -= back;
            }
        }
    }
    auto out = normalize(wins);
    return out;
}

WinnerDistribution prob_ind(std::span<const Candidate> candidates, const ScoringSpec& spec,
                            const KnownStore& knowns)
{
    return prob_ind(ScoreModel(candidates, spec, knowns));
}

WinnerDistribution prob_dep(std::span<const Candidate> candidates, const ScoringSpec& spec,
                            const KnownStore& knowns)
{
    return prob_dep(ScoreModel(candidates, spec, knowns));
}

WinnerDistribution brute_force_winner_dist(std::span<const Candidate> candidates,
                                           const ScoringSpec& spec, const KnownStore& knowns,
                                           std::uint64_t cap)
{
    return brute_force_winner_dist(ScoreModel(candidates, spec, knowns), cap);
}

}  // namespace topk
