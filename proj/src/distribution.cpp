#include "topk/distribution.hpp"

#include "topk/error.hpp"

#include <cmath>

namespace topk {

namespace {

constexpr double kMassTolerance = 1e-9;
constexpr double kLatticeTolerance = 1e-7;

bool is_integral(double x) noexcept
{
    return std::abs(x - std::round(x)) <= kLatticeTolerance * std::max(1.0, std::abs(x));
}

}  // namespace

DiscretePdf::DiscretePdf(double origin, double step, Eigen::VectorXd masses)
    : origin_(origin), step_(step), masses_(std::move(masses))
{
    if (masses_.size() == 0) {
        throw ValidationError("pdf needs at least one support value");
    }
    if (!(step_ > 0.0) || !std::isfinite(step_) || !std::isfinite(origin_)) {
        throw ValidationError("pdf step must be positive and finite");
    }
    if ((masses_.array() < 0.0).any()) {
        throw ValidationError("pdf masses must be nonnegative");
    }
    if (std::abs(masses_.sum() - 1.0) > kMassTolerance) {
        throw ValidationError("pdf masses must sum to one");
    }
}

Eigen::VectorXd DiscretePdf::cdf() const
{
    Eigen::VectorXd out(masses_.size());
    double acc = 0.0;
    for (Eigen::Index i = 0; i < masses_.size(); ++i) {
        acc += masses_[i];
        out[i] = acc;
    }
    out[out.size() - 1] = 1.0;
    return out;
}

DiscretePdf uniform_grid_pdf(const Interval& iv, double step)
{
    if (!(step > 0.0)) {
        throw ValidationError("grid step must be positive");
    }
    const double width = (iv.ub - iv.lb) / step;
    if (width < -kLatticeTolerance || !is_integral(width)) {
        throw ValidationError("interval width is not a multiple of the grid step");
    }
    const auto m = static_cast<Eigen::Index>(std::llround(width)) + 1;
    return {iv.lb, step, Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m))};
}

DiscretePdf point_mass(double v)
{
    return {v, 1.0, Eigen::VectorXd::Ones(1)};
}

std::ptrdiff_t grid_offset(const DiscretePdf& a, const DiscretePdf& b)
{
    double step = a.step();
    if (a.size() > 1 && b.size() > 1) {
        if (std::abs(a.step() - b.step()) > kLatticeTolerance * a.step()) {
            throw ValidationError("pdfs have different grid steps");
        }
    } else if (a.size() == 1 && b.size() == 1) {
        // Two points: only the order matters, express it as a sign.
        const double d = b.origin() - a.origin();
        if (std::abs(d) <= kLatticeTolerance * std::max(1.0, std::abs(a.origin()))) {
            return 0;
        }
        return d > 0 ? 1 : -1;
    } else if (a.size() == 1) {
        step = b.step();
    }
    const double offset = (b.origin() - a.origin()) / step;
    if (!is_integral(offset)) {
        throw ValidationError("pdf supports are not on a common grid");
    }
    return static_cast<std::ptrdiff_t>(std::llround(offset));
}

double weighted_geq_probability(const DiscretePdf& a, const Eigen::VectorXd& weights,
                                const DiscretePdf& b)
{
    // a.value(i) sits at index (i - offset) of b's support.
    const auto offset = grid_offset(a, b);
    const Eigen::VectorXd cdf_b = b.cdf();
    const auto nb = static_cast<std::ptrdiff_t>(b.size());
    double total = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        const std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i) - offset;
        if (j < 0) {
            continue;
        }
        total += weights[i] * (j >= nb - 1 ? 1.0 : cdf_b[j]);
    }
    return total;
}

double geq_probability(const DiscretePdf& a, const DiscretePdf& b)
{
    return std::min(1.0, weighted_geq_probability(a, a.masses(), b));
}

DiscretePdf convolve(const DiscretePdf& a, const DiscretePdf& b)
{
    const double step = a.size() > 1 ? a.step() : b.step();
    if (a.size() > 1 && b.size() > 1
        && std::abs(a.step() - b.step()) > kLatticeTolerance * a.step()) {
        throw ValidationError("pdfs have different grid steps");
    }
    Eigen::VectorXd out = Eigen::VectorXd::Zero(a.size() + b.size() - 1);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a.masses()[i] == 0.0) {
            continue;
        }
        out.segment(i, b.size()) += a.masses()[i] * b.masses();
    }
    out /= out.sum();
    return {a.origin() + b.origin(), step, std::move(out)};
}

}  // namespace topk
