#pragma once

// Discrete score pdfs on an evenly spaced support and the max-convolution
// primitive P(A >= B).

#include "topk/bounds.hpp"

#include <Eigen/Core>

#include <cstddef>

namespace topk {

/// Probability masses on the support origin, origin + step, ...
/// Masses are nonnegative and sum to one.
class DiscretePdf {
public:
    DiscretePdf(double origin, double step, Eigen::VectorXd masses);

    [[nodiscard]] double origin() const noexcept { return origin_; }
    [[nodiscard]] double step() const noexcept { return step_; }
    [[nodiscard]] Eigen::Index size() const noexcept { return masses_.size(); }
    [[nodiscard]] const Eigen::VectorXd& masses() const noexcept { return masses_; }
    [[nodiscard]] double value(Eigen::Index i) const noexcept
    {
        return origin_ + step_ * static_cast<double>(i);
    }
    [[nodiscard]] double min_value() const noexcept { return origin_; }
    [[nodiscard]] double max_value() const noexcept { return value(size() - 1); }

    /// P(X <= value(i)) for every i.
    [[nodiscard]] Eigen::VectorXd cdf() const;

private:
    double origin_;
    double step_;
    Eigen::VectorXd masses_;
};

/// Uniform masses on lb, lb + step, ..., ub.
[[nodiscard]] DiscretePdf uniform_grid_pdf(const Interval& iv, double step);

[[nodiscard]] DiscretePdf point_mass(double v);

/// Index offset of b's origin inside a's grid. Throws if the supports do not
/// lie on a common lattice. Single-point pdfs adopt the other side's step.
[[nodiscard]] std::ptrdiff_t grid_offset(const DiscretePdf& a, const DiscretePdf& b);

/// P(A >= B) for independent A ~ a, B ~ b (ties count). O(|a| + |b|).
[[nodiscard]] double geq_probability(const DiscretePdf& a, const DiscretePdf& b);

/// sum_i weights(i) * P(B <= a.value(i)); the weighted form of geq_probability.
/// `weights` is aligned with the support of `a`.
[[nodiscard]] double weighted_geq_probability(const DiscretePdf& a, const Eigen::VectorXd& weights,
                                              const DiscretePdf& b);

/// Distribution of A + B for independent A ~ a, B ~ b on a common lattice.
[[nodiscard]] DiscretePdf convolve(const DiscretePdf& a, const DiscretePdf& b);

}  // namespace topk
