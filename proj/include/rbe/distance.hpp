#pragma once

#include "rbe/barrier.hpp"
#include "rbe/law.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace rbe {

/// Right-continuous nondecreasing step function on R, used both for CDFs and
/// for barriers viewed as generalized distribution functions.
class StepFunction {
public:
    /// jumps: (position, value from that position on), positions strictly
    /// increasing, values nondecreasing starting from `base`.
    static StepFunction from_jumps(double base, std::vector<std::pair<double, double>> jumps);

    double value_right(double t) const;
    double value_left(double t) const;
    double base() const noexcept { return base_; }
    double top() const noexcept { return jumps_.empty() ? base_ : jumps_.back().second; }
    const std::vector<std::pair<double, double>>& jumps() const noexcept { return jumps_; }

private:
    StepFunction(double base, std::vector<std::pair<double, double>> jumps)
        : base_(base), jumps_(std::move(jumps)) {}
    double base_ = 0.0;
    std::vector<std::pair<double, double>> jumps_;
};

StepFunction cdf_of(const DiscreteLaw& law);

/// Empirical CDF of a sample (values need not be sorted or distinct).
StepFunction empirical_cdf(std::vector<double> values);

/// A barrier's upper function as a generalized distribution function: 0 below
/// t = -1, the first level on [-1, t_1), then each successive level. Infinite
/// levels are capped at `cap` (the barred-function bookkeeping).
StepFunction barrier_upper_as_cdf(const Barrier& b, double cap);

/// Levy metric between two nondecreasing step functions with matching limits;
/// binary search on epsilon with feasibility checked on the merged breakpoint
/// grid. Result is within tol of the infimum.
double levy_distance(const StepFunction& F, const StepFunction& G, double tol = 1e-9);

/// Kolmogorov-Smirnov distance between two step functions.
double ks_distance(const StepFunction& F, const StepFunction& G);

/// KS distance between a step function and a continuous CDF.
double ks_distance_to_cdf(const StepFunction& F, const std::function<double(double)>& cdf);

} // namespace rbe
