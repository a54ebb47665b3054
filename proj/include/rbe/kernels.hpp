#pragma once

#include <cmath>

namespace rbe::kernels {

/// Truncation control for the image-series kernels. The series terms decay
/// like Gaussian tails in n*(y-z)/sqrt(t); summation stops once two
/// consecutive terms fall below series_tol.
struct KernelConfig {
    double series_tol = 1e-13;
    int max_terms = 200;
    double quad_tol = 1e-10;
};

inline double phi(double x) {
    static constexpr double inv_sqrt_2pi = 0.39894228040143267794;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

inline double Phi(double x) {
    return 0.5 * std::erfc(-x * 0.70710678118654752440);
}

/// Density of B_t on {tau_y > t}, single absorbing level y > 0, x < y.
double survival_density_1s(double t, double x, double y);

/// P(tau_y <= t) for a single level y > 0. hit_cdf_1s(0, y) = 0, -> 1 as t -> inf.
double hit_cdf_1s(double t, double y);

/// Density of B_t on {tau_{y,z} > t} in the strip z < x < y (z < 0 < y).
double survival_density_2s(double t, double x, double y, double z, const KernelConfig& cfg);

/// P(tau_y < tau_z, tau_{y,z} <= t). t = +inf gives the gambler's-ruin mass -z/(y-z).
double hit_upper_first_cdf(double t, double y, double z, const KernelConfig& cfg);

/// P(tau_z < tau_y, tau_{y,z} <= t). t = +inf gives y/(y-z).
double hit_lower_first_cdf(double t, double y, double z, const KernelConfig& cfg);

} // namespace rbe::kernels
