#pragma once

#include "rbe/barrier.hpp"
#include "rbe/kernels.hpp"
#include "rbe/law.hpp"

#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace rbe {

struct SolverConfig {
    int grid_points = 2048;      // spatial grid per step
    double root_tol = 1e-10;     // relative tolerance for time roots
    double root_slack = 1e-7;    // absolute probability slack for the final infinite step
    kernels::KernelConfig kernel{};
    bool parallel = true;        // OpenMP over quadrature grid points
};

/// Grid-sampled sub-probability density of the surviving (unstopped) mass.
/// The initial condition delta_0 is carried symbolically via is_delta.
struct SubDensity {
    std::vector<double> x;  // uniform grid, ascending
    std::vector<double> v;  // density values at grid points (>= 0)
    double mass = 1.0;      // quadrature of v (1 for the delta)
    double t = 0.0;         // elapsed time this density lives at
    bool is_delta = true;
    double delta_pos = 0.0;

    static SubDensity delta_at_origin() { return SubDensity{}; }
};

struct SolveStep {
    int k = 0;
    std::string side;  // "upper", "lower", "both", "final"
    double upper = 0.0, lower = 0.0; // active levels during the step
    double t_end = 0.0;
    double dt = 0.0;
    double residual = 0.0;    // |g_k(dt) - target|
    double mass_before = 0.0, mass_after = 0.0;
    double drift = 0.0;       // |mass_after - (mass_before - consumed)|
};

struct SolveReport {
    Barrier barrier;
    std::vector<SolveStep> steps;
    double upper_exhausted_at = std::numeric_limits<double>::infinity();
    double lower_exhausted_at = std::numeric_limits<double>::infinity();
    double max_residual = 0.0;
    double max_drift = 0.0;
};

/// P(first hit of `level` happens by time t | surviving density f_prev);
/// the kernel hit cdf convolved against f_prev. Requires level above the grid.
double convolve_hit_cdf_1s(const SubDensity& f_prev, double level, double t,
                           const SolverConfig& cfg);

/// Strip versions: probability of exiting through the upper (resp. lower)
/// level first, by elapsed time t, from the surviving density f_prev.
double convolve_hit_strip_upper(const SubDensity& f_prev, double upper, double lower,
                                double t, const SolverConfig& cfg);
double convolve_hit_strip_lower(const SubDensity& f_prev, double upper, double lower,
                                double t, const SolverConfig& cfg);

/// Limiting upper-exit probability (t -> inf) from f_prev in the strip.
double convolve_ruin_upper(const SubDensity& f_prev, double upper, double lower,
                           const SolverConfig& cfg);

/// Smallest t with gfun(t) = target_prob, found by bracket doubling plus
/// bisection. Returns +inf when the target equals the limiting mass within
/// root_slack; throws TargetExceedsMass past it.
double find_time_increment(const std::function<double(double)>& gfun, double target_prob,
                           double remaining_mass, double bracket_seed, double root_tol,
                           double root_slack);

/// Advance the surviving density by dt with a single absorbing level above.
SubDensity propagate_subdensity_1s(const SubDensity& f_prev, double level, double dt,
                                   const SolverConfig& cfg);

/// Advance the surviving density by dt inside the strip (lower, upper); either
/// side may be infinite (but not both).
SubDensity propagate_subdensity(const SubDensity& f_prev, double upper, double lower,
                                double dt, const SolverConfig& cfg);

SolveReport solve_one_sided(const DiscreteLaw& law, const SolverConfig& cfg);
SolveReport solve_two_sided(const DiscreteLaw& law, const SolverConfig& cfg);

/// Dispatch on the support case (negative support solved by reflection).
SolveReport solve(const DiscreteLaw& law, const SolverConfig& cfg);

/// Reconstruct the stopped law a barrier embeds by replaying kernel
/// convolutions over the barrier's own segments (independent of any solver
/// intermediate state). Returns atoms at the barrier levels.
std::vector<Atom> replay_stopped_law(const Barrier& barrier, const SolverConfig& cfg);

} // namespace rbe
