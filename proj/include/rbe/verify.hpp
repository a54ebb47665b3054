#pragma once

#include "rbe/barrier.hpp"
#include "rbe/distance.hpp"
#include "rbe/law.hpp"

#include <cstdint>
#include <vector>

namespace rbe {

struct SimConfig {
    long n_paths = 100000;
    double step = 1e-3;       // Euler step
    double horizon = 1e4;     // path truncation time
    std::uint64_t seed = 0;
    enum class Scheme { BridgeCorrected, Naive };
    Scheme scheme = Scheme::BridgeCorrected;
    bool parallel = true;
};

/// Per-path outcomes, index-aligned so parallel runs merge deterministically.
struct StoppedSamples {
    std::vector<double> tau;           // stopping time; horizon for truncated paths
    std::vector<double> value;         // stopped value, exactly a barrier level; NaN if truncated
    std::vector<std::uint8_t> truncated;
    long n_truncated = 0;

    double truncated_fraction() const {
        return tau.empty() ? 0.0 : static_cast<double>(n_truncated) / tau.size();
    }
};

/// Simulate B stopped at the reversed barrier. Gaussian increments of variance
/// `step`, split exactly at barrier breakpoints; with the bridge-corrected
/// scheme each level gets an independent Brownian-bridge crossing test and tau
/// is recorded at the step midpoint with the stopped value snapped to the level.
StoppedSamples simulate_stopped(const Barrier& barrier, const SimConfig& cfg);

/// Simulate the Azema-Yor embedding of a centered law: stop when the running
/// maximum reaches the barycenter of the current position. Comparison
/// embedding for the truncated-expectation optimality check.
StoppedSamples simulate_azema_yor(const DiscreteLaw& law, const SimConfig& cfg);

struct CurvePoint {
    double T = 0.0;
    double value = 0.0;
    double se = 0.0;
};

struct EmbedReport {
    long n_paths = 0;
    std::uint64_t seed = 0;
    double truncated_path_fraction = 0.0;
    double levy_dist = 0.0;   // empirical stopped law vs target law
    double ks_dist = 0.0;
    double mean_tau = 0.0, se_mean_tau = 0.0, var_tau = 0.0;
    double second_moment_mu = 0.0;
    bool law_centered = false;
    bool moment_check_pass = false; // |mean_tau - second moment| <= 3 SE, centered laws
    std::vector<std::pair<double, double>> empirical_cdf_points; // (value, cumulative prob)
    std::vector<CurvePoint> truncated_expectation_curve;         // E(tau ^ T)
    std::vector<CurvePoint> comparison_curve;                    // E(sigma ^ T), when present
};

/// Simulate, compare the stopped law against `law`, and assemble the report.
/// Throws HorizonTruncationExcess when more than 1e-3 of paths are truncated.
EmbedReport verify_embedding(const DiscreteLaw& law, const Barrier& barrier, const SimConfig& cfg,
                             const std::vector<double>& t_grid = {0.5, 1.0, 2.0, 4.0, 8.0});

struct TruncatedComparison {
    struct Row {
        double T = 0.0;
        double e_tau = 0.0, se_tau = 0.0;
        double e_sigma = 0.0, se_sigma = 0.0;
        double pooled_se = 0.0;
        bool pass = false;
    };
    std::vector<Row> rows;
    Row sqrt_check;  // strictly concave functional F(t) = sqrt(t), T unused
    bool all_pass = false;
};

/// Per-T comparison of truncated expectations: pass iff
/// E(tau ^ T) <= E(sigma ^ T) + 2 * pooled SE, plus the sqrt(t) spot check.
TruncatedComparison compare_truncated_expectations(const StoppedSamples& tau_samples,
                                                   const StoppedSamples& sigma_samples,
                                                   const std::vector<double>& t_grid);

/// E(tau ^ T) with standard error; truncated paths enter as horizon ^ T,
/// which is exact whenever T does not exceed the simulation horizon.
CurvePoint truncated_expectation(const StoppedSamples& s, double T);

} // namespace rbe
