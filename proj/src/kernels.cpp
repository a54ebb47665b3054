#include "rbe/kernels.hpp"
#include "rbe/errors.hpp"

#include <limits>

namespace rbe::kernels {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void domain(const std::string& msg) {
    throw Error(ErrorKind::DomainError, msg);
}

// 2[Phi(a/sqrt(t)) - Phi(b/sqrt(t))] for a > b > 0, written as a difference of
// complementary error functions of positive arguments so no cancellation of
// near-1 values occurs.
inline double two_phi_diff(double a, double b, double sqt) {
    const double c = 0.70710678118654752440; // 1/sqrt(2)
    return std::erfc(b * c / sqt) - std::erfc(a * c / sqt);
}

} // namespace

double survival_density_1s(double t, double x, double y) {
    if (!(t > 0.0)) domain("survival_density_1s: t must be > 0");
    if (!(y > 0.0)) domain("survival_density_1s: level y must be > 0");
    if (!(x < y)) domain("survival_density_1s: x must lie below y");
    const double sqt = std::sqrt(t);
    const double v = (phi(x / sqt) - phi((x - 2.0 * y) / sqt)) / sqt;
    return v > 0.0 ? v : 0.0;
}

double hit_cdf_1s(double t, double y) {
    if (!(y > 0.0)) domain("hit_cdf_1s: level y must be > 0");
    if (t < 0.0) domain("hit_cdf_1s: t must be >= 0");
    if (t == 0.0) return 0.0;
    if (t == kInf) return 1.0;
    // 2[1 - Phi(y/sqrt(t))] = erfc(y/sqrt(2t))
    return std::erfc(y / std::sqrt(2.0 * t));
}

double survival_density_2s(double t, double x, double y, double z, const KernelConfig& cfg) {
    if (!(t > 0.0)) domain("survival_density_2s: t must be > 0");
    if (!(z < 0.0 && 0.0 < y)) domain("survival_density_2s: need z < 0 < y");
    if (!(z < x && x < y)) domain("survival_density_2s: x must lie in (z, y)");
    const double sqt = std::sqrt(t);
    const double w = y - z;

    auto term = [&](double n) {
        const double u = x + 2.0 * n * w;
        return phi(u / sqt) - phi((u - 2.0 * y) / sqt);
    };

    double sum = term(0.0);
    int below = 0;
    int n = 1;
    for (; n <= cfg.max_terms; ++n) {
        const double tp = term(static_cast<double>(n));
        const double tm = term(static_cast<double>(-n));
        sum += tp + tm;
        if (std::abs(tp) + std::abs(tm) < cfg.series_tol) {
            if (++below >= 2) break;
        } else {
            below = 0;
        }
    }
    if (n > cfg.max_terms)
        throw Error(ErrorKind::SeriesNotConverged,
                    "survival_density_2s: image series not converged at max_terms");
    sum /= sqt;
    if (sum < -cfg.series_tol)
        throw Error(ErrorKind::NumericalError, "survival_density_2s: series evaluated negative");
    return sum > 0.0 ? sum : 0.0;
}

namespace {

// Shared series for Eqs. of the strip exit split by side. Terms are
// erfc-pair differences with positive arguments; `off` is +z for the upper
// barrier, -y (as b-offset) handled by the caller via (lo, hi) arguments:
// term(n) = erfc(((2n+1)w + lo)/sqrt(2t)) - erfc(((2n+1)w + hi)/sqrt(2t)).
double strip_hit_series(double t, double w, double lo, double hi, const KernelConfig& cfg,
                        const char* what) {
    const double c = 0.70710678118654752440;
    const double inv = c / std::sqrt(t);
    double sum = 0.0;
    int below = 0;
    int n = 0;
    for (; n <= cfg.max_terms; ++n) {
        const double m = (2.0 * n + 1.0) * w;
        const double term = std::erfc((m + lo) * inv) - std::erfc((m + hi) * inv);
        sum += term;
        if (std::abs(term) < cfg.series_tol) {
            if (++below >= 2) break;
        } else {
            below = 0;
        }
    }
    if (n > cfg.max_terms)
        throw Error(ErrorKind::SeriesNotConverged, std::string(what) + ": series not converged at max_terms");
    if (sum < -cfg.series_tol)
        throw Error(ErrorKind::NumericalError, std::string(what) + ": series evaluated negative");
    if (sum < 0.0) sum = 0.0;
    return sum < 1.0 ? sum : 1.0;
}

} // namespace

double hit_upper_first_cdf(double t, double y, double z, const KernelConfig& cfg) {
    if (!(z < 0.0 && 0.0 < y)) domain("hit_upper_first_cdf: need z < 0 < y");
    if (t < 0.0) domain("hit_upper_first_cdf: t must be >= 0");
    if (t == 0.0) return 0.0;
    if (t == kInf) return -z / (y - z);
    // 2 sum_n [Phi(((2n+1)w - z)/sqrt(t)) - Phi(((2n+1)w + z)/sqrt(t))]
    return strip_hit_series(t, y - z, z, -z, cfg, "hit_upper_first_cdf");
}

double hit_lower_first_cdf(double t, double y, double z, const KernelConfig& cfg) {
    if (!(z < 0.0 && 0.0 < y)) domain("hit_lower_first_cdf: need z < 0 < y");
    if (t < 0.0) domain("hit_lower_first_cdf: t must be >= 0");
    if (t == 0.0) return 0.0;
    if (t == kInf) return y / (y - z);
    // 2 sum_n [Phi(((2n+1)w + y)/sqrt(t)) - Phi(((2n+1)w - y)/sqrt(t))]
    return strip_hit_series(t, y - z, -y, y, cfg, "hit_lower_first_cdf");
}

} // namespace rbe::kernels
