#include "rbe/distance.hpp"
#include "rbe/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rbe {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

StepFunction StepFunction::from_jumps(double base, std::vector<std::pair<double, double>> jumps) {
    double px = -kInf;
    double pv = base;
    for (const auto& [x, v] : jumps) {
        if (!(x > px)) throw Error(ErrorKind::DomainError, "step function jumps must be strictly increasing");
        if (v < pv - 1e-15) throw Error(ErrorKind::DomainError, "step function values must be nondecreasing");
        px = x;
        pv = v;
    }
    return StepFunction(base, std::move(jumps));
}

double StepFunction::value_right(double t) const {
    auto it = std::upper_bound(jumps_.begin(), jumps_.end(), t,
                               [](double v, const auto& j) { return v < j.first; });
    return it == jumps_.begin() ? base_ : (it - 1)->second;
}

double StepFunction::value_left(double t) const {
    auto it = std::lower_bound(jumps_.begin(), jumps_.end(), t,
                               [](const auto& j, double v) { return j.first < v; });
    return it == jumps_.begin() ? base_ : (it - 1)->second;
}

StepFunction cdf_of(const DiscreteLaw& law) {
    std::vector<std::pair<double, double>> jumps;
    double cum = 0.0;
    for (const Atom& a : law.atoms()) {
        cum += a.prob;
        jumps.emplace_back(a.pos, cum);
    }
    jumps.back().second = 1.0;
    return StepFunction::from_jumps(0.0, std::move(jumps));
}

StepFunction empirical_cdf(std::vector<double> values) {
    if (values.empty()) throw Error(ErrorKind::DomainError, "empirical_cdf: no samples");
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    std::vector<std::pair<double, double>> jumps;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!jumps.empty() && jumps.back().first == values[i])
            jumps.back().second = (i + 1) / n;
        else
            jumps.emplace_back(values[i], (i + 1) / n);
    }
    return StepFunction::from_jumps(0.0, std::move(jumps));
}

StepFunction barrier_upper_as_cdf(const Barrier& b, double cap) {
    const auto& segs = b.segments();
    std::vector<std::pair<double, double>> jumps;
    jumps.emplace_back(-1.0, std::min(segs[0].upper, cap));
    for (std::size_t k = 0; k + 1 < segs.size(); ++k)
        jumps.emplace_back(segs[k].t_end, std::min(segs[k + 1].upper, cap));
    return StepFunction::from_jumps(0.0, std::move(jumps));
}

namespace {

bool levy_feasible(const StepFunction& F, const StepFunction& G, double eps) {
    auto ok_at = [&](double t) {
        const double fl_lo = F.value_left(t - eps) - eps, fr_lo = F.value_right(t - eps) - eps;
        const double fl_hi = F.value_left(t + eps) + eps, fr_hi = F.value_right(t + eps) + eps;
        const double gl = G.value_left(t), gr = G.value_right(t);
        return fl_lo <= gl && fr_lo <= gr && gl <= fl_hi && gr <= fr_hi;
    };
    if (F.base() - eps > G.base() || G.base() > F.base() + eps) return false;
    if (F.top() - eps > G.top() || G.top() > F.top() + eps) return false;
    for (const auto& j : G.jumps())
        if (!ok_at(j.first)) return false;
    for (const auto& j : F.jumps()) {
        if (!ok_at(j.first - eps)) return false;
        if (!ok_at(j.first + eps)) return false;
    }
    return true;
}

} // namespace

double levy_distance(const StepFunction& F, const StepFunction& G, double tol) {
    if (levy_feasible(F, G, 0.0)) return 0.0;
    double hi = 1.0;
    int guard = 0;
    while (!levy_feasible(F, G, hi)) {
        hi *= 2.0;
        if (++guard > 100) throw Error(ErrorKind::NumericalError, "levy_distance: no feasible epsilon");
    }
    double lo = 0.0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (levy_feasible(F, G, mid) ? hi : lo) = mid;
    }
    return hi;
}

double ks_distance(const StepFunction& F, const StepFunction& G) {
    double d = std::abs(F.base() - G.base());
    auto probe = [&](double t) {
        d = std::max(d, std::abs(F.value_left(t) - G.value_left(t)));
        d = std::max(d, std::abs(F.value_right(t) - G.value_right(t)));
    };
    for (const auto& j : F.jumps()) probe(j.first);
    for (const auto& j : G.jumps()) probe(j.first);
    return d;
}

double ks_distance_to_cdf(const StepFunction& F, const std::function<double(double)>& cdf) {
    double d = 0.0;
    for (const auto& j : F.jumps()) {
        const double c = cdf(j.first);
        d = std::max(d, std::abs(c - F.value_left(j.first)));
        d = std::max(d, std::abs(c - F.value_right(j.first)));
    }
    return d;
}

} // namespace rbe
