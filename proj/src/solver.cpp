#include "rbe/solver.hpp"
#include "rbe/errors.hpp"

#include <algorithm>
#include <cmath>

namespace rbe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTailSigmas = 8.2;  // Phi(-8.2) ~ 1.2e-16, below any tolerance here
constexpr double kWindowSigmas = 9.0; // phi(9) ~ 1e-18

struct GaussTerm {
    double center;
    double sign;
};

// Decomposition of the survival kernel z -> f(dt, x - z, levels...) as a
// signed sum of Gaussian bumps phi((z - c)/sigma)/sigma. `w` is the strip
// width (inf for the one-sided kernel).
void kernel_centers(double xi, double up, double w, double zlo, double zhi, double reach,
                    std::vector<GaussTerm>& out) {
    out.clear();
    if (!std::isfinite(w)) {
        out.push_back({xi, 1.0});
        out.push_back({2.0 * up - xi, -1.0});
        return;
    }
    const double lo = zlo - reach, hi = zhi + reach;
    // centers c1(n) = xi + 2nw
    {
        const int n0 = static_cast<int>(std::ceil((lo - xi) / (2.0 * w)));
        const int n1 = static_cast<int>(std::floor((hi - xi) / (2.0 * w)));
        for (int n = n0; n <= n1; ++n) out.push_back({xi + 2.0 * n * w, 1.0});
    }
    // centers c2(n) = 2*up - xi - 2nw
    {
        const double base = 2.0 * up - xi;
        const int n0 = static_cast<int>(std::ceil((base - hi) / (2.0 * w)));
        const int n1 = static_cast<int>(std::floor((base - lo) / (2.0 * w)));
        for (int n = n0; n <= n1; ++n) out.push_back({base - 2.0 * n * w, -1.0});
    }
}

inline double gauss_sum_at(const std::vector<GaussTerm>& terms, double z, double inv_sigma) {
    double s = 0.0;
    for (const auto& g : terms) s += g.sign * kernels::phi((z - g.center) * inv_sigma);
    return s * inv_sigma;
}

// Trapezoid with the h^2/12 Euler-Maclaurin endpoint correction (4-point
// one-sided slope estimates). Plain trapezoid leaves an O(h^2 f'(b)) endpoint
// error that breaks the per-step mass tolerance at the default grid size.
double corrected_trapz(const std::vector<double>& u, double h) {
    const std::size_t n = u.size();
    double s = 0.5 * (u.front() + u.back());
    for (std::size_t i = 1; i + 1 < n; ++i) s += u[i];
    s *= h;
    if (n >= 4) {
        const double da = (-11.0 * u[0] + 18.0 * u[1] - 9.0 * u[2] + 2.0 * u[3]) / (6.0 * h);
        const double db = (11.0 * u[n - 1] - 18.0 * u[n - 2] + 9.0 * u[n - 3] - 2.0 * u[n - 4]) / (6.0 * h);
        s -= h * h / 12.0 * (db - da);
    }
    return s;
}

SubDensity reflect(const SubDensity& f) {
    SubDensity r;
    r.mass = f.mass;
    r.t = f.t;
    r.is_delta = f.is_delta;
    r.delta_pos = -f.delta_pos;
    r.x.assign(f.x.rbegin(), f.x.rend());
    for (double& xv : r.x) xv = -xv;
    r.v.assign(f.v.rbegin(), f.v.rend());
    return r;
}

kernels::KernelConfig adjusted_kcfg(const kernels::KernelConfig& k, double t, double w) {
    kernels::KernelConfig out = k;
    if (std::isfinite(w) && w > 0.0 && std::isfinite(t)) {
        const int need = static_cast<int>(5.0 * std::sqrt(t) / w) + 16;
        if (need > out.max_terms) out.max_terms = need;
    }
    return out;
}

// Convolution of an arbitrary pointwise kernel against f_prev, serial, with
// the endpoint-corrected trapezoid. Endpoint values of f_prev are zero so the
// kernel is never evaluated at degenerate arguments there.
template <typename K>
double convolve(const SubDensity& f, K&& kernel_at) {
    if (f.is_delta) return kernel_at(f.delta_pos);
    const std::size_t n = f.x.size();
    std::vector<double> u(n);
    for (std::size_t j = 0; j < n; ++j)
        u[j] = f.v[j] == 0.0 ? 0.0 : kernel_at(f.x[j]) * f.v[j];
    return corrected_trapz(u, f.x[1] - f.x[0]);
}

void require_positive_dt(double dt, const char* what) {
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw Error(ErrorKind::DomainError, std::string(what) + ": dt must be finite and > 0");
}

} // namespace

double convolve_hit_cdf_1s(const SubDensity& f_prev, double level, double t,
                           const SolverConfig& cfg) {
    (void)cfg;
    // the level may sit exactly at the grid top (the previous absorbing
    // boundary, where the density vanishes) but never strictly inside
    const double top = f_prev.is_delta ? f_prev.delta_pos : f_prev.x.back();
    if (f_prev.is_delta ? !(level > top) : level < top)
        throw Error(ErrorKind::DomainError, "convolve_hit_cdf_1s: target level inside grid");
    if (t == 0.0) return 0.0;
    if (t == kInf) return f_prev.mass;
    return convolve(f_prev, [&](double z) { return kernels::hit_cdf_1s(t, level - z); });
}

double convolve_hit_strip_upper(const SubDensity& f_prev, double upper, double lower,
                                double t, const SolverConfig& cfg) {
    if (!std::isfinite(lower))
        return convolve_hit_cdf_1s(f_prev, upper, t, cfg);
    if (t == 0.0) return 0.0;
    const auto kc = adjusted_kcfg(cfg.kernel, t, upper - lower);
    return convolve(f_prev, [&](double z) {
        return kernels::hit_upper_first_cdf(t, upper - z, lower - z, kc);
    });
}

double convolve_hit_strip_lower(const SubDensity& f_prev, double upper, double lower,
                                double t, const SolverConfig& cfg) {
    if (!std::isfinite(upper)) {
        if (t == 0.0) return 0.0;
        if (t == kInf) return f_prev.mass;
        return convolve(f_prev, [&](double z) { return kernels::hit_cdf_1s(t, z - lower); });
    }
    if (t == 0.0) return 0.0;
    const auto kc = adjusted_kcfg(cfg.kernel, t, upper - lower);
    return convolve(f_prev, [&](double z) {
        return kernels::hit_lower_first_cdf(t, upper - z, lower - z, kc);
    });
}

double convolve_ruin_upper(const SubDensity& f_prev, double upper, double lower,
                           const SolverConfig& cfg) {
    (void)cfg;
    if (!std::isfinite(lower)) return f_prev.mass;
    if (!std::isfinite(upper)) return 0.0;
    const double w = upper - lower;
    return convolve(f_prev, [&](double z) { return (z - lower) / w; });
}

double find_time_increment(const std::function<double(double)>& gfun, double target_prob,
                           double remaining_mass, double bracket_seed, double root_tol,
                           double root_slack) {
    if (!(target_prob > 0.0)) return 0.0;
    if (target_prob > remaining_mass + root_slack)
        throw Error(ErrorKind::TargetExceedsMass,
                    "root target " + std::to_string(target_prob) + " exceeds remaining mass " +
                        std::to_string(remaining_mass));
    if (target_prob >= remaining_mass - root_slack) return kInf;

    double lo = 0.0;
    double hi = bracket_seed > 0.0 ? bracket_seed : 1e-6;
    int doublings = 0;
    while (gfun(hi) < target_prob) {
        lo = hi;
        hi *= 2.0;
        if (++doublings > 600)
            throw Error(ErrorKind::NumericalError, "find_time_increment: bracket expansion failed");
    }
    for (int i = 0; i < 400 && (hi - lo) > root_tol * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (gfun(mid) < target_prob ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

// Core grid-to-grid advance: integrate the signed-Gaussian kernel against
// f_prev onto a fresh grid spanning (glo, ghi). Kernel windows exploit the
// Gaussian reach; when sigma is small relative to the input spacing the
// kernel is integrated exactly against the piecewise-linear density instead.
SubDensity propagate_grid(const SubDensity& f, double up, double w, double glo, double ghi,
                          double dt, const SolverConfig& cfg) {
    require_positive_dt(dt, "propagate");
    const int G = std::max(cfg.grid_points, 64);
    SubDensity out;
    out.is_delta = false;
    out.t = f.t + dt;
    out.mass = 0.0;
    out.x.resize(G);
    out.v.assign(G, 0.0);
    const double gh = (ghi - glo) / (G - 1);
    for (int i = 0; i < G; ++i) out.x[i] = glo + gh * i;
    out.x.back() = ghi;

    const double sigma = std::sqrt(dt);
    const double inv_sigma = 1.0 / sigma;
    const double reach = kWindowSigmas * sigma;

    // term budget guard (mirrors the series kernels' SeriesNotConverged)
    if (std::isfinite(w)) {
        const auto kc = adjusted_kcfg(cfg.kernel, dt, w);
        const int count = static_cast<int>((ghi - glo + 2.0 * reach) / (2.0 * w)) + 2;
        if (count > kc.max_terms)
            throw Error(ErrorKind::SeriesNotConverged, "propagate: image series exceeds term budget");
    }

    if (f.is_delta) {
        const double d = f.delta_pos;
        std::vector<GaussTerm> terms;
        for (int i = 0; i < G; ++i) {
            kernel_centers(out.x[i], up, w, d, d, reach, terms);
            const double val = gauss_sum_at(terms, d, inv_sigma);
            out.v[i] = val > 0.0 ? val : 0.0;
        }
        out.v.back() = 0.0;
        if (std::isfinite(w)) out.v.front() = 0.0;
        out.mass = corrected_trapz(out.v, gh);
        return out;
    }

    const std::size_t n = f.x.size();
    const double fh = f.x[1] - f.x[0];
    const double fx0 = f.x.front();
    const bool exact_cells = sigma < 4.0 * fh;

#pragma omp parallel for schedule(static) if (cfg.parallel)
    for (int i = 0; i < G; ++i) {
        const double xi = out.x[i];
        std::vector<GaussTerm> terms;
        kernel_centers(xi, up, w, f.x.front(), f.x.back(), reach, terms);
        double acc = 0.0;
        if (!exact_cells) {
            for (const auto& g : terms) {
                const long j0 = std::max<long>(0, static_cast<long>(std::ceil((g.center - reach - fx0) / fh)));
                const long j1 = std::min<long>(static_cast<long>(n) - 1,
                                               static_cast<long>(std::floor((g.center + reach - fx0) / fh)));
                double s = 0.0;
                for (long j = j0; j <= j1; ++j) {
                    const double wt = (j == 0 || j == static_cast<long>(n) - 1) ? 0.5 : 1.0;
                    s += wt * kernels::phi((f.x[j] - g.center) * inv_sigma) * f.v[j];
                }
                acc += g.sign * s * fh * inv_sigma;
            }
            // endpoint slope correction of the full integrand
            if (n >= 4) {
                double ua[4], ub[4];
                for (int p = 0; p < 4; ++p) {
                    ua[p] = gauss_sum_at(terms, f.x[p], inv_sigma) * f.v[p];
                    ub[p] = gauss_sum_at(terms, f.x[n - 1 - p], inv_sigma) * f.v[n - 1 - p];
                }
                const double da = (-11.0 * ua[0] + 18.0 * ua[1] - 9.0 * ua[2] + 2.0 * ua[3]) / (6.0 * fh);
                const double db = (11.0 * ub[0] - 18.0 * ub[1] + 9.0 * ub[2] - 2.0 * ub[3]) / (6.0 * fh);
                acc -= fh * fh / 12.0 * (db - da);
            }
        } else {
            // exact Gaussian-cell integration against piecewise-linear f
            for (const auto& g : terms) {
                const long j0 = std::max<long>(0, static_cast<long>(std::floor((g.center - reach - fh - fx0) / fh)));
                const long j1 = std::min<long>(static_cast<long>(n) - 2,
                                               static_cast<long>(std::ceil((g.center + reach + fh - fx0) / fh)));
                double s = 0.0;
                for (long j = j0; j <= j1; ++j) {
                    const double A = (f.x[j] - g.center) * inv_sigma;
                    const double B = (f.x[j + 1] - g.center) * inv_sigma;
                    const double P = kernels::Phi(B) - kernels::Phi(A);
                    const double S = sigma * (kernels::phi(A) - kernels::phi(B));
                    const double slope = (f.v[j + 1] - f.v[j]) / fh;
                    s += f.v[j] * P + slope * (S + (g.center - f.x[j]) * P);
                }
                acc += g.sign * s;
            }
        }
        out.v[i] = acc > 0.0 ? acc : 0.0;
    }
    out.v.back() = 0.0;
    if (std::isfinite(w)) out.v.front() = 0.0;
    out.mass = corrected_trapz(out.v, gh);
    return out;
}

} // namespace

SubDensity propagate_subdensity_1s(const SubDensity& f_prev, double level, double dt,
                                   const SolverConfig& cfg) {
    require_positive_dt(dt, "propagate_subdensity_1s");
    const double T = f_prev.t + dt;
    const double glo = -kTailSigmas * std::sqrt(T);
    return propagate_grid(f_prev, level, kInf, glo, level, dt, cfg);
}

SubDensity propagate_subdensity(const SubDensity& f_prev, double upper, double lower,
                                double dt, const SolverConfig& cfg) {
    const bool up_fin = std::isfinite(upper);
    const bool lo_fin = std::isfinite(lower);
    if (up_fin && lo_fin)
        return propagate_grid(f_prev, upper, upper - lower, lower, upper, dt, cfg);
    if (up_fin) return propagate_subdensity_1s(f_prev, upper, dt, cfg);
    if (lo_fin) {
        SubDensity r = propagate_subdensity_1s(reflect(f_prev), -lower, dt, cfg);
        return reflect(r);
    }
    throw Error(ErrorKind::BothSidesInfinite, "propagate: both levels infinite");
}

namespace {

struct SideState {
    std::vector<Atom> atoms; // positions as distances from zero along this side's sign
    std::size_t next = 0;    // index of the active atom
    double level = 0.0;      // signed active level
    double target = 0.0;     // residual probability to place at `level`
    bool exhausted = false;
    double exhausted_at = kInf;

    bool has_active() const { return !exhausted; }
};

SolveReport reflect_report(SolveReport r) {
    std::vector<BarrierSegment> segs;
    segs.reserve(r.barrier.size());
    for (const auto& s : r.barrier.segments()) segs.push_back({s.t_end, -s.lower, -s.upper});
    r.barrier = Barrier::from_segments(std::move(segs));
    for (auto& st : r.steps) {
        const double u = st.upper;
        st.upper = -st.lower;
        st.lower = -u;
        if (st.side == "upper")
            st.side = "lower";
        else if (st.side == "lower")
            st.side = "upper";
    }
    std::swap(r.upper_exhausted_at, r.lower_exhausted_at);
    return r;
}

} // namespace

SolveReport solve_one_sided(const DiscreteLaw& law, const SolverConfig& cfg) {
    if (classify(law) == SupportCase::Negative)
        return reflect_report(solve_one_sided(law.reflected(), cfg));
    if (classify(law) != SupportCase::Positive)
        throw Error(ErrorKind::DomainError, "solve_one_sided: law support is two-sided");

    const auto& atoms = law.atoms();
    SubDensity f = SubDensity::delta_at_origin();
    std::vector<BarrierSegment> segs;
    SolveReport rep;
    double t_total = 0.0;
    double prev_level = 0.0;

    for (std::size_t k = 0; k < atoms.size(); ++k) {
        const double level = atoms[k].pos;
        const double target = atoms[k].prob;
        const double mass_before = f.mass;
        auto gfun = [&](double t) { return convolve_hit_cdf_1s(f, level, t, cfg); };
        const double gap = level - prev_level;
        const double dt = find_time_increment(gfun, target, mass_before,
                                              std::max(gap * gap / 4.0, 1e-12),
                                              cfg.root_tol, cfg.root_slack);
        SolveStep step;
        step.k = static_cast<int>(k + 1);
        step.upper = level;
        step.lower = -kInf;
        if (dt == kInf) {
            if (k + 1 != atoms.size())
                throw Error(ErrorKind::NumericalError,
                            "solve_one_sided: mass exhausted before the final atom");
            segs.push_back({kInf, level, -kInf});
            step.side = "final";
            step.t_end = kInf;
            step.dt = kInf;
            step.residual = std::abs(target - mass_before);
            step.mass_before = mass_before;
            step.mass_after = 0.0;
            step.drift = 0.0;
            rep.steps.push_back(step);
            break;
        }
        if (k + 1 == atoms.size())
            throw Error(ErrorKind::NumericalError,
                        "solve_one_sided: final atom reached at finite time (mass drift)");
        t_total += dt;
        segs.push_back({t_total, level, -kInf});
        const double absorbed = gfun(dt);
        f = propagate_subdensity_1s(f, level, dt, cfg);
        step.side = "upper";
        step.t_end = t_total;
        step.dt = dt;
        step.residual = std::abs(absorbed - target);
        step.mass_before = mass_before;
        step.mass_after = f.mass;
        step.drift = std::abs(f.mass - (mass_before - target));
        rep.steps.push_back(step);
        prev_level = level;
    }

    rep.barrier = Barrier::from_segments(std::move(segs));
    for (const auto& s : rep.steps) {
        rep.max_residual = std::max(rep.max_residual, s.residual);
        rep.max_drift = std::max(rep.max_drift, s.drift);
    }
    return rep;
}

SolveReport solve_two_sided(const DiscreteLaw& law, const SolverConfig& cfg) {
    if (classify(law) != SupportCase::TwoSided)
        throw Error(ErrorKind::DomainError, "solve_two_sided: law support is one-sided");

    SideState up, dn;
    up.atoms = law.positive_side();
    dn.atoms = law.negative_side();
    up.level = up.atoms[0].pos;
    up.target = up.atoms[0].prob;
    dn.level = dn.atoms[0].pos;
    dn.target = dn.atoms[0].prob;

    SubDensity f = SubDensity::delta_at_origin();
    std::vector<BarrierSegment> segs;
    SolveReport rep;
    double t_total = 0.0;
    double dt_prev = 0.0;
    const double slack = cfg.root_slack;
    const int max_steps = static_cast<int>(up.atoms.size() + dn.atoms.size()) + 2;

    auto advance = [&](SideState& s, double now) {
        if (++s.next < s.atoms.size()) {
            s.level = s.atoms[s.next].pos;
            s.target = s.atoms[s.next].prob;
        } else {
            s.exhausted = true;
            s.exhausted_at = now;
        }
    };

    for (int k = 1; k <= max_steps; ++k) {
        const double mass = f.mass;
        const double cur_u = up.exhausted ? kInf : up.level;
        const double cur_l = dn.exhausted ? -kInf : dn.level;

        double glim, hlim;
        if (up.exhausted) {
            glim = 0.0;
            hlim = mass;
        } else if (dn.exhausted) {
            glim = mass;
            hlim = 0.0;
        } else {
            glim = convolve_ruin_upper(f, cur_u, cur_l, cfg);
            hlim = mass - glim;
        }
        if (!up.exhausted && up.target > mass + slack)
            throw Error(ErrorKind::TargetExceedsMass, "upper residual target exceeds surviving mass");
        if (!dn.exhausted && dn.target > mass + slack)
            throw Error(ErrorKind::TargetExceedsMass, "lower residual target exceeds surviving mass");

        auto gfun = [&](double t) { return convolve_hit_strip_upper(f, cur_u, cur_l, t, cfg); };
        auto hfun = [&](double t) { return convolve_hit_strip_lower(f, cur_u, cur_l, t, cfg); };

        const double seed = std::max({dt_prev / 4.0, 1e-12});
        double I = kInf, J = kInf;
        if (!up.exhausted && up.target < glim - slack) {
            const double gap = up.next > 0 ? up.level - up.atoms[up.next - 1].pos : up.level;
            I = find_time_increment(gfun, up.target, glim, std::max(gap * gap / 4.0, seed),
                                    cfg.root_tol, slack);
        }
        if (!dn.exhausted && dn.target < hlim - slack) {
            const double gap = dn.next > 0 ? dn.atoms[dn.next - 1].pos - dn.level : -dn.level;
            J = find_time_increment(hfun, dn.target, hlim, std::max(gap * gap / 4.0, seed),
                                    cfg.root_tol, slack);
        }

        SolveStep step;
        step.k = k;
        step.upper = cur_u;
        step.lower = cur_l;
        step.mass_before = mass;

        if (I == kInf && J == kInf) {
            if (up.exhausted && dn.exhausted)
                throw Error(ErrorKind::BothSidesInfinite, "solve_two_sided: both sides exhausted");
            double leftover = 0.0;
            for (std::size_t i = up.next + 1; i < up.atoms.size(); ++i) leftover += up.atoms[i].prob;
            for (std::size_t i = dn.next + 1; i < dn.atoms.size(); ++i) leftover += dn.atoms[i].prob;
            if (leftover > 10.0 * slack)
                throw Error(ErrorKind::NumericalError,
                            "solve_two_sided: atoms left unconsumed at the infinite step");
            segs.push_back({kInf, cur_u, cur_l});
            step.side = "final";
            step.t_end = kInf;
            step.dt = kInf;
            step.residual = std::max(up.exhausted ? 0.0 : std::abs(up.target - glim),
                                     dn.exhausted ? 0.0 : std::abs(dn.target - hlim));
            step.mass_after = 0.0;
            step.drift = 0.0;
            rep.steps.push_back(step);
            break;
        }

        const double tie_tol = std::max(cfg.root_tol * std::max(I == kInf ? 0.0 : I,
                                                                J == kInf ? 0.0 : J),
                                        1e-12);
        const bool tie = std::isfinite(I) && std::isfinite(J) && std::abs(I - J) <= tie_tol;
        const double dt = std::min(I, J);
        t_total += dt;
        dt_prev = dt;
        segs.push_back({t_total, cur_u, cur_l});

        const double gdt = up.exhausted ? 0.0 : gfun(dt);
        const double hdt = dn.exhausted ? 0.0 : hfun(dt);
        f = propagate_subdensity(f, cur_u, cur_l, dt, cfg);

        step.t_end = t_total;
        step.dt = dt;
        step.mass_after = f.mass;
        step.drift = std::abs(f.mass - (mass - gdt - hdt));
        if (tie) {
            step.side = "both";
            step.residual = std::max(std::abs(gdt - up.target), std::abs(hdt - dn.target));
            advance(up, t_total);
            advance(dn, t_total);
        } else if (I < J) {
            step.side = "upper";
            step.residual = std::abs(gdt - up.target);
            advance(up, t_total);
            if (!dn.exhausted) dn.target = std::max(dn.target - hdt, 1e-300);
        } else {
            step.side = "lower";
            step.residual = std::abs(hdt - dn.target);
            advance(dn, t_total);
            if (!up.exhausted) up.target = std::max(up.target - gdt, 1e-300);
        }
        rep.steps.push_back(step);
        if (k == max_steps)
            throw Error(ErrorKind::NumericalError, "solve_two_sided: step budget exceeded");
    }

    rep.barrier = Barrier::from_segments(std::move(segs));
    rep.upper_exhausted_at = up.exhausted_at;
    rep.lower_exhausted_at = dn.exhausted_at;
    for (const auto& s : rep.steps) {
        rep.max_residual = std::max(rep.max_residual, s.residual);
        rep.max_drift = std::max(rep.max_drift, s.drift);
    }
    return rep;
}

SolveReport solve(const DiscreteLaw& law, const SolverConfig& cfg) {
    switch (classify(law)) {
        case SupportCase::Positive:
        case SupportCase::Negative:
            return solve_one_sided(law, cfg);
        case SupportCase::TwoSided:
            return solve_two_sided(law, cfg);
    }
    throw Error(ErrorKind::DomainError, "solve: unreachable support case");
}

std::vector<Atom> replay_stopped_law(const Barrier& barrier, const SolverConfig& cfg) {
    SubDensity f = SubDensity::delta_at_origin();
    double t_prev = 0.0;
    std::vector<Atom> acc;
    auto add = [&](double pos, double p) {
        if (p <= 0.0) return;
        for (auto& a : acc)
            if (a.pos == pos) {
                a.prob += p;
                return;
            }
        acc.push_back({pos, p});
    };

    for (const auto& s : barrier.segments()) {
        const bool up_fin = std::isfinite(s.upper);
        const bool lo_fin = std::isfinite(s.lower);
        if (s.t_end == kInf) {
            if (up_fin && lo_fin) {
                const double glim = convolve_ruin_upper(f, s.upper, s.lower, cfg);
                add(s.upper, glim);
                add(s.lower, f.mass - glim);
            } else if (up_fin) {
                add(s.upper, f.mass);
            } else {
                add(s.lower, f.mass);
            }
            break;
        }
        const double dt = s.t_end - t_prev;
        const double gdt = up_fin ? convolve_hit_strip_upper(f, s.upper, s.lower, dt, cfg) : 0.0;
        const double hdt = lo_fin ? convolve_hit_strip_lower(f, s.upper, s.lower, dt, cfg) : 0.0;
        if (up_fin) add(s.upper, gdt);
        if (lo_fin) add(s.lower, hdt);
        f = propagate_subdensity(f, s.upper, s.lower, dt, cfg);
        t_prev = s.t_end;
    }
    std::sort(acc.begin(), acc.end(), [](const Atom& a, const Atom& b) { return a.pos < b.pos; });
    return acc;
}

} // namespace rbe
