#include "rbe/verify.hpp"
#include "rbe/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace rbe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::mt19937_64 path_rng(std::uint64_t seed, long i) {
    return std::mt19937_64(seed ^ splitmix64(static_cast<std::uint64_t>(i) + 1));
}

struct PathOut {
    double tau = 0.0;
    double value = kNaN;
    bool truncated = false;
};

PathOut run_barrier_path(const std::vector<BarrierSegment>& segs, const SimConfig& cfg,
                         std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ud;
    const bool bridge = cfg.scheme == SimConfig::Scheme::BridgeCorrected;

    double t = 0.0, w = 0.0;
    std::size_t seg = 0;
    while (t < cfg.horizon) {
        while (t >= segs[seg].t_end) ++seg; // levels change exactly at breakpoints
        const double u = segs[seg].upper;
        const double l = segs[seg].lower;
        const double t_stop = std::min(segs[seg].t_end, cfg.horizon);
        const double dt = std::min(cfg.step, t_stop - t);
        const double w1 = w + nd(rng) * std::sqrt(dt);

        bool hit_up = false, hit_dn = false;
        double p_up = 0.0, p_dn = 0.0;
        if (u < kInf) {
            if (w1 >= u) {
                hit_up = true;
                p_up = 1.0;
            } else if (bridge) {
                p_up = std::exp(-2.0 * (u - w) * (u - w1) / dt);
                if (ud(rng) < p_up) hit_up = true;
            }
        }
        if (l > -kInf) {
            if (w1 <= l) {
                hit_dn = true;
                p_dn = 1.0;
            } else if (bridge) {
                p_dn = std::exp(-2.0 * (w - l) * (w1 - l) / dt);
                if (ud(rng) < p_dn) hit_dn = true;
            }
        }
        if (hit_up && hit_dn && p_dn > p_up) hit_up = false; // keep the likelier crossing
        if (hit_up || hit_dn) {
            PathOut out;
            out.tau = bridge ? t + 0.5 * dt : t + dt;
            out.value = hit_up ? u : l;
            return out;
        }
        w = w1;
        t += dt;
    }
    PathOut out;
    out.tau = cfg.horizon;
    out.truncated = true;
    return out;
}

} // namespace

StoppedSamples simulate_stopped(const Barrier& barrier, const SimConfig& cfg) {
    if (cfg.n_paths < 1) throw Error(ErrorKind::DomainError, "simulate_stopped: n_paths must be >= 1");
    if (!(cfg.step > 0.0)) throw Error(ErrorKind::DomainError, "simulate_stopped: step must be > 0");
    const auto& segs = barrier.segments();

    StoppedSamples out;
    out.tau.resize(cfg.n_paths);
    out.value.resize(cfg.n_paths);
    out.truncated.resize(cfg.n_paths);

#pragma omp parallel for schedule(static) if (cfg.parallel)
    for (long i = 0; i < cfg.n_paths; ++i) {
        auto rng = path_rng(cfg.seed, i);
        const PathOut p = run_barrier_path(segs, cfg, rng);
        out.tau[i] = p.tau;
        out.value[i] = p.value;
        out.truncated[i] = p.truncated ? 1 : 0;
    }
    for (long i = 0; i < cfg.n_paths; ++i) out.n_truncated += out.truncated[i];
    return out;
}

StoppedSamples simulate_azema_yor(const DiscreteLaw& law, const SimConfig& cfg) {
    if (std::abs(law.mean()) > 1e-10)
        throw Error(ErrorKind::NotCentered, "simulate_azema_yor requires a centered law");
    if (cfg.n_paths < 1) throw Error(ErrorKind::DomainError, "simulate_azema_yor: n_paths must be >= 1");

    const auto& atoms = law.atoms();
    const std::size_t m = atoms.size();
    std::vector<double> a(m), psi(m);
    double mass = 0.0, val = 0.0;
    for (std::size_t j = m; j-- > 0;) {
        a[j] = atoms[j].pos;
        mass += atoms[j].prob;
        val += atoms[j].pos * atoms[j].prob;
        psi[j] = val / mass; // E[X | X >= a_j], nondecreasing in j
    }
    const double a_top = a.back();
    const bool bridge = cfg.scheme == SimConfig::Scheme::BridgeCorrected;

    StoppedSamples out;
    out.tau.resize(cfg.n_paths);
    out.value.resize(cfg.n_paths);
    out.truncated.resize(cfg.n_paths);

#pragma omp parallel for schedule(static) if (cfg.parallel)
    for (long i = 0; i < cfg.n_paths; ++i) {
        auto rng = path_rng(cfg.seed, i);
        std::normal_distribution<double> nd;
        std::uniform_real_distribution<double> ud;

        double t = 0.0, w = 0.0, S = 0.0;
        std::size_t jstar = 0; // largest j with psi[j] <= S
        while (jstar + 1 < m && psi[jstar + 1] <= S) ++jstar;

        double tau = kNaN, value = kNaN;
        bool truncated = false;
        for (;;) {
            if (t >= cfg.horizon) {
                truncated = true;
                tau = cfg.horizon;
                break;
            }
            if (w <= a[jstar]) { // a rising max unlocked a level already at or above us
                tau = t;
                value = a[jstar];
                break;
            }
            const double dt = std::min(cfg.step, cfg.horizon - t);
            const double w1 = w + nd(rng) * std::sqrt(dt);
            double M = std::max(w, w1);
            if (bridge) {
                const double d = w1 - w;
                M = 0.5 * (w + w1 + std::sqrt(d * d - 2.0 * dt * std::log(ud(rng))));
            }
            const double S_next = std::max(S, M);
            if (S_next >= a_top) { // the maximum reached the top atom
                tau = t + 0.5 * dt;
                value = a_top;
                break;
            }
            const double xstar = a[jstar];
            bool crossed = false;
            if (w1 <= xstar)
                crossed = true;
            else if (bridge && ud(rng) < std::exp(-2.0 * (w - xstar) * (w1 - xstar) / dt))
                crossed = true;
            if (crossed) {
                tau = bridge ? t + 0.5 * dt : t + dt;
                value = xstar;
                break;
            }
            w = w1;
            S = S_next;
            t += dt;
            while (jstar + 1 < m && psi[jstar + 1] <= S) ++jstar;
        }
        out.tau[i] = tau;
        out.value[i] = value;
        out.truncated[i] = truncated ? 1 : 0;
    }
    for (long i = 0; i < cfg.n_paths; ++i) out.n_truncated += out.truncated[i];
    return out;
}

CurvePoint truncated_expectation(const StoppedSamples& s, double T) {
    const double n = static_cast<double>(s.tau.size());
    double sum = 0.0, sumsq = 0.0;
    for (double tv : s.tau) {
        const double c = std::min(tv, T);
        sum += c;
        sumsq += c * c;
    }
    const double mean = sum / n;
    const double var = std::max(0.0, sumsq / n - mean * mean);
    return {T, mean, std::sqrt(var / n)};
}

namespace {

struct TauStats {
    double mean = 0.0, se = 0.0, var = 0.0;
};

TauStats tau_stats(const StoppedSamples& s) {
    double n = 0.0, sum = 0.0, sumsq = 0.0;
    for (std::size_t i = 0; i < s.tau.size(); ++i) {
        if (s.truncated[i]) continue;
        n += 1.0;
        sum += s.tau[i];
        sumsq += s.tau[i] * s.tau[i];
    }
    TauStats st;
    if (n > 1.0) {
        st.mean = sum / n;
        st.var = std::max(0.0, (sumsq - n * st.mean * st.mean) / (n - 1.0));
        st.se = std::sqrt(st.var / n);
    }
    return st;
}

} // namespace

EmbedReport verify_embedding(const DiscreteLaw& law, const Barrier& barrier, const SimConfig& cfg,
                             const std::vector<double>& t_grid) {
    const StoppedSamples s = simulate_stopped(barrier, cfg);

    EmbedReport rep;
    rep.n_paths = cfg.n_paths;
    rep.seed = cfg.seed;
    rep.truncated_path_fraction = s.truncated_fraction();
    if (rep.truncated_path_fraction > 1e-3)
        throw Error(ErrorKind::HorizonTruncationExcess,
                    "truncated path fraction " + std::to_string(rep.truncated_path_fraction) +
                        " exceeds 1e-3; raise the horizon");

    std::vector<double> stopped;
    stopped.reserve(s.value.size());
    for (std::size_t i = 0; i < s.value.size(); ++i)
        if (!s.truncated[i]) stopped.push_back(s.value[i]);

    const StepFunction emp = empirical_cdf(std::move(stopped));
    const StepFunction target = cdf_of(law);
    rep.levy_dist = levy_distance(emp, target);
    rep.ks_dist = ks_distance(emp, target);
    rep.empirical_cdf_points = emp.jumps();

    const TauStats st = tau_stats(s);
    rep.mean_tau = st.mean;
    rep.se_mean_tau = st.se;
    rep.var_tau = st.var;
    rep.second_moment_mu = law.second_moment();
    rep.law_centered = std::abs(law.mean()) <= 1e-10;
    rep.moment_check_pass =
        rep.law_centered && std::abs(rep.mean_tau - rep.second_moment_mu) <= 3.0 * rep.se_mean_tau;

    for (double T : t_grid) rep.truncated_expectation_curve.push_back(truncated_expectation(s, T));
    return rep;
}

TruncatedComparison compare_truncated_expectations(const StoppedSamples& tau_samples,
                                                   const StoppedSamples& sigma_samples,
                                                   const std::vector<double>& t_grid) {
    if (tau_samples.tau.empty() || sigma_samples.tau.empty())
        throw Error(ErrorKind::DomainError, "compare_truncated_expectations: empty sample set");

    TruncatedComparison cmp;
    cmp.all_pass = true;
    for (double T : t_grid) {
        const CurvePoint a = truncated_expectation(tau_samples, T);
        const CurvePoint b = truncated_expectation(sigma_samples, T);
        TruncatedComparison::Row row;
        row.T = T;
        row.e_tau = a.value;
        row.se_tau = a.se;
        row.e_sigma = b.value;
        row.se_sigma = b.se;
        row.pooled_se = std::sqrt(a.se * a.se + b.se * b.se);
        row.pass = row.e_tau <= row.e_sigma + 2.0 * row.pooled_se;
        cmp.all_pass = cmp.all_pass && row.pass;
        cmp.rows.push_back(row);
    }

    auto sqrt_mean = [](const StoppedSamples& s, double& mean, double& se) {
        const double n = static_cast<double>(s.tau.size());
        double sum = 0.0, sumsq = 0.0;
        for (double tv : s.tau) {
            const double r = std::sqrt(tv);
            sum += r;
            sumsq += r * r;
        }
        mean = sum / n;
        se = std::sqrt(std::max(0.0, sumsq / n - mean * mean) / n);
    };
    TruncatedComparison::Row& f = cmp.sqrt_check;
    f.T = kNaN;
    sqrt_mean(tau_samples, f.e_tau, f.se_tau);
    sqrt_mean(sigma_samples, f.e_sigma, f.se_sigma);
    f.pooled_se = std::sqrt(f.se_tau * f.se_tau + f.se_sigma * f.se_sigma);
    f.pass = f.e_tau <= f.e_sigma + 2.0 * f.pooled_se;
    cmp.all_pass = cmp.all_pass && f.pass;
    return cmp;
}

} // namespace rbe
