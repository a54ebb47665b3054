#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rbe/distance.hpp"
#include "rbe/errors.hpp"
#include "rbe/kernels.hpp"
#include "rbe/law.hpp"
#include "rbe/solver.hpp"

#include <cmath>
#include <random>

using namespace rbe;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const SolverConfig cfg{};

// independent bisection oracle: solve 2(1 - Phi(y/sqrt(t))) = p
double one_sided_root_oracle(double y, double p) {
    auto g = [&](double t) { return std::erfc(y / std::sqrt(2.0 * t)); };
    double lo = 1e-12, hi = 1e6;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// independent bisection oracle on a naive reimplementation of the strip
// upper-exit series (trusting nothing from rbe::kernels)
double strip_upper_cdf_naive(double t, double y, double z) {
    const double w = y - z;
    double s = 0.0;
    for (int n = 0; n < 100000; ++n) {
        const double a = ((2 * n + 1) * w - z) / std::sqrt(t);
        const double b = ((2 * n + 1) * w + z) / std::sqrt(t);
        const double term = std::erfc(b / std::sqrt(2.0)) - std::erfc(a / std::sqrt(2.0));
        s += term;
        if (n > 3 && term < 1e-17) break;
    }
    return s;
}

double strip_upper_root_oracle(double y, double z, double p) {
    double lo = 1e-12, hi = 1e6;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (strip_upper_cdf_naive(mid, y, z) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

DiscreteLaw law_of(std::vector<Atom> atoms) { return DiscreteLaw::from_atoms(std::move(atoms)); }

DiscreteLaw quantized_exponential(int n, double hi) {
    TargetLawSpec s;
    s.kind = TargetLawSpec::Kind::Exponential;
    s.rate = 1.0;
    s.disc.n = n;
    s.disc.lo = 0.0;
    s.disc.hi = hi;
    return quantize(s);
}

} // namespace

TEST_CASE("find_time_increment against the closed-form oracle") {
    auto gfun = [](double t) { return kernels::hit_cdf_1s(t, 1.0); };
    const double t = find_time_increment(gfun, 0.5, 1.0, 0.25, 1e-10, 1e-7);
    const double oracle = one_sided_root_oracle(1.0, 0.5);
    CHECK(std::abs(t - oracle) / oracle < 1e-8);
    CHECK(oracle == doctest::Approx(2.198109338317732).epsilon(1e-10));

    CHECK(find_time_increment(gfun, 1.0, 1.0, 0.25, 1e-10, 1e-7) == kInf);
    CHECK(find_time_increment(gfun, 0.0, 1.0, 0.25, 1e-10, 1e-7) == 0.0);
    CHECK_THROWS_AS(find_time_increment(gfun, 1.1, 1.0, 0.25, 1e-10, 1e-7), Error);
}

TEST_CASE("convolve_hit_cdf_1s from the initial delta") {
    const SubDensity f0 = SubDensity::delta_at_origin();
    CHECK(convolve_hit_cdf_1s(f0, 1.0, 1.0, cfg) ==
          doctest::Approx(0.31731050786291415).epsilon(1e-12));
    CHECK(convolve_hit_cdf_1s(f0, 1.0, 0.0, cfg) == 0.0);
    CHECK(std::abs(convolve_hit_cdf_1s(f0, 1.0, 1e8, cfg) - 1.0) < 1e-4);
    CHECK(std::abs(convolve_hit_cdf_1s(f0, 1.0, 1e12, cfg) - 1.0) < 1e-6);
}

TEST_CASE("propagate_subdensity_1s bookkeeping") {
    const SubDensity f0 = SubDensity::delta_at_origin();
    const double t1 = one_sided_root_oracle(1.0, 0.5);
    const SubDensity f1 = propagate_subdensity_1s(f0, 1.0, t1, cfg);
    CHECK(std::abs(f1.mass - 0.5) < 1e-8);        // consumed exactly the first atom
    CHECK(f1.v.back() == 0.0);                    // vanishes at the absorbing level
    CHECK(f1.x.back() == 1.0);
    for (double v : f1.v) CHECK(v >= 0.0);

    // hitting the next level through the propagated density: the hit
    // probability approaches the surviving mass (recurrence); erfc tails put
    // the approach rate at ~ distance/sqrt(t)
    CHECK(std::abs(convolve_hit_cdf_1s(f1, 2.0, 1e8, cfg) - f1.mass) < 1e-3);
    CHECK(std::abs(convolve_hit_cdf_1s(f1, 2.0, 1e12, cfg) - f1.mass) < 1e-5);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(convolve_hit_cdf_1s(f1, 2.0, inf, cfg) == f1.mass);
    CHECK_THROWS_AS(convolve_hit_cdf_1s(f1, 0.5, 1.0, cfg), Error); // level inside grid
}

TEST_CASE("solve: single atom gives a constant barrier") {
    for (double a : {0.5, 2.0}) {
        const SolveReport rep = solve(law_of({{a, 1.0}}), cfg);
        REQUIRE(rep.barrier.size() == 1);
        CHECK(rep.barrier.segments()[0].t_end == kInf);
        CHECK(rep.barrier.segments()[0].upper == a);
        CHECK(rep.barrier.segments()[0].lower == -kInf);
    }
    // negative single atom, by reflection
    const SolveReport rep = solve(law_of({{-1.5, 1.0}}), cfg);
    REQUIRE(rep.barrier.size() == 1);
    CHECK(rep.barrier.segments()[0].upper == kInf);
    CHECK(rep.barrier.segments()[0].lower == -1.5);
}

TEST_CASE("solve: two-atom closed-form first step") {
    const SolveReport rep = solve(law_of({{1.0, 0.5}, {2.0, 0.5}}), cfg);
    REQUIRE(rep.barrier.size() == 2);
    const double oracle = one_sided_root_oracle(1.0, 0.5);
    CHECK(std::abs(rep.barrier.segments()[0].t_end - oracle) / oracle < 1e-6);
    CHECK(rep.barrier.segments()[0].upper == 1.0);
    CHECK(rep.barrier.segments()[1].t_end == kInf);
    CHECK(rep.barrier.segments()[1].upper == 2.0);
    CHECK(rep.max_residual < 1e-8);
    CHECK(rep.max_drift < 1e-8);
}

TEST_CASE("solve: symmetric two-sided law stops at constant strip") {
    for (double a : {0.5, 1.0, 2.0}) {
        const SolveReport rep = solve(law_of({{-a, 0.5}, {a, 0.5}}), cfg);
        REQUIRE(rep.barrier.size() == 1);
        CHECK(rep.barrier.segments()[0].t_end == kInf);
        CHECK(rep.barrier.segments()[0].upper == a);
        CHECK(rep.barrier.segments()[0].lower == -a);
        CHECK(rep.upper_exhausted_at == kInf);
        CHECK(rep.lower_exhausted_at == kInf);
    }
}

TEST_CASE("solve: negative-mean two-sided law exhausts the upper side") {
    const SolveReport rep = solve(law_of({{-1.0, 2.0 / 3.0}, {1.0, 1.0 / 3.0}}), cfg);
    REQUIRE(rep.barrier.size() == 2);
    const double oracle = strip_upper_root_oracle(1.0, -1.0, 1.0 / 3.0);
    CHECK(std::abs(rep.barrier.segments()[0].t_end - oracle) / oracle < 1e-6);
    CHECK(rep.barrier.segments()[0].upper == 1.0);
    CHECK(rep.barrier.segments()[0].lower == -1.0);
    CHECK(rep.barrier.segments()[1].upper == kInf);
    CHECK(rep.barrier.segments()[1].lower == -1.0);
    CHECK(rep.upper_exhausted_at == doctest::Approx(rep.barrier.segments()[0].t_end));
    CHECK(rep.lower_exhausted_at == kInf);
}

TEST_CASE("solve: simultaneous tie consumes both sides") {
    const SolveReport rep =
        solve(law_of({{-2.0, 0.25}, {-1.0, 0.25}, {1.0, 0.25}, {2.0, 0.25}}), cfg);
    REQUIRE(rep.barrier.size() == 2);
    const double oracle = strip_upper_root_oracle(1.0, -1.0, 0.25);
    CHECK(std::abs(rep.barrier.segments()[0].t_end - oracle) / oracle < 1e-6);
    CHECK(rep.barrier.segments()[0].upper == 1.0);
    CHECK(rep.barrier.segments()[0].lower == -1.0);
    CHECK(rep.barrier.segments()[1].t_end == kInf);
    CHECK(rep.barrier.segments()[1].upper == 2.0);
    CHECK(rep.barrier.segments()[1].lower == -2.0);
    REQUIRE(rep.steps.size() == 2);
    CHECK(rep.steps[0].side == "both");
    CHECK(rep.steps[1].side == "final");
}

TEST_CASE("solve: quantized exponential structure and conservation") {
    const DiscreteLaw law = quantized_exponential(20, 10.0);
    const SolveReport rep = solve(law, cfg);
    REQUIRE(rep.barrier.size() == law.size());
    // upper levels are exactly the atom positions, increasing
    for (std::size_t k = 0; k < law.size(); ++k)
        CHECK(rep.barrier.segments()[k].upper == law.atoms()[k].pos);
    CHECK(rep.barrier.segments().back().t_end == kInf);
    // per-step mass conservation within k * 1e-8
    double cum = 0.0;
    int k = 1;
    for (const auto& st : rep.steps) {
        cum += st.drift;
        CHECK(st.drift <= 1e-8);
        CHECK(cum <= k * 1e-8);
        ++k;
    }
    CHECK(rep.max_residual < 1e-8);
}

TEST_CASE("replay consistency: barrier reproduces every atom probability") {
    const DiscreteLaw law = quantized_exponential(10, 8.0);
    const SolveReport rep = solve(law, cfg);
    const std::vector<Atom> replayed = replay_stopped_law(rep.barrier, cfg);
    REQUIRE(replayed.size() == law.size());
    for (std::size_t i = 0; i < law.size(); ++i) {
        CHECK(replayed[i].pos == law.atoms()[i].pos);
        CHECK(std::abs(replayed[i].prob - law.atoms()[i].prob) < 1e-6);
    }
    // two-sided replay
    const DiscreteLaw law2 = law_of({{-1.5, 0.3}, {-0.5, 0.2}, {1.0, 0.5}});
    const SolveReport rep2 = solve(law2, cfg);
    const std::vector<Atom> replayed2 = replay_stopped_law(rep2.barrier, cfg);
    REQUIRE(replayed2.size() == law2.size());
    for (std::size_t i = 0; i < law2.size(); ++i)
        CHECK(std::abs(replayed2[i].prob - law2.atoms()[i].prob) < 1e-6);
}

TEST_CASE("solve: normal(1,1) lower side hits -inf in finite time") {
    TargetLawSpec s;
    s.kind = TargetLawSpec::Kind::Normal;
    s.mean = 1.0;
    s.variance = 1.0;
    s.disc.n = 10;
    const SolveReport rep = solve(quantize(s), cfg);
    CHECK(std::isfinite(rep.lower_exhausted_at)); // mean > 0 forces c -> -inf
    CHECK(rep.upper_exhausted_at == kInf);
    CHECK(rep.barrier.segments().back().lower == -kInf);
    CHECK(std::isfinite(rep.barrier.segments().back().upper));
    double cum = 0.0;
    int k = 1;
    for (const auto& st : rep.steps) {
        cum += st.drift;
        CHECK(cum <= k * 1e-8);
        ++k;
    }
}

TEST_CASE("proposition 9 discrete analogue: flat on atoms, jumps across gaps") {
    // support gap between 1 and 5
    const SolveReport rep = solve(law_of({{1.0, 0.6}, {5.0, 0.4}}), cfg);
    REQUIRE(rep.barrier.size() == 2);
    CHECK(rep.barrier.segments()[0].upper == 1.0);
    CHECK(rep.barrier.segments()[1].upper == 5.0); // jumps the gap, no intermediate level
    CHECK(rep.barrier.segments()[0].t_end > 0.0);  // flat piece has positive length
}

TEST_CASE("uniqueness proxy: equivalent atom lists give bit-identical barriers") {
    std::vector<Atom> atoms = {{-1.5, 0.25}, {-0.5, 0.25}, {0.75, 0.3}, {2.0, 0.2}};
    const SolveReport a = solve(DiscreteLaw::from_atoms(atoms), cfg);

    std::vector<Atom> shuffled = {{0.75, 0.3}, {-1.5, 0.25}, {2.0, 0.2}, {-0.5, 0.25}};
    const SolveReport b = solve(DiscreteLaw::from_atoms(shuffled, /*canonicalize=*/true), cfg);
    CHECK(a.barrier.to_csv() == b.barrier.to_csv());

    // duplicate-position entries merge to the same law
    std::vector<Atom> split = {{-1.5, 0.25}, {-0.5, 0.25}, {0.75, 0.1}, {0.75, 0.2}, {2.0, 0.2}};
    const SolveReport c = solve(DiscreteLaw::from_atoms(split, /*canonicalize=*/true), cfg);
    CHECK(a.barrier.to_csv() == c.barrier.to_csv());
}

TEST_CASE("proposition 13 finiteness dichotomy on random bounded laws") {
    std::mt19937_64 rng(20250809);
    std::uniform_real_distribution<double> upos(0.3, 3.0);
    std::uniform_real_distribution<double> uprob(0.15, 0.85);
    for (int trial = 0; trial < 6; ++trial) {
        const double xp = upos(rng), xn = -upos(rng);
        const double p = uprob(rng);
        const DiscreteLaw law = law_of({{xn, 1.0 - p}, {xp, p}});
        const double mean = law.mean();
        const SolveReport rep = solve(law, cfg);
        if (mean < -1e-9) {
            CHECK(std::isfinite(rep.upper_exhausted_at));
            CHECK(rep.lower_exhausted_at == kInf);
        } else if (mean > 1e-9) {
            CHECK(std::isfinite(rep.lower_exhausted_at));
            CHECK(rep.upper_exhausted_at == kInf);
        }
    }
    // exact zero mean: both sides stay finite
    const SolveReport rep = solve(law_of({{-0.8, 0.5}, {0.8, 0.5}}), cfg);
    CHECK(rep.upper_exhausted_at == kInf);
    CHECK(rep.lower_exhausted_at == kInf);
}

TEST_CASE("levy convergence diagnostic decreases for exponential barriers") {
    // small version of the acceptance criterion (n in {10, 20, 40})
    const SolveReport b10 = solve(quantized_exponential(10, 8.0), cfg);
    const SolveReport b20 = solve(quantized_exponential(20, 8.0), cfg);
    const SolveReport b40 = solve(quantized_exponential(40, 8.0), cfg);
    const double cap = 8.0;
    const double d1 = levy_distance(barrier_upper_as_cdf(b10.barrier, cap),
                                    barrier_upper_as_cdf(b20.barrier, cap));
    const double d2 = levy_distance(barrier_upper_as_cdf(b20.barrier, cap),
                                    barrier_upper_as_cdf(b40.barrier, cap));
    CHECK(d1 > d2);
}
