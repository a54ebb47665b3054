#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rbe/distance.hpp"
#include "rbe/errors.hpp"

#include <cmath>

using namespace rbe;

namespace {

StepFunction dirac_cdf(double at) { return StepFunction::from_jumps(0.0, {{at, 1.0}}); }

} // namespace

TEST_CASE("levy distance on point masses") {
    CHECK(levy_distance(dirac_cdf(0.0), dirac_cdf(0.0)) == 0.0);
    CHECK(levy_distance(dirac_cdf(0.0), dirac_cdf(0.5)) == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(levy_distance(dirac_cdf(0.0), dirac_cdf(3.0)) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("levy distance is symmetric and bounded by ks") {
    const auto F = cdf_of(DiscreteLaw::from_atoms({{-1.0, 0.3}, {0.5, 0.4}, {2.0, 0.3}}));
    const auto G = cdf_of(DiscreteLaw::from_atoms({{-1.2, 0.25}, {0.5, 0.35}, {1.7, 0.4}}));
    const double dfg = levy_distance(F, G);
    const double dgf = levy_distance(G, F);
    CHECK(dfg == doctest::Approx(dgf).epsilon(1e-6));
    CHECK(dfg <= ks_distance(F, G) + 1e-9);
    CHECK(dfg > 0.0);
}

TEST_CASE("ks distance between step functions") {
    const auto F = cdf_of(DiscreteLaw::from_atoms({{-1.0, 0.5}, {1.0, 0.5}}));
    const auto G = cdf_of(DiscreteLaw::from_atoms({{-1.0, 0.25}, {1.0, 0.75}}));
    CHECK(ks_distance(F, G) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(ks_distance(F, F) == 0.0);
}

TEST_CASE("ks distance to a continuous cdf: quantization gap") {
    TargetLawSpec s;
    s.kind = TargetLawSpec::Kind::Exponential;
    s.rate = 1.0;
    s.disc.n = 100; // step 1/100
    s.disc.lo = 0.0;
    s.disc.hi = 12.0;
    const auto law = quantize(s);
    const double d = ks_distance_to_cdf(cdf_of(law), [](double x) {
        return x <= 0.0 ? 0.0 : 1.0 - std::exp(-x);
    });
    // the largest gap is the first cell's mass
    CHECK(d == doctest::Approx(1.0 - std::exp(-0.01)).epsilon(1e-9));
}

TEST_CASE("empirical cdf collapses ties") {
    const auto F = empirical_cdf({1.0, -1.0, 1.0, 1.0});
    REQUIRE(F.jumps().size() == 2);
    CHECK(F.value_right(-1.0) == doctest::Approx(0.25));
    CHECK(F.value_right(1.0) == doctest::Approx(1.0));
    CHECK(F.value_left(1.0) == doctest::Approx(0.25));
    CHECK_THROWS_AS(empirical_cdf({}), Error);
}

TEST_CASE("barrier as generalized cdf") {
    const auto b = Barrier::from_segments({{1.0, 0.5, -std::numeric_limits<double>::infinity()},
                                           {3.0, 1.0, -std::numeric_limits<double>::infinity()},
                                           {std::numeric_limits<double>::infinity(), 2.0,
                                            -std::numeric_limits<double>::infinity()}});
    const auto F = barrier_upper_as_cdf(b, 2.0);
    CHECK(F.value_right(-2.0) == 0.0);
    CHECK(F.value_right(-1.0) == doctest::Approx(0.5));
    CHECK(F.value_right(0.5) == doctest::Approx(0.5));
    CHECK(F.value_right(1.0) == doctest::Approx(1.0));
    CHECK(F.value_right(2.9) == doctest::Approx(1.0));
    CHECK(F.value_right(3.0) == doctest::Approx(2.0));
    CHECK(F.top() == doctest::Approx(2.0));
}
