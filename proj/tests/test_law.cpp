#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rbe/distance.hpp"
#include "rbe/errors.hpp"
#include "rbe/kernels.hpp"
#include "rbe/law.hpp"

#include <cmath>

using namespace rbe;

namespace {

TargetLawSpec atoms_spec(std::vector<Atom> atoms) {
    TargetLawSpec s;
    s.kind = TargetLawSpec::Kind::Atoms;
    s.atoms = std::move(atoms);
    return s;
}

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    throw std::runtime_error("expected an rbe::Error");
}

} // namespace

TEST_CASE("validate accepts and rejects per invariant") {
    CHECK_NOTHROW(validate(atoms_spec({{1.0, 1.0}})));
    CHECK(kind_of([] { validate(atoms_spec({{0.0, 0.5}, {1.0, 0.5}})); }) == ErrorKind::AtomAtZero);
    CHECK(kind_of([] { validate(atoms_spec({{-1.0, 0.6}, {1.0, 0.3}})); }) == ErrorKind::MassNotOne);
    CHECK(kind_of([] { validate(atoms_spec({{1.0, 0.5}, {-1.0, 0.5}})); }) == ErrorKind::UnsortedAtoms);
    CHECK(kind_of([] { validate(atoms_spec({{-1.0, -0.5}, {1.0, 1.5}})); }) == ErrorKind::NonPositiveProb);
    TargetLawSpec bad_rate;
    bad_rate.kind = TargetLawSpec::Kind::Exponential;
    bad_rate.rate = 0.0;
    CHECK_THROWS_AS(validate(bad_rate), Error);
}

TEST_CASE("quantize exponential: closed-form cell masses") {
    TargetLawSpec s;
    s.kind = TargetLawSpec::Kind::Exponential;
    s.rate = 1.0;
    s.disc.step = 0.5;
    s.disc.lo = 0.0;
    s.disc.hi = 10.0;
    const DiscreteLaw law = quantize(s);
    CHECK(law.atoms().front().pos == doctest::Approx(0.5));
    CHECK(law.atoms().front().prob == doctest::Approx(1.0 - std::exp(-0.5)).epsilon(1e-14));
    // all interior cells are exponential CDF differences
    for (std::size_t k = 0; k + 1 < law.size(); ++k) {
        const double x = law.atoms()[k].pos;
        CHECK(law.atoms()[k].prob ==
              doctest::Approx(std::exp(-(x - 0.5)) - std::exp(-x)).epsilon(1e-12));
    }
    // tail lump sits on the truncation endpoint
    CHECK(law.atoms().back().pos == doctest::Approx(10.0));
    CHECK(law.atoms().back().prob == doctest::Approx(std::exp(-9.5)).epsilon(1e-12));
    double mass = 0.0;
    for (const Atom& a : law.atoms()) mass += a.prob;
    CHECK(std::abs(mass - 1.0) < 1e-12);
}

TEST_CASE("quantize explicit atoms is the identity") {
    const auto spec = atoms_spec({{-1.0, 0.25}, {0.5, 0.5}, {2.0, 0.25}});
    const DiscreteLaw law = quantize(spec);
    REQUIRE(law.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(law.atoms()[i].pos == spec.atoms[i].pos);
        CHECK(law.atoms()[i].prob == spec.atoms[i].prob);
    }
}

TEST_CASE("quantize normal: Phi differences and unit mass") {
    TargetLawSpec s;
    s.kind = TargetLawSpec::Kind::Normal;
    s.mean = 1.0;
    s.variance = 1.0;
    s.disc.step = 0.5;
    s.disc.lo = -5.0;
    s.disc.hi = 6.0;
    const DiscreteLaw law = quantize(s);
    double mass = 0.0;
    for (const Atom& a : law.atoms()) mass += a.prob;
    CHECK(std::abs(mass - 1.0) < 1e-12);
    // an interior positive atom: P(x-0.5 < X <= x)
    for (const Atom& a : law.atoms()) {
        if (a.pos > 0.5 && a.pos < 5.5) {
            const double expect = kernels::Phi(a.pos - 1.0) - kernels::Phi(a.pos - 0.5 - 1.0);
            CHECK(a.prob == doctest::Approx(expect).epsilon(1e-12));
        }
        if (a.pos < -0.5 && a.pos > -4.9) {
            const double expect = kernels::Phi(a.pos + 0.5 - 1.0) - kernels::Phi(a.pos - 1.0);
            CHECK(a.prob == doctest::Approx(expect).epsilon(1e-12));
        }
        // positions are cell endpoints only
        CHECK(std::abs(a.pos / 0.5 - std::round(a.pos / 0.5)) < 1e-12);
        CHECK(a.pos != 0.0);
    }
}

TEST_CASE("quantize drops empty cells and merges sub-noise atoms outward") {
    TargetLawSpec s;
    s.kind = TargetLawSpec::Kind::Exponential;
    s.rate = 1.0;
    s.disc.step = 0.5;
    s.disc.lo = 0.0;
    s.disc.hi = 45.0; // cells past ~x=32 carry mass below 1e-14
    const DiscreteLaw law = quantize(s);
    for (const Atom& a : law.atoms()) CHECK(a.prob >= 1e-14);
    double mass = 0.0;
    for (const Atom& a : law.atoms()) mass += a.prob;
    CHECK(std::abs(mass - 1.0) < 1e-12);
}

TEST_CASE("classify") {
    CHECK(classify(DiscreteLaw::from_atoms({{1.0, 0.5}, {2.0, 0.5}})) == SupportCase::Positive);
    CHECK(classify(DiscreteLaw::from_atoms({{-1.0, 1.0}})) == SupportCase::Negative);
    CHECK(classify(DiscreteLaw::from_atoms({{-1.0, 0.5}, {1.0, 0.5}})) == SupportCase::TwoSided);
}

TEST_CASE("moments") {
    auto [m1, m2] = moments(DiscreteLaw::from_atoms({{-1.0, 0.5}, {1.0, 0.5}}));
    CHECK(m1 == 0.0);
    CHECK(m2 == 1.0);
    auto [m1b, m2b] = moments(DiscreteLaw::from_atoms({{-1.0, 2.0 / 3.0}, {1.0, 1.0 / 3.0}}));
    CHECK(m1b == doctest::Approx(-1.0 / 3.0).epsilon(1e-15));
    CHECK(m2b == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("quantized exponential moments converge") {
    for (double step : {0.1, 0.05, 0.025}) {
        TargetLawSpec s;
        s.kind = TargetLawSpec::Kind::Exponential;
        s.rate = 1.0;
        s.disc.step = step;
        s.disc.lo = 0.0;
        s.disc.hi = 40.0;
        const auto [m1, m2] = moments(quantize(s));
        CHECK(std::abs(m1 - 1.0) < 2.0 * step);
        (void)m2;
    }
}

TEST_CASE("barycenter") {
    const auto sym = DiscreteLaw::from_atoms({{-1.0, 0.5}, {1.0, 0.5}});
    CHECK(barycenter(sym, 0.0) == doctest::Approx(1.0));
    CHECK(barycenter(sym, -1.0) == doctest::Approx(0.0));
    const auto skew = DiscreteLaw::from_atoms({{-1.5, 0.4}, {1.0, 0.6}});
    CHECK(barycenter(skew, 0.5) == doctest::Approx(1.0));
    CHECK(kind_of([] {
        barycenter(DiscreteLaw::from_atoms({{-1.0, 0.25}, {1.0, 0.75}}), 0.0);
    }) == ErrorKind::NotCentered);
    // nondecreasing in x and bounded by the max atom
    const auto law = DiscreteLaw::from_atoms({{-2.0, 0.25}, {-0.5, 0.25}, {0.5, 0.25}, {2.0, 0.25}});
    double prev = -10.0;
    for (double x = -3.0; x < 3.0; x += 0.083) {
        const double b = barycenter(law, x);
        CHECK(b >= prev - 1e-12);
        CHECK(b <= 2.0 + 1e-12);
        prev = b;
    }
}

TEST_CASE("grid refinement stays close in Levy metric") {
    auto quantized = [](double step) {
        TargetLawSpec s;
        s.kind = TargetLawSpec::Kind::Exponential;
        s.rate = 1.0;
        s.disc.step = step;
        s.disc.lo = 0.0;
        s.disc.hi = 20.0;
        return quantize(s);
    };
    for (double step : {0.2, 0.1, 0.05}) {
        const double d = levy_distance(cdf_of(quantized(step)), cdf_of(quantized(step / 2.0)));
        CHECK(d <= step + 1e-9);
    }
}
