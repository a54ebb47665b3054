#include "rbe/law.hpp"
#include "rbe/errors.hpp"
#include "rbe/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace rbe {

namespace {

constexpr double kMassTol = 1e-12;
constexpr double kTinyAtom = 1e-14;

void check_atoms(const std::vector<Atom>& atoms) {
    if (atoms.empty()) throw Error(ErrorKind::EmptyLaw, "law has no atoms");
    double sum = 0.0;
    double prev = -std::numeric_limits<double>::infinity();
    for (const Atom& a : atoms) {
        if (!std::isfinite(a.pos) || !std::isfinite(a.prob))
            throw Error(ErrorKind::DomainError, "atom with non-finite position or probability");
        if (a.pos == 0.0) throw Error(ErrorKind::AtomAtZero, "law places mass at 0");
        if (!(a.prob > 0.0) || a.prob > 1.0)
            throw Error(ErrorKind::NonPositiveProb, "atom probability outside (0,1]");
        if (!(a.pos > prev)) throw Error(ErrorKind::UnsortedAtoms, "atom positions not strictly increasing");
        prev = a.pos;
        sum += a.prob;
    }
    if (std::abs(sum - 1.0) > kMassTol)
        throw Error(ErrorKind::MassNotOne, "atom probabilities sum to " + std::to_string(sum));
}

// Quantile of the standard normal via bisection on Phi; only used to pick
// default truncation ranges, so speed is irrelevant.
double normal_quantile(double p) {
    double lo = -10.0, hi = 10.0;
    for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
        const double mid = 0.5 * (lo + hi);
        (kernels::Phi(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

DiscreteLaw DiscreteLaw::from_atoms(std::vector<Atom> atoms, bool canonicalize) {
    if (canonicalize) {
        std::sort(atoms.begin(), atoms.end(),
                  [](const Atom& a, const Atom& b) { return a.pos < b.pos; });
        std::vector<Atom> merged;
        for (const Atom& a : atoms) {
            if (!merged.empty() && merged.back().pos == a.pos)
                merged.back().prob += a.prob;
            else
                merged.push_back(a);
        }
        atoms = std::move(merged);
    }
    check_atoms(atoms);
    return DiscreteLaw(std::move(atoms));
}

double DiscreteLaw::mean() const {
    double m = 0.0;
    for (const Atom& a : atoms_) m += a.pos * a.prob;
    return m;
}

double DiscreteLaw::second_moment() const {
    double m = 0.0;
    for (const Atom& a : atoms_) m += a.pos * a.pos * a.prob;
    return m;
}

std::vector<Atom> DiscreteLaw::positive_side() const {
    std::vector<Atom> out;
    for (const Atom& a : atoms_)
        if (a.pos > 0.0) out.push_back(a);
    return out;
}

std::vector<Atom> DiscreteLaw::negative_side() const {
    std::vector<Atom> out;
    for (auto it = atoms_.rbegin(); it != atoms_.rend(); ++it)
        if (it->pos < 0.0) out.push_back(*it);
    return out;
}

DiscreteLaw DiscreteLaw::reflected() const {
    std::vector<Atom> out(atoms_.rbegin(), atoms_.rend());
    for (Atom& a : out) a.pos = -a.pos;
    return DiscreteLaw(std::move(out));
}

const TargetLawSpec& validate(const TargetLawSpec& spec) {
    using Kind = TargetLawSpec::Kind;
    switch (spec.kind) {
        case Kind::Atoms:
            check_atoms(spec.atoms);
            break;
        case Kind::Exponential:
            if (!(spec.rate > 0.0)) throw Error(ErrorKind::DomainError, "exponential rate must be > 0");
            break;
        case Kind::Normal:
            if (!(spec.variance > 0.0)) throw Error(ErrorKind::DomainError, "normal variance must be > 0");
            break;
        case Kind::CdfTable: {
            if (spec.cdf_table.size() < 2)
                throw Error(ErrorKind::DomainError, "cdf table needs at least two knots");
            double px = -std::numeric_limits<double>::infinity();
            double pf = -1.0;
            for (auto [x, f] : spec.cdf_table) {
                if (!(x > px) || f < pf || f < 0.0 || f > 1.0)
                    throw Error(ErrorKind::DomainError, "cdf table must be strictly increasing in x and nondecreasing in F within [0,1]");
                px = x;
                pf = f;
            }
            if (std::abs(spec.cdf_table.front().second) > kMassTol ||
                std::abs(spec.cdf_table.back().second - 1.0) > kMassTol)
                throw Error(ErrorKind::MassNotOne, "cdf table must run from 0 to 1");
            break;
        }
    }
    if (spec.kind != Kind::Atoms) {
        if (spec.disc.n < 1) throw Error(ErrorKind::DomainError, "discretization n must be >= 1");
        if (spec.disc.step < 0.0) throw Error(ErrorKind::DomainError, "discretization step must be > 0");
        if (spec.disc.lo > spec.disc.hi)
            throw Error(ErrorKind::DomainError, "truncation range is empty");
    }
    return spec;
}

namespace {

struct CdfModel {
    std::function<double(double)> F; // P(X <= x)
    double lo, hi;                   // default truncation range
};

CdfModel make_cdf(const TargetLawSpec& spec) {
    using Kind = TargetLawSpec::Kind;
    constexpr double tail = 1e-6; // default range drops at most this much mass
    switch (spec.kind) {
        case Kind::Exponential: {
            const double r = spec.rate;
            return {[r](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-r * x); },
                    0.0, -std::log(tail) / r};
        }
        case Kind::Normal: {
            const double m = spec.mean;
            const double s = std::sqrt(spec.variance);
            const double zq = normal_quantile(1.0 - 0.5 * tail);
            return {[m, s](double x) { return kernels::Phi((x - m) / s); },
                    m - zq * s, m + zq * s};
        }
        case Kind::CdfTable: {
            auto table = spec.cdf_table;
            auto F = [table](double x) {
                if (x <= table.front().first) return table.front().second;
                if (x >= table.back().first) return table.back().second;
                auto it = std::upper_bound(table.begin(), table.end(), x,
                                           [](double v, const auto& kn) { return v < kn.first; });
                const auto& [x1, f1] = *it;
                const auto& [x0, f0] = *(it - 1);
                return f0 + (f1 - f0) * (x - x0) / (x1 - x0);
            };
            return {F, table.front().first, table.back().first};
        }
        default:
            throw Error(ErrorKind::DomainError, "quantize: explicit atoms have no cdf model");
    }
}

// Merge atoms below the tiny-mass floor into the adjacent outward cell.
// `cells` ordered from zero outward; positions already set.
void merge_tiny_outward(std::vector<Atom>& cells) {
    double carry = 0.0;
    std::vector<Atom> kept;
    for (Atom a : cells) {
        a.prob += carry;
        carry = 0.0;
        if (a.prob <= 0.0) continue;
        if (a.prob < kTinyAtom)
            carry = a.prob;
        else
            kept.push_back(a);
    }
    if (carry > 0.0) {
        if (kept.empty())
            kept.push_back({cells.back().pos, carry});
        else
            kept.back().prob += carry; // nothing further out; fold back inward
    }
    cells = std::move(kept);
}

} // namespace

DiscreteLaw quantize(const TargetLawSpec& spec) {
    validate(spec);
    if (spec.kind == TargetLawSpec::Kind::Atoms)
        return DiscreteLaw::from_atoms(spec.atoms);

    const CdfModel model = make_cdf(spec);
    const double step = spec.disc.step > 0.0 ? spec.disc.step : 1.0 / spec.disc.n;
    double lo = model.lo, hi = model.hi;
    if (spec.disc.has_range()) {
        lo = spec.disc.lo;
        hi = spec.disc.hi;
    }

    std::vector<Atom> pos, neg;
    if (hi > 0.0) {
        const int m = static_cast<int>(std::ceil(hi / step - 1e-9));
        pos.reserve(m);
        for (int k = 1; k <= m; ++k) {
            const double p = (k == m) ? 1.0 - model.F((k - 1) * step)
                                      : model.F(k * step) - model.F((k - 1) * step);
            pos.push_back({k * step, p});
        }
        merge_tiny_outward(pos);
    }
    if (lo < 0.0) {
        const int l = static_cast<int>(std::ceil(-lo / step - 1e-9));
        neg.reserve(l);
        for (int j = 1; j <= l; ++j) {
            const double q = (j == l) ? model.F(-(j - 1) * step)
                                      : model.F(-(j - 1) * step) - model.F(-j * step);
            neg.push_back({-j * step, q});
        }
        merge_tiny_outward(neg);
    }

    std::vector<Atom> atoms(neg.rbegin(), neg.rend());
    atoms.insert(atoms.end(), pos.begin(), pos.end());
    if (atoms.empty()) throw Error(ErrorKind::EmptyLaw, "quantize: all mass truncated away");
    return DiscreteLaw::from_atoms(std::move(atoms));
}

SupportCase classify(const DiscreteLaw& law) {
    const bool has_pos = law.max_pos() > 0.0;
    const bool has_neg = law.min_pos() < 0.0;
    if (has_pos && has_neg) return SupportCase::TwoSided;
    return has_pos ? SupportCase::Positive : SupportCase::Negative;
}

std::pair<double, double> moments(const DiscreteLaw& law) {
    return {law.mean(), law.second_moment()};
}

double barycenter(const DiscreteLaw& law, double x) {
    const double m = law.mean();
    if (std::abs(m) > 1e-10)
        throw Error(ErrorKind::NotCentered, "barycenter requires a centered law");
    const auto& atoms = law.atoms();
    if (x <= atoms.front().pos) return m;
    double mass = 0.0, val = 0.0;
    for (auto it = atoms.rbegin(); it != atoms.rend() && it->pos >= x; ++it) {
        mass += it->prob;
        val += it->pos * it->prob;
    }
    if (mass <= 0.0) return atoms.back().pos;
    return val / mass;
}

} // namespace rbe
