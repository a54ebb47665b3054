#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace rbe {

/// One atom of a finite target law: position x != 0 with probability p > 0.
struct Atom {
    double pos = 0.0;
    double prob = 0.0;
};

enum class SupportCase { Positive, Negative, TwoSided };

/// Finite atomic probability law on R \ {0}, positions strictly increasing,
/// probabilities summing to one. The discrete mu_n the solver embeds.
class DiscreteLaw {
public:
    /// Validates invariants as given. With canonicalize = true the atoms are
    /// first sorted and exact-duplicate positions merged.
    static DiscreteLaw from_atoms(std::vector<Atom> atoms, bool canonicalize = false);

    const std::vector<Atom>& atoms() const noexcept { return atoms_; }
    std::size_t size() const noexcept { return atoms_.size(); }

    double mean() const;
    double second_moment() const;
    double min_pos() const { return atoms_.front().pos; }
    double max_pos() const { return atoms_.back().pos; }

    /// Atoms with positive position, ascending.
    std::vector<Atom> positive_side() const;
    /// Atoms with negative position, ordered from closest to zero outward.
    std::vector<Atom> negative_side() const;

    /// Law reflected about zero (positions negated). Used to reduce the
    /// all-negative support case to the all-positive one.
    DiscreteLaw reflected() const;

private:
    explicit DiscreteLaw(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {}
    std::vector<Atom> atoms_;
};

/// Description of a target law before discretization.
struct TargetLawSpec {
    enum class Kind { Atoms, Exponential, Normal, CdfTable };

    Kind kind = Kind::Atoms;
    double rate = 1.0;                  // Exponential
    double mean = 0.0, variance = 1.0;  // Normal
    std::vector<Atom> atoms;            // Atoms
    std::vector<std::pair<double, double>> cdf_table; // CdfTable: (x, F(x)) knots

    struct Discretization {
        int n = 100;        // fineness parameter; cell width defaults to 1/n
        double step = 0.0;  // explicit cell width; 0 means use 1/n
        double lo = 0.0, hi = 0.0; // truncation range [gamma_N, beta_N]; lo == hi means default
        bool has_range() const { return lo < hi; }
    } disc;
};

/// Checks spec invariants; returns the spec itself on success.
const TargetLawSpec& validate(const TargetLawSpec& spec);

/// Discretize per the rounding-away-from-zero scheme: positive mass rounds up
/// to the right cell endpoint, negative mass rounds down to the left endpoint,
/// tail mass beyond the truncation range is lumped onto the range endpoints.
/// Explicit-atom specs pass through unchanged.
DiscreteLaw quantize(const TargetLawSpec& spec);

SupportCase classify(const DiscreteLaw& law);

/// (mean, second moment) as exact weighted sums over atoms.
std::pair<double, double> moments(const DiscreteLaw& law);

/// E[X | X >= x] for a centered law; equals the mean (zero) for x at or below
/// the smallest atom and is capped at the largest atom.
double barycenter(const DiscreteLaw& law, double x);

} // namespace rbe
