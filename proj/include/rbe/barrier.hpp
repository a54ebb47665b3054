#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace rbe {

/// One step of the barrier pair: on the time interval (previous t_end, t_end]
/// the upper boundary sits at `upper` and the lower at `lower`. Levels are
/// left-continuous step functions; +/-inf marks an exhausted side.
struct BarrierSegment {
    double t_end = 0.0;
    double upper = std::numeric_limits<double>::infinity();
    double lower = -std::numeric_limits<double>::infinity();
};

/// Piecewise-constant reversed-barrier pair (b, c): b increasing with upper
/// levels > 0, c decreasing with lower levels < 0, final segment extends to
/// t = +inf, and the two sides are never both infinite on the same interval.
class Barrier {
public:
    Barrier() = default; // empty placeholder; populate via from_segments
    static Barrier from_segments(std::vector<BarrierSegment> segs);

    const std::vector<BarrierSegment>& segments() const noexcept { return segs_; }
    std::size_t size() const noexcept { return segs_.size(); }

    /// Levels active at time t > 0 (levels apply on half-open (t_prev, t_end]).
    double upper_at(double t) const;
    double lower_at(double t) const;

    /// Start of the suffix where the side is infinite; +inf if the side stays
    /// finite forever.
    double upper_infinite_from() const;
    double lower_infinite_from() const;

    /// CSV with header "t_end,upper,lower" and literal inf/-inf sentinels.
    void write_csv(std::ostream& os) const;
    std::string to_csv() const;
    static Barrier read_csv(std::istream& is);
    static Barrier parse_csv(const std::string& text);

private:
    explicit Barrier(std::vector<BarrierSegment> segs) : segs_(std::move(segs)) {}
    std::vector<BarrierSegment> segs_;
};

} // namespace rbe
