#include "rbe/barrier.hpp"
#include "rbe/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace rbe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
    if (v == kInf) return "inf";
    if (v == -kInf) return "-inf";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_num(const std::string& s) {
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw Error(ErrorKind::IoError, "barrier csv: bad number '" + s + "'");
    return v;
}

} // namespace

Barrier Barrier::from_segments(std::vector<BarrierSegment> segs) {
    if (segs.empty()) throw Error(ErrorKind::DomainError, "barrier needs at least one segment");
    double prev_t = 0.0;
    double prev_u = 0.0;
    double prev_l = 0.0;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const auto& s = segs[i];
        if (!(s.t_end > prev_t)) throw Error(ErrorKind::DomainError, "barrier times must be strictly increasing");
        if (std::isnan(s.upper) || std::isnan(s.lower))
            throw Error(ErrorKind::DomainError, "barrier level is NaN");
        if (!(s.upper > 0.0)) throw Error(ErrorKind::DomainError, "barrier upper levels must be > 0");
        if (!(s.lower < 0.0)) throw Error(ErrorKind::DomainError, "barrier lower levels must be < 0");
        if (s.upper == kInf && s.lower == -kInf)
            throw Error(ErrorKind::BothSidesInfinite, "barrier has both sides infinite on one interval");
        if (i > 0 && (s.upper < prev_u || s.lower > prev_l))
            throw Error(ErrorKind::DomainError, "barrier levels must move outward over time");
        prev_t = s.t_end;
        prev_u = s.upper;
        prev_l = s.lower;
    }
    if (segs.back().t_end != kInf)
        throw Error(ErrorKind::DomainError, "final barrier segment must extend to t = +inf");
    return Barrier(std::move(segs));
}

namespace {

const BarrierSegment& segment_at(const std::vector<BarrierSegment>& segs, double t) {
    auto it = std::lower_bound(segs.begin(), segs.end(), t,
                               [](const BarrierSegment& s, double v) { return s.t_end < v; });
    if (it == segs.end()) --it;
    return *it;
}

} // namespace

double Barrier::upper_at(double t) const { return segment_at(segs_, t).upper; }
double Barrier::lower_at(double t) const { return segment_at(segs_, t).lower; }

double Barrier::upper_infinite_from() const {
    double from = kInf;
    for (auto it = segs_.rbegin(); it != segs_.rend() && it->upper == kInf; ++it)
        from = it == segs_.rend() - 1 ? 0.0 : (it + 1)->t_end;
    return from;
}

double Barrier::lower_infinite_from() const {
    double from = kInf;
    for (auto it = segs_.rbegin(); it != segs_.rend() && it->lower == -kInf; ++it)
        from = it == segs_.rend() - 1 ? 0.0 : (it + 1)->t_end;
    return from;
}

void Barrier::write_csv(std::ostream& os) const {
    os << "t_end,upper,lower\n";
    for (const auto& s : segs_)
        os << fmt(s.t_end) << ',' << fmt(s.upper) << ',' << fmt(s.lower) << '\n';
}

std::string Barrier::to_csv() const {
    std::ostringstream ss;
    write_csv(ss);
    return ss.str();
}

Barrier Barrier::read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "t_end,upper,lower")
        throw Error(ErrorKind::IoError, "barrier csv: missing header 't_end,upper,lower'");
    std::vector<BarrierSegment> segs;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string a, b, c;
        if (!std::getline(row, a, ',') || !std::getline(row, b, ',') || !std::getline(row, c))
            throw Error(ErrorKind::IoError, "barrier csv: malformed row '" + line + "'");
        segs.push_back({parse_num(a), parse_num(b), parse_num(c)});
    }
    return from_segments(std::move(segs));
}

Barrier Barrier::parse_csv(const std::string& text) {
    std::istringstream ss(text);
    return read_csv(ss);
}

} // namespace rbe
