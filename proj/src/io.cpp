#include "rbe/io.hpp"
#include "rbe/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace rbe::io {

namespace {

using nlohmann::json;

json num_or_inf(double v) {
    if (v == std::numeric_limits<double>::infinity()) return "inf";
    if (v == -std::numeric_limits<double>::infinity()) return "-inf";
    return v;
}

json num_or_null(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

std::string csv_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

std::string solve_report_to_json(const SolveReport& rep) {
    json j;
    j["barrier"] = json::array();
    for (const auto& s : rep.barrier.segments())
        j["barrier"].push_back({{"t_end", num_or_inf(s.t_end)},
                                {"upper", num_or_inf(s.upper)},
                                {"lower", num_or_inf(s.lower)}});
    j["steps"] = json::array();
    for (const auto& s : rep.steps)
        j["steps"].push_back({{"k", s.k},
                              {"side", s.side},
                              {"upper", num_or_inf(s.upper)},
                              {"lower", num_or_inf(s.lower)},
                              {"t_end", num_or_inf(s.t_end)},
                              {"dt", num_or_inf(s.dt)},
                              {"residual", s.residual},
                              {"mass_before", s.mass_before},
                              {"mass_after", s.mass_after},
                              {"drift", s.drift}});
    j["upper_exhausted_at"] = num_or_null(rep.upper_exhausted_at);
    j["lower_exhausted_at"] = num_or_null(rep.lower_exhausted_at);
    j["max_residual"] = rep.max_residual;
    j["max_drift"] = rep.max_drift;
    return j.dump(2) + "\n";
}

std::string embed_report_to_json(const EmbedReport& rep) {
    json j;
    j["n_paths"] = rep.n_paths;
    j["seed"] = rep.seed;
    j["truncated_path_fraction"] = rep.truncated_path_fraction;
    j["levy_distance"] = rep.levy_dist;
    j["ks_distance"] = rep.ks_dist;
    j["mean_tau"] = rep.mean_tau;
    j["se_mean_tau"] = rep.se_mean_tau;
    j["var_tau"] = rep.var_tau;
    j["second_moment_mu"] = rep.second_moment_mu;
    j["law_centered"] = rep.law_centered;
    j["moment_check_pass"] = rep.moment_check_pass;
    j["empirical_cdf"] = json::array();
    for (const auto& [x, F] : rep.empirical_cdf_points) j["empirical_cdf"].push_back({x, F});
    auto curve = [](const std::vector<CurvePoint>& c) {
        json arr = json::array();
        for (const auto& p : c) arr.push_back({{"T", p.T}, {"value", p.value}, {"se", p.se}});
        return arr;
    };
    j["truncated_expectation_curve"] = curve(rep.truncated_expectation_curve);
    if (!rep.comparison_curve.empty()) j["comparison_curve"] = curve(rep.comparison_curve);
    return j.dump(2) + "\n";
}

void write_curves_csv(std::ostream& os, const EmbedReport& rep) {
    os << "curve,x,y,se\n";
    for (const auto& [x, F] : rep.empirical_cdf_points)
        os << "cdf," << csv_num(x) << ',' << csv_num(F) << ",0\n";
    for (const auto& p : rep.truncated_expectation_curve)
        os << "e_tau_trunc," << csv_num(p.T) << ',' << csv_num(p.value) << ',' << csv_num(p.se) << '\n';
    for (const auto& p : rep.comparison_curve)
        os << "e_sigma_trunc," << csv_num(p.T) << ',' << csv_num(p.value) << ',' << csv_num(p.se) << '\n';
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::IoError, "cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorKind::IoError, "cannot write " + path);
    f << content;
    if (!f) throw Error(ErrorKind::IoError, "write failed for " + path);
}

} // namespace rbe::io
