// Batch front end: parse a JSON run config, execute the
// quantize -> solve -> verify pipeline, and emit barrier tables, diagnostic
// reports, and plot-ready curve data.

#include "rbe/distance.hpp"
#include "rbe/errors.hpp"
#include "rbe/io.hpp"
#include "rbe/law.hpp"
#include "rbe/solver.hpp"
#include "rbe/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outputs {
    std::string barrier_csv = "barrier.csv";
    std::string solve_report_json = "solve_report.json";
    std::string embed_report_json = "embed_report.json";
    std::string curves_csv = "curves.csv";
};

struct RunConfig {
    rbe::TargetLawSpec law;
    rbe::SolverConfig solver;
    rbe::SimConfig sim;
    Outputs outputs;
    std::string mode;              // solve | solve+verify | verify-only | compare-ay
    std::string barrier_in;        // for verify-only
    std::vector<double> t_grid = {0.5, 1.0, 2.0, 4.0, 8.0};
};

[[noreturn]] void config_fail(const std::string& msg) {
    throw rbe::Error(rbe::ErrorKind::ConfigError, msg);
}

rbe::TargetLawSpec parse_law(const json& j) {
    rbe::TargetLawSpec spec;
    const std::string kind = j.value("kind", "");
    if (kind == "atoms") {
        spec.kind = rbe::TargetLawSpec::Kind::Atoms;
        if (!j.contains("atoms")) config_fail("law.atoms missing");
        for (const auto& a : j["atoms"]) {
            if (!a.is_array() || a.size() != 2) config_fail("law.atoms entries must be [x, p]");
            spec.atoms.push_back({a[0].get<double>(), a[1].get<double>()});
        }
    } else if (kind == "exponential") {
        spec.kind = rbe::TargetLawSpec::Kind::Exponential;
        spec.rate = j.value("rate", 1.0);
    } else if (kind == "normal") {
        spec.kind = rbe::TargetLawSpec::Kind::Normal;
        spec.mean = j.value("mean", 0.0);
        spec.variance = j.value("variance", 1.0);
    } else if (kind == "cdf-table") {
        spec.kind = rbe::TargetLawSpec::Kind::CdfTable;
        if (!j.contains("table")) config_fail("law.table missing");
        for (const auto& kn : j["table"]) {
            if (!kn.is_array() || kn.size() != 2) config_fail("law.table entries must be [x, F]");
            spec.cdf_table.emplace_back(kn[0].get<double>(), kn[1].get<double>());
        }
    } else {
        config_fail("law.kind must be one of atoms|exponential|normal|cdf-table");
    }
    spec.disc.n = j.value("n", 100);
    spec.disc.step = j.value("step", 0.0);
    if (j.contains("range")) {
        const auto& r = j["range"];
        if (!r.is_array() || r.size() != 2) config_fail("law.range must be [lo, hi]");
        spec.disc.lo = r[0].get<double>();
        spec.disc.hi = r[1].get<double>();
    }
    return spec;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) config_fail("cannot open config file " + path);
    json j;
    try {
        f >> j;
    } catch (const std::exception& e) {
        config_fail(std::string("config is not valid JSON: ") + e.what());
    }

    RunConfig rc;
    if (!j.contains("law")) config_fail("config.law missing");
    rc.law = parse_law(j["law"]);
    if (j.contains("solver")) {
        const auto& s = j["solver"];
        rc.solver.grid_points = s.value("grid_points", rc.solver.grid_points);
        rc.solver.root_tol = s.value("root_tol", rc.solver.root_tol);
        rc.solver.root_slack = s.value("root_slack", rc.solver.root_slack);
        rc.solver.kernel.series_tol = s.value("series_tol", rc.solver.kernel.series_tol);
        rc.solver.kernel.max_terms = s.value("max_terms", rc.solver.kernel.max_terms);
        rc.solver.kernel.quad_tol = s.value("quad_tol", rc.solver.kernel.quad_tol);
        rc.solver.parallel = s.value("parallel", rc.solver.parallel);
    }
    if (j.contains("sim")) {
        const auto& s = j["sim"];
        rc.sim.n_paths = s.value("n_paths", rc.sim.n_paths);
        rc.sim.step = s.value("step", rc.sim.step);
        rc.sim.horizon = s.value("horizon", rc.sim.horizon);
        rc.sim.seed = s.value("seed", rc.sim.seed);
        rc.sim.parallel = s.value("parallel", rc.sim.parallel);
        const std::string scheme = s.value("scheme", "bridge");
        if (scheme == "bridge")
            rc.sim.scheme = rbe::SimConfig::Scheme::BridgeCorrected;
        else if (scheme == "naive")
            rc.sim.scheme = rbe::SimConfig::Scheme::Naive;
        else
            config_fail("sim.scheme must be bridge|naive");
    }
    if (j.contains("outputs")) {
        const auto& o = j["outputs"];
        rc.outputs.barrier_csv = o.value("barrier_csv", rc.outputs.barrier_csv);
        rc.outputs.solve_report_json = o.value("solve_report_json", rc.outputs.solve_report_json);
        rc.outputs.embed_report_json = o.value("embed_report_json", rc.outputs.embed_report_json);
        rc.outputs.curves_csv = o.value("curves_csv", rc.outputs.curves_csv);
    }
    rc.mode = j.value("mode", "");
    rc.barrier_in = j.value("barrier_in", "");
    if (j.contains("t_grid")) {
        rc.t_grid.clear();
        for (const auto& v : j["t_grid"]) rc.t_grid.push_back(v.get<double>());
    }
    return rc;
}

std::string resolve(const std::string& out_dir, const std::string& p) {
    fs::path path(p);
    if (path.is_absolute()) return p;
    return (fs::path(out_dir) / path).string();
}

int run_pipeline(const RunConfig& rc, const std::string& out_dir) {
    fs::create_directories(out_dir);

    const rbe::DiscreteLaw law = rbe::quantize(rbe::validate(rc.law));

    std::optional<rbe::Barrier> barrier;
    if (rc.mode == "verify-only") {
        if (rc.barrier_in.empty()) config_fail("verify-only mode needs barrier_in");
        std::ifstream f(rc.barrier_in);
        if (!f) throw rbe::Error(rbe::ErrorKind::IoError, "cannot open " + rc.barrier_in);
        barrier = rbe::Barrier::read_csv(f);
    } else {
        const rbe::SolveReport rep = rbe::solve(law, rc.solver);
        barrier = rep.barrier;
        rbe::io::write_file(resolve(out_dir, rc.outputs.barrier_csv), rep.barrier.to_csv());
        rbe::io::write_file(resolve(out_dir, rc.outputs.solve_report_json),
                            rbe::io::solve_report_to_json(rep));
    }

    if (rc.mode == "solve") return 0;

    bool gates_pass = true;
    rbe::EmbedReport rep = rbe::verify_embedding(law, *barrier, rc.sim, rc.t_grid);

    if (rc.mode == "compare-ay") {
        rbe::SimConfig ay_cfg = rc.sim;
        ay_cfg.seed = rc.sim.seed + 1; // independent comparison sample
        const rbe::StoppedSamples sigma = rbe::simulate_azema_yor(law, ay_cfg);
        std::vector<double> sigma_vals;
        for (std::size_t i = 0; i < sigma.value.size(); ++i)
            if (!sigma.truncated[i]) sigma_vals.push_back(sigma.value[i]);
        const double ay_self = rbe::levy_distance(rbe::empirical_cdf(sigma_vals), rbe::cdf_of(law));
        if (ay_self >= 0.02) {
            std::cout << json{{"error",
                               {{"type", "AySelfCheckFailed"},
                                {"message", "Azema-Yor empirical law is off by Levy distance " +
                                                std::to_string(ay_self)}}}}
                             .dump()
                      << "\n";
            gates_pass = false;
        }
        for (double T : rc.t_grid)
            rep.comparison_curve.push_back(rbe::truncated_expectation(sigma, T));
        const rbe::StoppedSamples tau = rbe::simulate_stopped(*barrier, rc.sim);
        const rbe::TruncatedComparison cmp =
            rbe::compare_truncated_expectations(tau, sigma, rc.t_grid);
        if (!cmp.all_pass) {
            std::cout << json{{"error",
                               {{"type", "OptimalityGateFailed"},
                                {"message", "E(tau^T) <= E(sigma^T) + 2SE violated on the grid"}}}}
                             .dump()
                      << "\n";
            gates_pass = false;
        }
    }

    rbe::io::write_file(resolve(out_dir, rc.outputs.embed_report_json),
                        rbe::io::embed_report_to_json(rep));
    std::ostringstream curves;
    rbe::io::write_curves_csv(curves, rep);
    rbe::io::write_file(resolve(out_dir, rc.outputs.curves_csv), curves.str());
    return gates_pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reversed-barrier Skorokhod embedding: solve boundary pairs and certify them by Monte Carlo"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    if (const char* env = std::getenv("RBEMBED_OUT_DIR")) out_dir = env;
    if (out_dir.empty()) out_dir = ".";
    std::optional<long> n_paths_override;
    std::optional<std::uint64_t> seed_override;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run configuration")->required();
        sub->add_option("--out-dir", out_dir, "output directory (default: RBEMBED_OUT_DIR or .)");
        sub->add_option("--n-paths", n_paths_override, "override sim.n_paths");
        sub->add_option("--seed", seed_override, "override sim.seed");
    };
    CLI::App* solve_cmd = app.add_subcommand("solve", "compute the barrier pair only");
    CLI::App* verify_cmd = app.add_subcommand("verify", "solve (or load) a barrier and certify the embedding");
    CLI::App* compare_cmd = app.add_subcommand("compare", "verify plus the Azema-Yor truncated-expectation comparison");
    add_common(solve_cmd);
    add_common(verify_cmd);
    add_common(compare_cmd);

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig rc = parse_config(config_path);
        if (solve_cmd->parsed())
            rc.mode = "solve";
        else if (compare_cmd->parsed())
            rc.mode = "compare-ay";
        else if (rc.mode != "verify-only")
            rc.mode = "solve+verify";
        if (n_paths_override) rc.sim.n_paths = *n_paths_override;
        if (seed_override) rc.sim.seed = *seed_override;
        return run_pipeline(rc, out_dir);
    } catch (const rbe::Error& e) {
        const bool config_err = e.kind() == rbe::ErrorKind::ConfigError;
        std::cout << json{{"error",
                           {{"type", rbe::error_kind_name(e.kind())}, {"message", e.what()}}}}
                         .dump()
                  << "\n";
        return config_err ? 2 : 1;
    } catch (const std::exception& e) {
        std::cout << json{{"error", {{"type", "Unexpected"}, {"message", e.what()}}}}.dump() << "\n";
        return 1;
    }
}
