#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sweeping/csv.hpp"
#include "sweeping/scenario.hpp"
#include "sweeping/version.hpp"

namespace sweeping {

struct RunOptions {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    std::filesystem::path out_dir = ".";
    std::vector<std::pair<std::string, std::string>> overrides;
    bool quiet = false;
};

namespace detail {

inline CsvWriter trajectory_csv(const SkorohodSolution& sol) {
    const std::size_t d = sol.x[0].size();
    std::vector<std::string> cols{"t"};
    for (std::size_t i = 1; i <= d; ++i) cols.push_back("x_" + std::to_string(i));
    for (std::size_t i = 1; i <= d; ++i) cols.push_back("k_" + std::to_string(i));
    cols.push_back("tv_k");
    cols.push_back("contact");
    CsvWriter csv(std::move(cols));
    for (std::size_t n = 0; n < sol.x.size(); ++n) {
        std::vector<double> row{sol.grid.node(n)};
        row.insert(row.end(), sol.x[n].begin(), sol.x[n].end());
        row.insert(row.end(), sol.k[n].begin(), sol.k[n].end());
        row.push_back(sol.tv_k[n]);
        row.push_back(sol.contact[n] ? 1.0 : 0.0);
        csv.row(row);
    }
    return csv;
}

inline CsvWriter crowd_csv(const CrowdTrajectory& traj) {
    const std::size_t d = traj.positions.empty() ? 0 : traj.positions[0].size();
    std::vector<std::string> cols{"t"};
    for (std::size_t i = 1; i <= d; ++i) cols.push_back("q_" + std::to_string(i));
    cols.push_back("min_D");
    cols.push_back("active_pairs");
    CsvWriter csv(std::move(cols));
    for (std::size_t n = 0; n < traj.positions.size(); ++n) {
        std::vector<double> row{traj.grid.node(n)};
        row.insert(row.end(), traj.positions[n].begin(), traj.positions[n].end());
        row.push_back(traj.min_distance[n]);
        row.push_back(static_cast<double>(traj.active_pairs[n]));
        csv.row(row);
    }
    return csv;
}

inline void write_text(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << body;
    if (!out) throw IoError("write failed: " + path.string());
}

} // namespace detail

/// Result record of one CLI invocation; the manifest serialization of this
/// plus the resolved config reproduces every output byte.
struct RunResult {
    ExitCode code = ExitCode::ok;
    std::string error;
    std::vector<std::string> outputs;
    std::size_t discarded = 0;
    Json manifest;
};

class Runner {
public:
    Runner(std::string command, std::filesystem::path scenario_file, RunOptions options)
        : command_(std::move(command)),
          file_(std::move(scenario_file)),
          options_(std::move(options)) {}

    RunResult execute() {
        const auto started = std::chrono::steady_clock::now();
        RunResult result;
        Json resolved;
        try {
            std::ifstream in(file_);
            if (!in) throw IoError("cannot read scenario file: " + file_.string());
            Json raw = Json::parse(in, nullptr, false);
            if (raw.is_discarded())
                throw ConfigError("scenario file is not valid JSON: " + file_.string());

            resolved = apply_overrides(std::move(raw), options_.overrides);
            if (options_.seed) resolved["seed"] = *options_.seed;
            if (options_.paths && resolved.contains("paths")) resolved["paths"] = *options_.paths;
            const Scenario scenario = Scenario::parse(resolved);

            std::filesystem::create_directories(options_.out_dir);
            dispatch(scenario, result);
        } catch (const Error& e) {
            result.code = e.exit_code();
            result.error = e.what();
        } catch (const std::filesystem::filesystem_error& e) {
            result.code = ExitCode::io;
            result.error = e.what();
        } catch (const std::exception& e) {
            result.code = ExitCode::solver;
            result.error = e.what();
        }

        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        Json manifest{{"tool", kToolName},
                      {"version", kToolVersion},
                      {"command", command_},
                      {"scenario_file", file_.string()},
                      {"resolved_config", resolved},
                      {"outputs", result.outputs},
                      {"discarded", result.discarded},
                      {"wall_time_seconds", wall},
                      {"exit_code", static_cast<int>(result.code)}};
        if (!result.error.empty()) manifest["error"] = result.error;
        if (result.manifest.is_object()) manifest.update(result.manifest); // dispatch extras
        result.manifest = std::move(manifest);
        try {
            std::filesystem::create_directories(options_.out_dir);
            detail::write_text(options_.out_dir / "run_manifest.json",
                               result.manifest.dump(2) + "\n");
        } catch (const Error&) {
            if (result.code == ExitCode::ok) result.code = ExitCode::io;
        }
        return result;
    }

private:
    void emit(RunResult& result, const std::string& name, const CsvWriter& csv) {
        csv.write(options_.out_dir / name);
        result.outputs.push_back(name);
    }

    void dispatch(const Scenario& scenario, RunResult& result) {
        if (command_ == "run") {
            if (scenario.kind == "skorohod") return run_skorohod(scenario, result);
            if (scenario.kind == "sde") return run_sde(scenario, result);
            if (scenario.kind == "stability") return run_stability(scenario, result);
            if (scenario.kind == "crowd") return run_crowd(scenario, result);
            if (scenario.kind == "geometry-check") return run_geometry_check(scenario, result);
        } else if (command_ == "sweep") {
            if (scenario.kind == "stability") return run_stability(scenario, result);
            if (scenario.kind == "sde") return run_convergence(scenario, result);
            if (scenario.kind == "skorohod") return run_refine(scenario, result);
            throw ConfigError("sweep: scenario kind \"" + scenario.kind +
                              "\" produces no table");
        } else if (command_ == "geometry-check") {
            if (scenario.kind == "geometry-check") return run_geometry_check(scenario, result);
            throw ConfigError("geometry-check requires a geometry-check scenario");
        }
        throw ConfigError("unknown command \"" + command_ + "\"");
    }

    void run_skorohod(const Scenario& scenario, RunResult& result) {
        const TimeGrid grid = scenario.grid();
        const auto set = scenario.set();
        const Driver l = scenario.driver();
        const auto sol = catching_up(*set, l, scenario.u0(), grid);
        emit(result, scenario.output_name("trajectory", "trajectory.csv"),
             detail::trajectory_csv(sol));
        // increments below the contact-flag scale are not support violations
        const double tol = std::max(scenario.support_tolerance(), set->boundary_tolerance());
        const auto violations = support_check(sol, *set, tol);
        if (!violations.empty())
            throw SolverError("support check failed at node " +
                              std::to_string(violations.front().node) + ": " +
                              violations.front().reason);
    }

    void run_sde(const Scenario& scenario, RunResult& result) {
        const TimeGrid grid = scenario.grid();
        const auto set = scenario.set();
        const auto path = BrownianPath::generate(scenario.seed(), grid);
        const auto sol = euler_project(*set, scenario.fields(), scenario.u0(), path);
        emit(result, scenario.output_name("trajectory", "trajectory.csv"),
             detail::trajectory_csv(sol));
    }

    void run_convergence(const Scenario& scenario, RunResult& result) {
        const auto rows = pathwise_convergence(*scenario.set(), scenario.fields(), scenario.u0(),
                                               scenario.seed(), scenario.levels(),
                                               scenario.grid());
        CsvWriter csv({"h", "sup_error", "tv_k"});
        for (const auto& row : rows) csv.row({row.h, row.sup_error, row.tv_k});
        emit(result, scenario.output_name("table", "convergence.csv"), csv);
    }

    void run_refine(const Scenario& scenario, RunResult& result) {
        const auto rows = refine_compare(*scenario.set(), scenario.driver(), scenario.u0(),
                                         scenario.refine_steps());
        CsvWriter csv({"h", "sup_error", "tv_k"});
        for (const auto& row : rows) csv.row({row.h, row.sup_error, row.tv_k});
        emit(result, scenario.output_name("table", "refine.csv"), csv);
    }

    void run_stability(const Scenario& scenario, RunResult& result) {
        const FieldPair fields = scenario.fields();
        const std::size_t n_paths = options_.paths.value_or(scenario.paths());
        const auto sigma_base = scenario.sigma_base();
        const auto set = scenario.set();
        const TimeGrid grid = scenario.grid();
        const auto report =
            stability_sweep(*set, fields.drift, sigma_base, scenario.epsilons(), n_paths,
                            scenario.seed(), scenario.u0(), grid, fields.bound);
        CsvWriter csv({"epsilon", "estimate", "std_error", "n_paths", "discarded"});
        for (const auto& row : report.rows) {
            csv.row({row.epsilon, row.estimate, row.std_error,
                     static_cast<double>(row.n_paths), static_cast<double>(row.discarded)});
            result.discarded += row.discarded;
        }
        emit(result, scenario.output_name("table", "stability.csv"), csv);
        result.manifest["slope"] = report.slope ? Json(*report.slope) : Json(nullptr);
        if (report.low_power_warning)
            result.manifest["warning"] = "fewer than 30 paths: low statistical power";

        // optional per-path trajectory dump: regenerating a path is
        // deterministic, so dumped trajectories match the sweep exactly
        const std::size_t dump = scenario.dump_paths();
        for (std::size_t e = 0; dump > 0 && e < report.rows.size(); ++e) {
            const double eps = report.rows[e].epsilon;
            const FieldPair eps_fields{
                fields.drift,
                [&sigma_base, eps](double t, std::span<const double> x) {
                    return scaled(sigma_base(t, x), eps);
                },
                fields.bound};
            const std::size_t d = scenario.u0().size();
            std::vector<std::string> cols{"path_index", "t"};
            for (std::size_t i = 1; i <= d; ++i) cols.push_back("x_" + std::to_string(i));
            for (std::size_t i = 1; i <= d; ++i) cols.push_back("k_" + std::to_string(i));
            cols.push_back("tv_k");
            cols.push_back("contact");
            CsvWriter paths_csv(std::move(cols));
            for (std::size_t p = 0; p < std::min(dump, n_paths); ++p) {
                const auto path = BrownianPath::generate(rng::derive_seed(scenario.seed(), p), grid);
                SdeSolution sol{grid, {}, {}, {}, {}};
                try {
                    sol = euler_project(*set, eps_fields, scenario.u0(), path);
                } catch (const StepTooLargeError&) {
                    continue; // discarded in the sweep as well
                }
                for (std::size_t n = 0; n < sol.x.size(); ++n) {
                    std::vector<double> row{static_cast<double>(p), grid.node(n)};
                    row.insert(row.end(), sol.x[n].begin(), sol.x[n].end());
                    row.insert(row.end(), sol.k[n].begin(), sol.k[n].end());
                    row.push_back(sol.tv_k[n]);
                    row.push_back(sol.contact[n] ? 1.0 : 0.0);
                    paths_csv.row(row);
                }
            }
            emit(result, "paths_" + format_number(eps) + ".csv", paths_csv);
        }
    }

    void run_crowd(const Scenario& scenario, RunResult& result) {
        const auto config = scenario.crowd();
        const auto traj = simulate(config, scenario.seed());
        emit(result, scenario.output_name("trajectory", "crowd.csv"), detail::crowd_csv(traj));
        if (!traj.completed()) {
            result.manifest["abort_node"] = traj.abort_node;
            throw SolverError("crowd simulation aborted at node " +
                              std::to_string(traj.abort_node) + ": " + *traj.abort_reason);
        }
    }

    void run_geometry_check(const Scenario& scenario, RunResult& result) {
        const auto set = scenario.set();
        const auto* constraint_set = dynamic_cast<const ConstraintSet*>(set.get());
        std::ostringstream report;
        report << "geometry-check report\n";

        for (const auto& probe : scenario.probes()) {
            report << "\nprobe t=" << format_number(probe.t) << " x=[";
            for (std::size_t i = 0; i < probe.x.size(); ++i)
                report << (i ? "," : "") << format_number(probe.x[i]);
            report << "]\n";
            if (set->distance(probe.t, probe.x) > set->boundary_tolerance()) {
                report << "  skipped: probe point infeasible (distance "
                       << format_number(set->distance(probe.t, probe.x)) << ")\n";
                continue;
            }
            if (constraint_set) {
                const auto active = active_constraints(*constraint_set, probe.t, probe.x,
                                                       constraint_set->rho());
                report << "  active:";
                for (auto i : active.indices) report << " " << i;
                report << "\n";
                double gmin = std::numeric_limits<double>::infinity(), gmax = 0.0;
                for (const auto& c : constraint_set->constraints()) {
                    const double gn = norm(c.gradient(probe.t, probe.x));
                    gmin = std::min(gmin, gn);
                    gmax = std::max(gmax, gn);
                }
                const bool in_bounds = gmin >= constraint_set->alpha() - 1e-9 &&
                                       gmax <= constraint_set->beta() + 1e-9;
                report << "  gradient norms: [" << format_number(gmin) << ", "
                       << format_number(gmax) << "] within [alpha, beta]: "
                       << (in_bounds ? "yes" : "NO") << "\n";
                if (!active.indices.empty()) {
                    try {
                        const auto gd = good_direction(*constraint_set, probe.t, probe.x);
                        report << "  gamma: " << format_number(gd.gamma) << "\n";
                        report << "  u:";
                        for (double v : gd.u) report << " " << format_number(v);
                        report << "\n  nu: " << format_number(gd.nu)
                               << "  min_inner: " << format_number(gd.min_inner) << "\n";
                    } catch (const AdmissibilityError& e) {
                        report << "  admissibility not certified: " << e.what() << "\n";
                    }
                }
            }
        }

        if (const auto window = scenario.window()) {
            const double eta = scenario.claimed_eta().value_or(set->prox_constant());
            const auto hypo = hypomonotonicity_check(*set, 0.0, eta, scenario.samples(),
                                                     scenario.config.value("seed", 0ULL), *window);
            report << "\nhypomonotonicity: eta=" << format_number(eta) << " samples="
                   << hypo.samples_tested << " violations=" << hypo.violations.size() << "\n";
            for (const auto& [t1, t2] : scenario.time_pairs()) {
                const double d = hausdorff_estimate(*set, t1, *set, t2, *window,
                                                    scenario.samples(),
                                                    scenario.config.value("seed", 0ULL));
                report << "hausdorff t=" << format_number(t1) << " vs t=" << format_number(t2)
                       << ": " << format_number(d) << "\n";
            }
        }

        const std::string name = scenario.output_name("report", "geometry_check.txt");
        detail::write_text(options_.out_dir / name, report.str());
        result.outputs.push_back(name);
    }

    std::string command_;
    std::filesystem::path file_;
    RunOptions options_;
};

inline RunResult run_scenario_file(const std::string& command,
                                   const std::filesystem::path& file, RunOptions options) {
    return Runner(command, file, std::move(options)).execute();
}

} // namespace sweeping
