#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "flockring/config_io.hpp"
#include "flockring/errors.hpp"
#include "flockring/optimizer.hpp"
#include "flockring/simulator.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitPlanInvalid = 4;

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void write_manifest(const fs::path& out_dir, const std::string& command, const std::string& config_path,
                    std::uint64_t seed, const std::vector<std::string>& artifacts, double duration) {
    json manifest;
    manifest["command"] = command;
    manifest["config"] = config_path;
    manifest["seed"] = seed;
    manifest["out"] = out_dir.string();
    manifest["artifacts"] = artifacts;
    manifest["duration_seconds"] = duration;
    manifest["version"] = kVersion;
    std::ofstream out(out_dir / "manifest.json", std::ios::binary);
    out << manifest.dump(2) << "\n";
}

int cmd_simulate(const std::string& config_path, std::optional<std::uint64_t> seed,
                 const std::string& out_dir) {
    Stopwatch clock;
    flockring::ScenarioConfig config;
    try {
        config = flockring::load_scenario(config_path);
    } catch (const flockring::ConfigError& e) {
        std::cerr << "error: " << config_path << ": " << e.what() << "\n";
        return kExitInput;
    }
    if (seed) config.seed = *seed;

    flockring::RunResult result;
    try {
        result = flockring::run(config);
    } catch (const flockring::DivergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const flockring::InfeasibleSpacingError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }

    fs::create_directories(out_dir);
    flockring::emit_trajectory(result, fs::path(out_dir) / "trajectory.csv");
    flockring::emit_metrics(result, fs::path(out_dir) / "metrics.csv");
    flockring::emit_violations(result, fs::path(out_dir) / "violations.csv");
    write_manifest(out_dir, "simulate", config_path, config.seed,
                   {"trajectory.csv", "metrics.csv", "violations.csv"}, clock.seconds());

    std::cout << config.name << ": " << result.trajectory.size() << " frames, "
              << result.violations.size() << " violations, final d=" << result.final_d
              << " d_L=" << result.final_d_l << "\n";
    return kExitOk;
}

int cmd_optimize(const std::string& config_path, const std::string& algorithm, int scenario,
                 std::optional<std::uint64_t> seed, int population, long iterations,
                 const std::string& out_dir) {
    Stopwatch clock;
    flockring::OptimizerConfig opt;
    flockring::ScenarioConfig base;
    try {
        opt.algorithm = flockring::parse_algorithm(algorithm);
        opt.scenario = scenario;
        opt.population = population;
        opt.iterations = iterations;
        base = flockring::load_scenario(config_path);
        opt.seed = seed.value_or(base.seed);
        opt.validate();
    } catch (const flockring::ConfigError& e) {
        std::cerr << "error: " << config_path << ": " << e.what() << "\n";
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }

    const flockring::OptimizeResult result = flockring::optimize(opt, base);

    fs::create_directories(out_dir);
    {
        std::ofstream report(fs::path(out_dir) / "report.csv", std::ios::binary);
        report << "# algorithm=" << algorithm << " scenario=" << scenario << " seed=" << opt.seed
               << " population=" << population << " iterations=" << iterations << "\n";
        report << "# best_cost=" << result.best_cost << "\n";
        for (std::size_t i = 0; i < result.free.size(); ++i) {
            report << "# best." << result.free[i].name << "=" << result.best[i] << "\n";
        }
        report << "iteration,best_cost\n";
        for (std::size_t i = 0; i < result.history.size(); ++i) {
            report << i << "," << result.history[i] << "\n";
        }
    }
    {
        json best;
        for (std::size_t i = 0; i < result.free.size(); ++i) {
            best[result.free[i].name] = result.best[i];
        }
        std::ofstream out(fs::path(out_dir) / "best_params.json", std::ios::binary);
        out << best.dump(2) << "\n";
    }
    {
        // Full scenario with the tuned values spliced in, ready for `simulate`.
        const auto bounds = flockring::scenario_bounds(scenario);
        auto tuned = flockring::apply_named_params(base, bounds.fixed);
        tuned = flockring::apply_candidate(tuned, result.free, result.best);
        tuned.name = base.name + "_tuned";
        std::ofstream out(fs::path(out_dir) / "best_config.json", std::ios::binary);
        out << flockring::scenario_to_json(tuned);
    }
    write_manifest(out_dir, "optimize", config_path, opt.seed,
                   {"report.csv", "best_params.json", "best_config.json"}, clock.seconds());

    std::cout << algorithm << " scenario " << scenario << ": best cost " << result.best_cost
              << " over " << (result.history.size() - 1) << " iterations\n";
    return kExitOk;
}

int cmd_plan(const std::string& config_path) {
    json root;
    try {
        std::ifstream in(config_path, std::ios::binary);
        if (!in) {
            std::cerr << "error: cannot read " << config_path << "\n";
            return kExitInput;
        }
        root = json::parse(in);
    } catch (const json::exception& e) {
        std::cerr << "error: " << config_path << ": invalid JSON: " << e.what() << "\n";
        return kExitInput;
    }

    try {
        std::vector<int> counts;
        double d_l1 = 0.0, d_eps = 0.0, kappa = 0.0, ts = 0.0;
        std::vector<double> amplitudes;
        const json& plan_obj = root.contains("counts") ? root : root.at("plan");
        for (const auto& c : plan_obj.at("counts")) counts.push_back(c.get<int>());
        d_l1 = plan_obj.at("d_l1").get<double>();
        d_eps = plan_obj.at("d_eps").get<double>();
        ts = plan_obj.value("ts", 0.0);
        kappa = plan_obj.contains("kappa") ? plan_obj.at("kappa").get<double>()
                                           : root.at("params").at("kappa").get<double>();
        if (plan_obj.contains("amplitudes")) {
            for (const auto& a : plan_obj.at("amplitudes")) amplitudes.push_back(a.get<double>());
        }

        const flockring::CirclePlan plan =
            flockring::plan_circles(counts, d_l1, d_eps, kappa, ts, amplitudes);

        std::cout << "spacing d = " << plan.d << "\n";
        std::cout << "interaction range r = " << kappa * plan.d << "\n";
        for (int i = 0; i < plan.n(); ++i) {
            std::cout << "circle " << i + 1 << ": N = " << plan.counts[i]
                      << ", radius = " << plan.radii[i];
            if (i + 1 < plan.n()) {
                std::cout << ", cutoff = " << plan.cutoffs[i]
                          << ", gap margin = " << (plan.radii[i + 1] - plan.radii[i]) - kappa * plan.d;
            }
            std::cout << "\n";
        }
        std::cout << "plan valid\n";
        return kExitOk;
    } catch (const json::exception& e) {
        std::cerr << "error: " << config_path << ": " << e.what() << "\n";
        return kExitInput;
    } catch (const flockring::PlanError& e) {
        std::cerr << "plan invalid: " << e.what() << "\n";
        return kExitPlanInvalid;
    } catch (const flockring::InfeasibleSpacingError& e) {
        std::cerr << "plan invalid: " << e.what() << "\n";
        return kExitPlanInvalid;
    }
}

int cmd_export_plots(const std::string& run_dir, std::string out_dir) {
    const fs::path metrics_path = fs::path(run_dir) / "metrics.csv";
    const fs::path trajectory_path = fs::path(run_dir) / "trajectory.csv";
    if (!fs::exists(metrics_path) || !fs::exists(trajectory_path)) {
        std::cerr << "error: " << run_dir << " does not contain metrics.csv and trajectory.csv\n";
        return kExitInput;
    }

    std::vector<flockring::MetricsFrame> metrics;
    std::vector<flockring::TrajectoryFrame> trajectory;
    try {
        metrics = flockring::read_metrics(metrics_path);
        trajectory = flockring::read_trajectory(trajectory_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    if (metrics.empty() || trajectory.empty()) {
        std::cerr << "error: " << run_dir << " holds no frames to export\n";
        return kExitInput;
    }

    if (out_dir.empty()) out_dir = (fs::path(run_dir) / "plots").string();
    fs::create_directories(out_dir);

    {
        std::ofstream out(fs::path(out_dir) / "leader_distances.csv", std::ios::binary);
        out << "t,id,value\n";
        for (const auto& m : metrics) {
            for (std::size_t k = 0; k < m.leader_distances.size(); ++k) {
                out << m.t << "," << m.alive_ids[k] << "," << m.leader_distances[k] << "\n";
            }
        }
    }
    {
        std::ofstream out(fs::path(out_dir) / "adjacent_distances.csv", std::ios::binary);
        out << "t,rank,value\n";
        for (const auto& m : metrics) {
            for (std::size_t k = 0; k < m.adjacent_distances.size(); ++k) {
                out << m.t << "," << k << "," << m.adjacent_distances[k] << "\n";
            }
        }
    }
    {
        std::ofstream out(fs::path(out_dir) / "trajectory_paths.csv", std::ios::binary);
        out << "id,t,qx,qy\n";
        for (const auto& frame : trajectory) {
            out << "-1," << frame.t << "," << frame.leader.q_r.x() << "," << frame.leader.q_r.y() << "\n";
        }
        if (!trajectory.empty()) {
            for (const auto& probe : trajectory.front().agents) {
                const int id = probe.id;
                for (const auto& frame : trajectory) {
                    for (const auto& a : frame.agents) {
                        if (a.id == id) {
                            out << id << "," << frame.t << "," << a.q.x() << "," << a.q.y() << "\n";
                            break;
                        }
                    }
                }
            }
        }
    }

    std::cout << "exported " << metrics.size() << " frames to " << out_dir << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    std::cout.precision(10);
    std::cerr.precision(10);

    CLI::App app{"flockring: circular formation flocking simulator and parameter tuner"};
    app.require_subcommand(1);

    std::string config_path, out_dir, run_dir, algorithm = "gwo";
    std::optional<std::uint64_t> seed;
    int scenario = 4;
    int population = 30;
    long iterations = 500;

    CLI::App* simulate = app.add_subcommand("simulate", "run a scenario and write its artifacts");
    simulate->add_option("--config", config_path, "scenario JSON")->required();
    simulate->add_option("--seed", seed, "override the scenario seed");
    simulate->add_option("--out", out_dir, "output directory")->required();

    CLI::App* optimize = app.add_subcommand("optimize", "tune controller parameters");
    optimize->add_option("--config", config_path, "base scenario JSON")->required();
    optimize->add_option("--algorithm", algorithm, "ga|pso|gwo")->required();
    optimize->add_option("--scenario", scenario, "tuning scenario 1..4")->check(CLI::Range(1, 4));
    optimize->add_option("--seed", seed, "optimizer seed (defaults to the scenario seed)");
    optimize->add_option("--population", population, "population size");
    optimize->add_option("--iterations", iterations, "iteration budget");
    optimize->add_option("--out", out_dir, "output directory")->required();

    CLI::App* plan = app.add_subcommand("plan", "validate a multi-circle plan");
    plan->add_option("--config", config_path, "scenario or bare plan JSON")->required();

    CLI::App* export_plots = app.add_subcommand("export-plots", "pivot run outputs into plot series");
    export_plots->add_option("--run", run_dir, "directory written by simulate")->required();
    export_plots->add_option("--out", out_dir, "output directory (default: <run>/plots)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(config_path, seed, out_dir);
        if (optimize->parsed()) {
            return cmd_optimize(config_path, algorithm, scenario, seed, population, iterations, out_dir);
        }
        if (plan->parsed()) return cmd_plan(config_path);
        if (export_plots->parsed()) return cmd_export_plots(run_dir, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitInput;
}
