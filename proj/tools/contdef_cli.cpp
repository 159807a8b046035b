#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "contdef/errors.hpp"
#include "contdef/simulation.hpp"

namespace {

using json = nlohmann::ordered_json;

// Relative output paths land in CONTDEF_OUT_DIR when it is set.
std::string out_path(const std::string& path) {
    const char* dir = std::getenv("CONTDEF_OUT_DIR");
    if (!dir || !*dir || path.empty() || path.front() == '/') return path;
    return std::string(dir) + "/" + path;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw contdef::IoError("cannot open output file: " + path);
    out << text;
    if (!out) throw contdef::IoError("failed while writing: " + path);
}

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void export_trajectory(const contdef::LeaderTrajectory& traj, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw contdef::IoError("cannot open trajectory file: " + path);
    out << "t";
    for (int l = 1; l <= 3; ++l) {
        const std::string p = ",l" + std::to_string(l) + "_";
        out << p << "x" << p << "y" << p << "vx" << p << "vy" << p << "ax" << p << "ay";
    }
    out << "\n";
    for (int k = 0; k < traj.grid_size(); ++k) {
        out << fmt17(traj.times(k));
        for (int l = 0; l < 3; ++l) {
            out << ',' << fmt17(traj.position[l](k, 0)) << ',' << fmt17(traj.position[l](k, 1))
                << ',' << fmt17(traj.velocity[l](k, 0)) << ',' << fmt17(traj.velocity[l](k, 1))
                << ',' << fmt17(traj.accel[l](k, 0)) << ',' << fmt17(traj.accel[l](k, 1));
        }
        out << "\n";
    }
    if (!out) throw contdef::IoError("failed while writing trajectory file: " + path);
}

json report_json(const contdef::SafetyReport& r) {
    auto verdict = [](const contdef::ConditionVerdict& v) {
        json j{{"ok", v.ok}};
        if (!v.ok) {
            j["first_violation_step"] = v.first_violation_step;
            j["agents"] = v.agents;
            j["margin"] = v.margin;
        }
        return j;
    };
    return json{{"all_ok", r.all_ok()},
                {"collision", verdict(r.collision)},
                {"boundedness", verdict(r.boundedness)},
                {"containment", verdict(r.containment)},
                {"min_clearance", r.min_clearance},
                {"max_deviation", r.max_deviation},
                {"min_containment", r.min_containment}};
}

json montecarlo_json(const contdef::MonteCarloReport& r) {
    json per_run = json::array();
    for (const contdef::RunRecord& rec : r.per_run) {
        per_run.push_back({{"seed", rec.seed},
                           {"ok", rec.ok},
                           {"min_clearance", rec.min_clearance},
                           {"max_deviation", rec.max_deviation},
                           {"min_containment", rec.min_containment},
                           {"combined_margin", rec.combined_margin}});
    }
    return json{{"runs", r.runs},
                {"passed", r.passed},
                {"pass_rate", r.pass_rate},
                {"worst_run", r.worst_run},
                {"worst_seed", r.worst_seed},
                {"worst_margin", r.worst_margin},
                {"per_run", per_run}};
}

contdef::LeaderTrajectory plan_from_config(const contdef::ScenarioConfig& cfg, double duration) {
    contdef::BoundaryConditions bc = cfg.boundary_conditions();
    if (duration > 0.0) bc.tf = bc.t0 + duration;
    if (!(bc.tf > bc.t0)) {
        throw contdef::ValidationError(
            "no travel time: set planner.T in the scenario or pass --duration");
    }
    return contdef::plan_leader_trajectories(bc, cfg.area_constraint(), cfg.planner.grid_size);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Continuum-deformation coordination: plan, simulate, verify"};
    app.require_subcommand(1);

    std::string config_path, trace_path, out, report_path;
    double duration = 0.0;
    std::uint64_t seed = 0;
    bool seed_set = false, bypass = false;
    int runs = 20;
    std::uint64_t base_seed = 0;
    bool base_seed_set = false;
    double t_min = 0.0, t_max = 0.0, epsilon = 0.0, delta = 0.0;

    CLI::App* plan = app.add_subcommand("plan", "Plan leader trajectories for a scenario");
    plan->add_option("--config", config_path, "Scenario file")->required();
    plan->add_option("--out", out, "Trajectory CSV path");
    plan->add_option("--duration", duration, "Override travel time T (s)");

    CLI::App* simulate = app.add_subcommand("simulate", "Run one closed-loop simulation");
    simulate->add_option("--config", config_path, "Scenario file")->required();
    simulate->add_option("--seed", seed, "Run seed (default: scenario seed)")
        ->each([&](const std::string&) { seed_set = true; });
    simulate->add_option("--out", out, "Trace CSV path");
    simulate->add_option("--duration", duration, "Override travel time T (s)");
    simulate->add_flag("--bypass-estimator", bypass,
                       "Feed true states to the follower controllers");

    CLI::App* verify = app.add_subcommand("verify", "Check the safety conditions on a trace");
    verify->add_option("--trace", trace_path, "Trace CSV path")->required();
    verify->add_option("--config", config_path, "Scenario file providing thresholds");
    verify->add_option("--epsilon", epsilon, "Override agent ball radius (m)");
    verify->add_option("--delta", delta, "Override tracking deviation bound (m)");
    verify->add_option("--report", report_path, "Write the report JSON here");

    CLI::App* montecarlo = app.add_subcommand("montecarlo", "Monte Carlo safety campaign");
    montecarlo->add_option("--config", config_path, "Scenario file")->required();
    montecarlo->add_option("--runs", runs, "Number of runs")->check(CLI::PositiveNumber);
    montecarlo->add_option("--base-seed", base_seed, "Base seed (default: scenario seed)")
        ->each([&](const std::string&) { base_seed_set = true; });
    montecarlo->add_option("--report", report_path, "Write the campaign JSON here");

    CLI::App* mintime = app.add_subcommand("mintime", "Bisect the minimum safe travel time");
    mintime->add_option("--config", config_path, "Scenario file")->required();
    mintime->add_option("--t-min", t_min, "Override lower bracket (s)");
    mintime->add_option("--t-max", t_max, "Override upper bracket (s)");
    mintime->add_option("--runs", runs, "Monte Carlo runs per probed T")
        ->check(CLI::PositiveNumber);
    mintime->add_option("--base-seed", base_seed, "Base seed (default: scenario seed)")
        ->each([&](const std::string&) { base_seed_set = true; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Collapse CLI11's assorted parse-error codes onto the documented
        // error exit code; --help still exits 0.
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (plan->parsed()) {
            const contdef::ScenarioConfig cfg = contdef::load_scenario(config_path);
            const contdef::LeaderTrajectory traj = plan_from_config(cfg, duration);
            std::cout << "planned " << traj.grid_size() << " points over " << traj.duration()
                      << " s, cost " << traj.cost << ", max area violation "
                      << traj.max_area_violation << "\n";
            if (!out.empty()) export_trajectory(traj, out_path(out));
            return 0;
        }
        if (simulate->parsed()) {
            contdef::ScenarioConfig cfg = contdef::load_scenario(config_path);
            if (bypass) cfg.bypass_estimator = true;
            const contdef::LeaderTrajectory traj = plan_from_config(cfg, duration);
            const std::uint64_t s = seed_set ? seed : cfg.seed;
            const contdef::SimulationTrace trace = contdef::run_simulation(cfg, traj, s);
            std::cout << "simulated " << trace.steps() << " steps (seed " << s << ")\n";
            if (!out.empty()) {
                contdef::export_trace(trace, out_path(out));
                std::cout << "trace written to " << out_path(out) << "\n";
            }
            return 0;
        }
        if (verify->parsed()) {
            contdef::SafetyThresholds th;
            if (!config_path.empty()) {
                th = contdef::load_scenario(config_path).thresholds;
            }
            if (epsilon > 0.0) th.epsilon = epsilon;
            if (delta > 0.0) th.delta = delta;
            const contdef::SimulationTrace trace = contdef::import_trace(trace_path);
            const contdef::SafetyReport report = contdef::verify_run(trace, th);
            std::cout << report_json(report).dump(2) << "\n";
            if (!report_path.empty()) contdef::export_report(report, out_path(report_path));
            return report.all_ok() ? 0 : 1;
        }
        if (montecarlo->parsed()) {
            const contdef::ScenarioConfig cfg = contdef::load_scenario(config_path);
            const std::uint64_t bs = base_seed_set ? base_seed : cfg.seed;
            const contdef::MonteCarloReport report = contdef::monte_carlo_verify(cfg, runs, bs);
            std::cout << montecarlo_json(report).dump(2) << "\n";
            if (!report_path.empty()) {
                write_text(out_path(report_path), montecarlo_json(report).dump(2) + "\n");
            }
            return report.all_ok() ? 0 : 1;
        }
        if (mintime->parsed()) {
            contdef::ScenarioConfig cfg = contdef::load_scenario(config_path);
            if (t_min > 0.0) cfg.planner.T_min = t_min;
            if (t_max > 0.0) cfg.planner.T_max = t_max;
            const std::uint64_t bs = base_seed_set ? base_seed : cfg.seed;
            try {
                const contdef::TimeSearchResult res =
                    contdef::search_min_travel_time(cfg, runs, bs);
                json probes = json::array();
                for (const auto& [T, ok] : res.probes) probes.push_back({{"T", T}, {"ok", ok}});
                std::cout << json{{"T_star", res.T_star},
                                  {"monotone", res.monotone},
                                  {"probes", probes}}
                                 .dump(2)
                          << "\n";
                return 0;
            } catch (const contdef::UpperBoundInfeasible& e) {
                std::cerr << "error: " << e.what() << "\n";
                return 1;
            }
        }
    } catch (const contdef::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
