#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "contdef/localization.hpp"
#include "contdef/planner.hpp"
#include "contdef/safety.hpp"
#include "contdef/scenario.hpp"
#include "contdef/trace.hpp"

namespace contdef {

// Optional per-step probe, called after each estimator update with the
// post-step true states (ids 1..N); used by consistency tests that need the
// full joint covariance rather than the exported trace columns.
using StepObserver = std::function<void(int step, const CooperativeEstimator& estimator,
                                        const std::vector<AgentState>& truth)>;

// Closed-loop run over the trajectory's time span plus cfg.settle_time.
// Per step: leaders track the desired trajectory with PD feedback on their
// true states; followers run consensus feedback on estimates (or true states
// when cfg.bypass_estimator); the plant steps with process noise; the
// estimator propagates with the commanded inputs and fuses the localization
// edges that fire. Deterministic for fixed (cfg, traj, seed).
SimulationTrace run_simulation(const ScenarioConfig& cfg, const LeaderTrajectory& traj,
                               std::uint64_t seed, const StepObserver& observer = {});

struct RunRecord {
    std::uint64_t seed = 0;
    bool ok = false;
    double min_clearance = 0.0;
    double max_deviation = 0.0;
    double min_containment = 0.0;
    double combined_margin = 0.0;
};

struct MonteCarloReport {
    int runs = 0;
    int passed = 0;
    double pass_rate = 0.0;
    std::vector<RunRecord> per_run;
    int worst_run = -1;  // index of the smallest combined margin, for replay
    std::uint64_t worst_seed = 0;
    double worst_margin = 0.0;

    bool all_ok() const { return passed == runs; }
};

// Plans once for the scenario's fixed T, then verifies n_runs independent
// runs seeded by derive_run_seed(base_seed, index).
MonteCarloReport monte_carlo_verify(const ScenarioConfig& cfg, int n_runs,
                                    std::uint64_t base_seed);
MonteCarloReport monte_carlo_verify(const ScenarioConfig& cfg, const LeaderTrajectory& traj,
                                    int n_runs, std::uint64_t base_seed);

// Bisection over the scenario's [T_min, T_max] bracket; a candidate T is
// feasible when all n_runs Monte Carlo runs at that T pass every safety
// condition. Runs that diverge numerically count as failures.
TimeSearchResult search_min_travel_time(const ScenarioConfig& cfg, int n_runs,
                                        std::uint64_t base_seed);

}  // namespace contdef
