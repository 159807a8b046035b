#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "contdef/dynamics.hpp"
#include "contdef/graphs.hpp"
#include "contdef/localization.hpp"
#include "contdef/planner.hpp"
#include "contdef/safety.hpp"

namespace contdef {

// Planner section of a scenario: the target leader triangle plus either a
// fixed travel time T or bisection bounds [T_min, T_max].
struct PlannerBlock {
    std::array<Point2, 3> final_leaders{};
    double a0 = 0.0;  // 0 -> derived from the initial leader triangle
    double area_tol_rel = 1e-3;
    int grid_size = 201;
    double T = 0.0;  // fixed duration when > 0
    double T_min = 0.0;
    double T_max = 0.0;
    double T_res = 0.1;
};

struct NoiseBlock {
    double process_accel_std = 0.5;  // m/s^2, acceleration-level white noise
    double range_std = 0.03;         // m
    double bearing_std = 0.01;       // rad
};

struct ScenarioConfig {
    std::string name;
    int schema_version = 1;
    int num_agents = 0;
    std::vector<AgentState> initial_state;  // ids 1..N
    GraphSpec graph;
    ControlGains gains;
    double dt = 0.1;
    NoiseBlock noise;
    SafetyThresholds thresholds;
    PlannerBlock planner;
    Eigen::Vector4d initial_variance = Eigen::Vector4d::Constant(1e-4);
    double r2 = 0.999;
    std::uint64_t seed = 1;
    double settle_time = 0.0;       // extra time holding the final desired pose
    bool bypass_estimator = false;  // control from true states; estimator passive

    std::vector<Point2> reference_positions() const;
    Triangle initial_leader_triangle() const;
    BoundaryConditions boundary_conditions() const;  // rest-to-rest, tf from planner.T
    AreaConstraint area_constraint() const;

    // Rechecks every load-time invariant (assumption set, gains, thresholds,
    // noise signs, planner block coherence). Throws ValidationError or
    // AssumptionViolation.
    void validate() const;
};

// Parses and validates a scenario file, applying the documented defaults
// (dt = 0.1 s, g1 = 6, g2 = 9, epsilon = delta = 0.5). Throws ParseError for
// malformed files and ValidationError / AssumptionViolation for invalid ones.
ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig parse_scenario(const std::string& text, const std::string& origin = "<string>");

// Effective configuration with all defaults materialized; `load_scenario`
// composed with this is idempotent.
std::string scenario_to_json(const ScenarioConfig& cfg);

}  // namespace contdef
