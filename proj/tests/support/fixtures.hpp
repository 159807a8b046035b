#pragma once

#include <array>

#include "contdef/scenario.hpp"

// Scenario fixtures shared by the unit and acceptance suites. The ten-agent
// formation mirrors scenarios/ten_agent.json; keep the two in sync.
namespace fixtures {

// Nested-triangle formation: 4..6 hang off the leaders, 7..10 off inner
// triples, every follower strictly inside its in-neighbor triangle. The
// localization graph chains every follower back to an anchored leader
// (4->1, 5->2, 6->3, 7->4, 8->9->5, 10->{6,7,8}).
inline contdef::ScenarioConfig ten_agent() {
    using contdef::Point2;
    contdef::ScenarioConfig cfg;
    cfg.name = "ten-agent";
    cfg.num_agents = 10;
    const std::array<Point2, 10> pos = {
        Point2(0.0, 12.0), Point2(-10.39, -6.0), Point2(10.39, -6.0), Point2(0.0, 6.5),
        Point2(-5.2, -3.0), Point2(5.2, -3.0),   Point2(0.0, 2.5),    Point2(-3.2, -2.0),
        Point2(3.2, -2.0),  Point2(0.0, -0.5)};
    for (const Point2& p : pos) cfg.initial_state.push_back({p, contdef::Vec2::Zero()});
    cfg.graph.num_agents = 10;
    cfg.graph.in_neighbors[4] = {1, 2, 3};
    cfg.graph.in_neighbors[5] = {1, 2, 3};
    cfg.graph.in_neighbors[6] = {1, 2, 3};
    cfg.graph.in_neighbors[7] = {4, 5, 6};
    cfg.graph.in_neighbors[8] = {5, 7, 6};
    cfg.graph.in_neighbors[9] = {6, 7, 5};
    cfg.graph.in_neighbors[10] = {7, 8, 9};
    cfg.graph.localization_edges = {{4, 1, 1}, {5, 2, 1},  {6, 3, 1},
                                    {7, 4, 1}, {8, 9, 1},  {9, 5, 1},
                                    {10, 6, 1}, {10, 7, 1}, {10, 8, 1}};
    cfg.graph.self_measuring = {1};
    for (int l = 0; l < 3; ++l) {
        cfg.planner.final_leaders[static_cast<size_t>(l)] =
            pos[static_cast<size_t>(l)] + Point2(60.0, 45.0);
    }
    cfg.planner.T = 32.0;
    cfg.planner.T_min = 10.0;
    cfg.planner.T_max = 40.0;
    cfg.seed = 20260815;
    cfg.settle_time = 12.0;
    return cfg;
}

// Smallest scenario: one follower at barycentric (1/2, 1/4, 1/4) of the
// leader triangle, ranging on two leaders.
inline contdef::ScenarioConfig quad() {
    using contdef::Point2;
    contdef::ScenarioConfig cfg;
    cfg.name = "quad";
    cfg.num_agents = 4;
    cfg.initial_state = {{Point2(0.0, 0.0), contdef::Vec2::Zero()},
                         {Point2(8.0, 0.0), contdef::Vec2::Zero()},
                         {Point2(0.0, 8.0), contdef::Vec2::Zero()},
                         {Point2(2.0, 2.0), contdef::Vec2::Zero()}};
    cfg.graph.num_agents = 4;
    cfg.graph.in_neighbors[4] = {1, 2, 3};
    cfg.graph.localization_edges = {{4, 1, 1}, {4, 2, 1}};
    cfg.graph.self_measuring = {1};
    cfg.planner.final_leaders = {Point2(5.0, 3.0), Point2(13.0, 3.0), Point2(5.0, 11.0)};
    cfg.planner.T = 8.0;
    cfg.planner.T_min = 2.0;
    cfg.planner.T_max = 12.0;
    cfg.seed = 97;
    cfg.settle_time = 4.0;
    return cfg;
}

// Zero noise, followers fed back on true states; the estimator still runs
// but nothing depends on it.
inline contdef::ScenarioConfig noise_free(contdef::ScenarioConfig cfg) {
    cfg.noise.process_accel_std = 0.0;
    cfg.noise.range_std = 0.0;
    cfg.noise.bearing_std = 0.0;
    cfg.bypass_estimator = true;
    return cfg;
}

}  // namespace fixtures
