#pragma once

#include <array>
#include <limits>
#include <string>
#include <vector>

#include "contdef/geometry.hpp"
#include "contdef/trace.hpp"

namespace contdef {

struct SafetyThresholds {
    double epsilon = 0.5;  // radius of the ball enclosing one agent, m
    double delta = 0.5;    // allowed deviation from the desired trajectory, m

    void validate() const;
};

struct CollisionCheck {
    bool ok = true;
    double min_clearance = std::numeric_limits<double>::infinity();
    std::array<int, 2> pair{-1, -1};  // 1-based agent ids of the closest pair
};

// Collision is avoided iff every pairwise distance exceeds 2*eps (strict).
CollisionCheck check_collision(const std::vector<Point2>& positions, double eps);

struct BoundednessCheck {
    bool ok = true;
    double max_deviation = 0.0;
    int offender = -1;  // 1-based agent id of the largest deviation
};

// Deviation from the desired trajectory stays within delta (non-strict).
BoundednessCheck check_boundedness(const std::vector<Point2>& actual,
                                   const std::vector<Point2>& desired, double delta);

// Containment coordinates of point t w.r.t. the triangle (m, j, h); all
// components nonnegative iff t lies inside.
Eigen::Vector3d containment_omega(const Point2& m, const Point2& j, const Point2& h,
                                  const Point2& t);

struct ConditionVerdict {
    bool ok = true;
    int first_violation_step = -1;
    std::array<int, 2> agents{-1, -1};
    double margin = 0.0;  // margin at the first violation (negative)
};

struct SafetyReport {
    ConditionVerdict collision;
    ConditionVerdict boundedness;
    ConditionVerdict containment;
    // Worst-case margins over the whole run.
    double min_clearance = std::numeric_limits<double>::infinity();
    double max_deviation = 0.0;
    double min_containment = std::numeric_limits<double>::infinity();
    SafetyThresholds thresholds;

    bool all_ok() const { return collision.ok && boundedness.ok && containment.ok; }
    // Smallest margin across the three conditions (clearance slack, deviation
    // slack, containment coordinate); drives worst-run selection.
    double combined_margin() const;
};

// Pure evaluation of the three safety conditions at every step of the trace.
// Containment is measured against the actual (simulated true) leader
// positions; a degenerate leader triangle counts as a containment violation.
SafetyReport verify_run(const SimulationTrace& trace, const SafetyThresholds& th);

void export_report(const SafetyReport& report, const std::string& path);

}  // namespace contdef
