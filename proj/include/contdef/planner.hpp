#pragma once

#include <Eigen/Core>

#include <array>
#include <functional>
#include <utility>
#include <vector>

#include "contdef/geometry.hpp"

namespace contdef {

struct BoundaryConditions {
    std::array<Point2, 3> initial_position{};
    std::array<Point2, 3> final_position{};
    std::array<Vec2, 3> initial_velocity{Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
    std::array<Vec2, 3> final_velocity{Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
    double t0 = 0.0;
    double tf = 0.0;

    // Throws ValidationError / DegenerateTriangle when tf <= t0 or either
    // leader triangle is degenerate.
    void validate() const;
    Triangle initial_triangle() const;
    Triangle final_triangle() const;
};

struct AreaConstraint {
    double a0 = 0.0;       // m^2, positive
    double area_tol = 0.0; // m^2

    static AreaConstraint from_triangle(const Triangle& tri, double rel_tol = 1e-3);
    void validate() const;
};

struct PlannerOptions {
    double initial_penalty = 1.0;
    double penalty_ramp = 10.0;
    double max_penalty = 1e12;
    int max_outer = 60;
    int max_inner = 8;
    double cost_change_tol = 1e-8;  // relative, on the outer-loop cost
    bool enforce_area = true;
};

// Minimum-effort leader trajectories on a uniform grid. Between grid nodes
// position/velocity follow cubic Hermite interpolation and acceleration is
// piecewise linear.
struct LeaderTrajectory {
    double t0 = 0.0;
    double tf = 0.0;
    Eigen::VectorXd times;
    std::array<Eigen::MatrixX2d, 3> position;
    std::array<Eigen::MatrixX2d, 3> velocity;
    std::array<Eigen::MatrixX2d, 3> accel;
    double cost = 0.0;                // J = integral of sum ||u_i||^2 dt
    double max_area_violation = 0.0;  // max over grid of |area - a0|
    int outer_iterations = 0;

    int grid_size() const { return static_cast<int>(times.size()); }
    double duration() const { return tf - t0; }
};

struct LeaderSample {
    std::array<Point2, 3> position;
    std::array<Vec2, 3> velocity;
    std::array<Vec2, 3> accel;
    Triangle triangle() const;
};

// Direct transcription of the minimum-control-effort program: decision
// variables are the per-leader accelerations at the grid nodes, the cost is
// trapezoidal quadrature of sum ||u_i||^2, boundary conditions enter as
// linear equalities, and the fixed-area equality at interior grid points is
// enforced by an augmented-Lagrangian loop around an equality-constrained
// quadratic solve.
LeaderTrajectory plan_leader_trajectories(const BoundaryConditions& bc, const AreaConstraint& ac,
                                          int grid_size, const PlannerOptions& opts = {});

LeaderSample evaluate_trajectory(const LeaderTrajectory& traj, double t);

struct TimeSearchResult {
    double T_star = 0.0;
    LeaderTrajectory trajectory;
    std::vector<std::pair<double, bool>> probes;  // (T, feasible) in evaluation order
    bool monotone = true;
};

// Bisection for the smallest grid-feasible travel time. The grid is
// {T_lo + k*T_res} with the bracket's upper end appended; the verifier is
// called once per probed T with the planned trajectory for that duration.
// bc.tf is ignored (each candidate T plans over [t0, t0 + T]).
TimeSearchResult min_travel_time(const BoundaryConditions& bc, const AreaConstraint& ac,
                                 int grid_size, std::pair<double, double> T_bounds, double T_res,
                                 const std::function<bool(const LeaderTrajectory&)>& verifier,
                                 const PlannerOptions& opts = {});

}  // namespace contdef
