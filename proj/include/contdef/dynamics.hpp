#pragma once

#include <Eigen/Core>

#include <array>

#include "contdef/graphs.hpp"

namespace contdef {

struct AgentState {
    Point2 pos = Point2::Zero();
    Vec2 vel = Vec2::Zero();

    Eigen::Vector4d as_vector() const {
        return Eigen::Vector4d(pos.x(), pos.y(), vel.x(), vel.y());
    }
    static AgentState from_vector(const Eigen::Vector4d& x) {
        return {Point2(x(0), x(1)), Vec2(x(2), x(3))};
    }
};

// PD gains of the tracking/consensus control law. `validate` rejects gain
// pairs whose discrete single-agent closed loop is not Schur stable at the
// given sample time.
struct ControlGains {
    double g1 = 6.0;  // velocity gain, 1/s
    double g2 = 9.0;  // position gain, 1/s^2

    void validate(double dt) const;
};

// Spectral radius of the 2x2 per-axis closed-loop map of a single perfectly
// informed agent.
double closed_loop_spectral_radius(const ControlGains& gains, double dt);

// Discrete double-integrator step: r+ = r + dt*v, v+ = v + dt*(u + noise).
AgentState step_agent(const AgentState& s, const Vec2& u, const Vec2& noise, double dt);

Vec2 leader_control(const AgentState& s, const Point2& desired_pos, const Vec2& desired_vel,
                    const ControlGains& gains);

// Consensus feedback on the estimated states of the ordered in-neighbor
// triple; `weights` is the follower's weight-matrix row restricted to them.
Vec2 follower_control(const AgentState& self_est, const std::array<AgentState, 3>& neighbor_ests,
                      const std::array<double, 3>& weights, const ControlGains& gains);

// Stacked follower dynamics with the leader states as exogenous input.
//
// SYS ordering is axis-major: [x_4..x_N | vx_4..vx_N | y_4..y_N | vy_4..vy_N];
// the input is U = [x_L(3) | vx_L(3) | y_L(3) | vy_L(3)] (R^12). CL ordering
// is agent-major with per-agent state [x, y, vx, vy]; O is the 0/1
// permutation with X_CL = O * X_SYS.
class CollectiveDynamics {
public:
    CollectiveDynamics(const WeightMatrix& w, const ControlGains& gains, double dt);

    int num_followers() const { return F_; }
    double dt() const { return dt_; }

    const Eigen::MatrixXd& A_sys() const { return A_sys_; }
    const Eigen::MatrixXd& B_sys() const { return B_sys_; }
    const Eigen::MatrixXd& K() const { return K_; }
    const Eigen::MatrixXd& O() const { return O_; }

    Eigen::MatrixXd A_cl() const { return O_ * A_sys_ * O_.transpose(); }
    Eigen::MatrixXd B_cl() const { return O_ * B_sys_; }

    // One step of the collective map; `noise` holds per-follower acceleration
    // noise ordered [eta_x_4..eta_x_N | eta_y_4..eta_y_N].
    Eigen::VectorXd step(const Eigen::VectorXd& x_sys, const Eigen::VectorXd& u_sys,
                         const Eigen::VectorXd& xhat_sys, const Eigen::VectorXd& noise) const;

    // Spectral radius of A_sys + K, the loop matrix when the feedback runs on
    // exact estimates. Must be < 1 for a usable configuration.
    double closed_loop_spectral_radius() const;

private:
    int F_;
    double dt_;
    Eigen::MatrixXd A_sys_, B_sys_, K_, O_;
};

CollectiveDynamics assemble_collective(const WeightMatrix& w, const ControlGains& gains,
                                       double dt);

}  // namespace contdef
