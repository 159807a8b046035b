#include "contdef/dynamics.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace contdef {

double closed_loop_spectral_radius(const ControlGains& gains, double dt) {
    // Per-axis closed loop [[1, dt], [-g2 dt, 1 - g1 dt]].
    Eigen::Matrix2d m;
    m << 1.0, dt, -gains.g2 * dt, 1.0 - gains.g1 * dt;
    return m.eigenvalues().cwiseAbs().maxCoeff();
}

void ControlGains::validate(double dt) const {
    if (!(g1 > 0.0) || !(g2 > 0.0)) throw ValidationError("gains must be positive");
    const double rho = closed_loop_spectral_radius(*this, dt);
    if (rho >= 1.0)
        throw ValidationError("gains g1=" + std::to_string(g1) + ", g2=" + std::to_string(g2) +
                              " give an unstable closed loop at dt=" + std::to_string(dt) +
                              " (spectral radius " + std::to_string(rho) + ")");
}

AgentState step_agent(const AgentState& s, const Vec2& u, const Vec2& noise, double dt) {
    AgentState next;
    next.pos = s.pos + dt * s.vel;
    next.vel = s.vel + dt * (u + noise);
    return next;
}

Vec2 leader_control(const AgentState& s, const Point2& desired_pos, const Vec2& desired_vel,
                    const ControlGains& gains) {
    return gains.g1 * (desired_vel - s.vel) + gains.g2 * (desired_pos - s.pos);
}

Vec2 follower_control(const AgentState& self_est, const std::array<AgentState, 3>& neighbor_ests,
                      const std::array<double, 3>& weights, const ControlGains& gains) {
    Vec2 u = Vec2::Zero();
    for (int k = 0; k < 3; ++k) {
        u += gains.g1 * weights[k] * (neighbor_ests[k].vel - self_est.vel);
        u += gains.g2 * weights[k] * (neighbor_ests[k].pos - self_est.pos);
    }
    return u;
}

CollectiveDynamics::CollectiveDynamics(const WeightMatrix& w, const ControlGains& gains,
                                       double dt)
    : F_(w.rows()), dt_(dt) {
    gains.validate(dt);
    const int F = F_;
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(F, F);

    // Plant, per axis: [p; v] -> [[I, dt I], [0, I]].
    A_sys_ = Eigen::MatrixXd::Zero(4 * F, 4 * F);
    for (int axis = 0; axis < 2; ++axis) {
        const int o = 2 * F * axis;
        A_sys_.block(o, o, F, F) = I;
        A_sys_.block(o, o + F, F, F) = dt * I;
        A_sys_.block(o + F, o + F, F, F) = I;
    }

    // Leader input channel: velocities pick up dt*(g2 B p_L + g1 B v_L).
    B_sys_ = Eigen::MatrixXd::Zero(4 * F, 12);
    for (int axis = 0; axis < 2; ++axis) {
        const int ro = 2 * F * axis + F;
        const int co = 6 * axis;
        B_sys_.block(ro, co, F, 3) = gains.g2 * dt * w.B;
        B_sys_.block(ro, co + 3, F, 3) = gains.g1 * dt * w.B;
    }

    // Estimate feedback channel: velocities pick up dt*(g2 A p_hat + g1 A v_hat).
    K_ = Eigen::MatrixXd::Zero(4 * F, 4 * F);
    for (int axis = 0; axis < 2; ++axis) {
        const int o = 2 * F * axis;
        K_.block(o + F, o, F, F) = gains.g2 * dt * w.A;
        K_.block(o + F, o + F, F, F) = gains.g1 * dt * w.A;
    }

    // X_CL = O X_SYS, agent-major [x, y, vx, vy] per follower.
    O_ = Eigen::MatrixXd::Zero(4 * F, 4 * F);
    for (int f = 0; f < F; ++f) {
        O_(4 * f + 0, f) = 1.0;
        O_(4 * f + 1, 2 * F + f) = 1.0;
        O_(4 * f + 2, F + f) = 1.0;
        O_(4 * f + 3, 3 * F + f) = 1.0;
    }
}

Eigen::VectorXd CollectiveDynamics::step(const Eigen::VectorXd& x_sys,
                                         const Eigen::VectorXd& u_sys,
                                         const Eigen::VectorXd& xhat_sys,
                                         const Eigen::VectorXd& noise) const {
    const int F = F_;
    Eigen::VectorXd next = A_sys_ * x_sys + B_sys_ * u_sys + K_ * xhat_sys;
    next.segment(F, F) += dt_ * noise.head(F);
    next.segment(3 * F, F) += dt_ * noise.tail(F);
    return next;
}

double CollectiveDynamics::closed_loop_spectral_radius() const {
    const Eigen::MatrixXd loop = A_sys_ + K_;
    return loop.eigenvalues().cwiseAbs().maxCoeff();
}

CollectiveDynamics assemble_collective(const WeightMatrix& w, const ControlGains& gains,
                                       double dt) {
    return CollectiveDynamics(w, gains, dt);
}

}  // namespace contdef
