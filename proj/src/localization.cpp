#include "contdef/localization.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "contdef/errors.hpp"
#include "contdef/graphs.hpp"

namespace contdef {
namespace {

constexpr double kCoincidenceTol = 1e-9;  // m

std::string agent_pair(int observer, int target) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "(%d -> %d)", observer, target);
    return buf;
}

Eigen::Matrix4d agent_transition(double dt) {
    Eigen::Matrix4d A = Eigen::Matrix4d::Identity();
    A(0, 2) = dt;
    A(1, 3) = dt;
    return A;
}

Eigen::Matrix<double, 4, 2> agent_input_map(double dt) {
    Eigen::Matrix<double, 4, 2> B = Eigen::Matrix<double, 4, 2>::Zero();
    B(2, 0) = dt;
    B(3, 1) = dt;
    return B;
}

}  // namespace

double wrap_angle(double a) {
    a = std::fmod(a + M_PI, 2.0 * M_PI);
    if (a <= 0.0) a += 2.0 * M_PI;
    return a - M_PI;
}

RelativeMeasurement simulate_measurement(int observer_id, int target_id,
                                         const AgentState& true_observer,
                                         const AgentState& true_target, double range_std,
                                         double bearing_std, NormalStream& range_noise,
                                         NormalStream& bearing_noise) {
    const Vec2 delta = true_target.pos - true_observer.pos;
    const double d = delta.norm();
    if (d < kCoincidenceTol) {
        throw CoincidentAgents("cannot measure coincident agents " +
                               agent_pair(observer_id, target_id));
    }
    RelativeMeasurement m;
    m.observer = observer_id;
    m.target = target_id;
    m.range = std::max(d + range_noise.normal(range_std), 1e-12);
    m.bearing = wrap_angle(std::atan2(delta.y(), delta.x()) + bearing_noise.normal(bearing_std));
    return m;
}

Eigen::Vector2d measurement_model(const AgentState& observer, const AgentState& target) {
    const Vec2 delta = target.pos - observer.pos;
    return {delta.norm(), std::atan2(delta.y(), delta.x())};
}

Eigen::Matrix<double, 2, 4> measurement_jacobian(const AgentState& obs_est,
                                                 const AgentState& tgt_est) {
    const Vec2 delta = tgt_est.pos - obs_est.pos;
    const double d2 = delta.squaredNorm();
    const double d = std::sqrt(d2);
    if (d < kCoincidenceTol) {
        throw CoincidentAgents("measurement Jacobian undefined at coincident estimates");
    }
    Eigen::Matrix<double, 2, 4> C = Eigen::Matrix<double, 2, 4>::Zero();
    C(0, 0) = -delta.x() / d;
    C(0, 1) = -delta.y() / d;
    C(1, 0) = delta.y() / d2;
    C(1, 1) = -delta.x() / d2;
    return C;
}

ObserverDiagnostics observer_stability(const Eigen::MatrixXd& A_cl, const Eigen::MatrixXd& K_cl,
                                       const Eigen::MatrixXd& C_cl, double r2) {
    ObserverDiagnostics diag;
    diag.r2 = r2;
    const Eigen::MatrixXd KC = (C_cl.rows() > 0)
                                   ? Eigen::MatrixXd(K_cl * C_cl)
                                   : Eigen::MatrixXd::Zero(A_cl.rows(), A_cl.cols());
    const Eigen::MatrixXd A_obs = A_cl - KC;
    diag.sigma_max = Eigen::JacobiSVD<Eigen::MatrixXd>(A_obs).singularValues()(0);
    const Eigen::MatrixXd update_form =
        (Eigen::MatrixXd::Identity(A_cl.rows(), A_cl.cols()) - KC) * A_cl;
    diag.sigma_max_update_form =
        Eigen::JacobiSVD<Eigen::MatrixXd>(update_form).singularValues()(0);
    diag.stable = diag.sigma_max < r2;
    return diag;
}

CooperativeEstimator::CooperativeEstimator(const EstimatorConfig& cfg)
    : cfg_(cfg), F_(contdef::num_followers(cfg.num_agents)), last_dt_(0.0) {
    if (cfg.num_agents < 4) {
        throw ValidationError("estimator requires at least one follower (N >= 4)");
    }
    if (cfg.process_accel_std < 0.0 || cfg.range_std < 0.0 || cfg.bearing_std < 0.0) {
        throw ValidationError("noise standard deviations must be non-negative");
    }
    if ((cfg.initial_variance.array() < 0.0).any()) {
        throw ValidationError("initial variance must be non-negative");
    }
    if (!(cfg.r2 > 0.0 && cfg.r2 < 1.0)) {
        throw ValidationError("observer stability radius r2 must lie in (0, 1)");
    }
    xhat_ = Eigen::VectorXd::Zero(4 * F_);
    P_ = Eigen::MatrixXd::Zero(4 * F_, 4 * F_);
    const double q = cfg.process_accel_std * cfg.process_accel_std;
    q_proc_.assign(F_, Eigen::Matrix2d::Identity() * q);
    r_meas_ = Eigen::Vector2d(cfg.range_std * cfg.range_std, cfg.bearing_std * cfg.bearing_std)
                  .asDiagonal();
    for (int f = 0; f < F_; ++f) {
        P_.block<4, 4>(4 * f, 4 * f) = cfg.initial_variance.asDiagonal();
    }
}

int CooperativeEstimator::block_of(int agent_id) const {
    if (agent_id < kNumLeaders + 1 || agent_id > cfg_.num_agents) {
        throw OutOfRange("agent " + std::to_string(agent_id) + " is not an estimated follower");
    }
    return 4 * (agent_id - kNumLeaders - 1);
}

void CooperativeEstimator::initialize(const std::vector<AgentState>& follower_states) {
    if (static_cast<int>(follower_states.size()) != F_) {
        throw ValidationError("initialize expects one state per follower");
    }
    for (int f = 0; f < F_; ++f) {
        xhat_.segment<4>(4 * f) = follower_states[f].as_vector();
    }
    P_.setZero();
    for (int f = 0; f < F_; ++f) {
        P_.block<4, 4>(4 * f, 4 * f) = cfg_.initial_variance.asDiagonal();
    }
}

void CooperativeEstimator::propagate(const std::vector<Vec2>& follower_inputs, double dt) {
    if (static_cast<int>(follower_inputs.size()) != F_) {
        throw ValidationError("propagate expects one input per follower");
    }
    if (!(dt > 0.0)) {
        throw ValidationError("propagate requires dt > 0");
    }
    last_dt_ = dt;
    const Eigen::Matrix4d A = agent_transition(dt);
    const Eigen::Matrix<double, 4, 2> B = agent_input_map(dt);

    for (int f = 0; f < F_; ++f) {
        xhat_.segment<4>(4 * f) = A * xhat_.segment<4>(4 * f) + B * follower_inputs[f];
    }
    // P_ij <- A_i P_ij A_j^T for every block, including the cross terms.
    for (int i = 0; i < F_; ++i) {
        for (int j = 0; j < F_; ++j) {
            P_.block<4, 4>(4 * i, 4 * j) = A * P_.block<4, 4>(4 * i, 4 * j) * A.transpose();
        }
    }
    for (int f = 0; f < F_; ++f) {
        P_.block<4, 4>(4 * f, 4 * f) += B * q_proc_[f] * B.transpose();
    }
    repair_psd("propagate");
}

ObserverDiagnostics CooperativeEstimator::update(std::vector<RelativeMeasurement> measurements,
                                                 const std::array<AgentState, 3>& leader_states) {
    std::sort(measurements.begin(), measurements.end(),
              [](const RelativeMeasurement& a, const RelativeMeasurement& b) {
                  return a.observer != b.observer ? a.observer < b.observer : a.target < b.target;
              });

    const int n = 4 * F_;
    auto state_of = [&](int id) -> AgentState {
        if (is_leader(id)) return leader_states[static_cast<size_t>(id - 1)];
        return AgentState::from_vector(xhat_.segment<4>(block_of(id)));
    };

    // Assemble the stacked output map at the pre-update linearization point;
    // stability is a property of the step as a whole, not of the sequential
    // sweep below.
    ObserverDiagnostics diag;
    diag.r2 = cfg_.r2;
    std::vector<Eigen::Matrix<double, 1, Eigen::Dynamic>> rows;
    for (const auto& m : measurements) {
        if (is_leader(m.observer) && is_leader(m.target)) continue;
        ++diag.num_measurements;
        Eigen::Matrix<double, 2, 4> C;
        try {
            C = measurement_jacobian(state_of(m.observer), state_of(m.target));
        } catch (const CoincidentAgents&) {
            continue;
        }
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(2, n);
        if (!is_leader(m.observer)) H.block<2, 4>(0, block_of(m.observer)) = C;
        if (!is_leader(m.target)) H.block<2, 4>(0, block_of(m.target)) = -C;
        rows.push_back(H.row(0));
        rows.push_back(H.row(1));
    }
    Eigen::MatrixXd C_cl(static_cast<int>(rows.size()), n);
    for (size_t r = 0; r < rows.size(); ++r) C_cl.row(static_cast<int>(r)) = rows[r];
    Eigen::MatrixXd K_cl(n, C_cl.rows());
    if (C_cl.rows() > 0) {
        Eigen::MatrixXd S_cl = C_cl * P_ * C_cl.transpose();
        for (int r = 0; r < S_cl.rows(); r += 2) {
            S_cl.block<2, 2>(r, r) += r_meas_;
        }
        K_cl = S_cl.ldlt().solve(C_cl * P_).transpose();
    }
    const ObserverDiagnostics stab = observer_stability(A_cl(), K_cl, C_cl, cfg_.r2);
    diag.sigma_max = stab.sigma_max;
    diag.sigma_max_update_form = stab.sigma_max_update_form;
    diag.stable = stab.stable;

    // Sequential EKF sweep, relinearizing after each applied measurement.
    for (const auto& m : measurements) {
        if (is_leader(m.observer) && is_leader(m.target)) continue;
        const AgentState obs = state_of(m.observer);
        const AgentState tgt = state_of(m.target);
        if ((tgt.pos - obs.pos).norm() < kCoincidenceTol) {
            ++diag.num_skipped;
            continue;
        }
        const Eigen::Matrix<double, 2, 4> C = measurement_jacobian(obs, tgt);
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(2, n);
        if (!is_leader(m.observer)) H.block<2, 4>(0, block_of(m.observer)) = C;
        if (!is_leader(m.target)) H.block<2, 4>(0, block_of(m.target)) = -C;

        const Eigen::Matrix2d S = H * P_ * H.transpose() + r_meas_;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es;
        es.computeDirect(S);
        const double lo = es.eigenvalues()(0);
        const double hi = es.eigenvalues()(1);
        if (!(lo > cfg_.innovation_floor) || hi / lo > cfg_.innovation_cond_max) {
            ++diag.num_skipped;
            continue;
        }

        const Eigen::Vector2d predicted = measurement_model(obs, tgt);
        Eigen::Vector2d innovation(m.range - predicted(0),
                                   wrap_angle(m.bearing - predicted(1)));
        const Eigen::MatrixXd K = P_ * H.transpose() * S.inverse();
        xhat_ += K * innovation;
        P_ -= K * S * K.transpose();
        P_ = 0.5 * (P_ + P_.transpose()).eval();
    }
    repair_psd("update");
    return diag;
}

AgentState CooperativeEstimator::estimate(int agent_id) const {
    return AgentState::from_vector(xhat_.segment<4>(block_of(agent_id)));
}

Eigen::Matrix4d CooperativeEstimator::covariance_block(int agent_i, int agent_j) const {
    return P_.block<4, 4>(block_of(agent_i), block_of(agent_j));
}

Eigen::MatrixXd CooperativeEstimator::A_cl() const {
    const double dt = last_dt_ > 0.0 ? last_dt_ : 0.0;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(4 * F_, 4 * F_);
    const Eigen::Matrix4d Ai = agent_transition(dt);
    for (int f = 0; f < F_; ++f) {
        A.block<4, 4>(4 * f, 4 * f) = Ai;
    }
    return A;
}

void CooperativeEstimator::repair_psd(const char* stage) {
    P_ = 0.5 * (P_ + P_.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P_);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < cfg_.psd_floor) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "covariance lost positive semidefiniteness after %s (min eigenvalue %.3e)",
                      stage, min_eig);
        throw CovarianceDivergence(buf);
    }
    if (min_eig < 0.0) {
        Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
        P_ = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose();
    }
}

}  // namespace contdef
