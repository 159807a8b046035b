#pragma once

#include <Eigen/Core>

#include <array>
#include <vector>

#include "contdef/dynamics.hpp"
#include "contdef/rng.hpp"

namespace contdef {

// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

// One relative range/bearing observation (observer -> target).
struct RelativeMeasurement {
    int observer = 0;
    int target = 0;
    double range = 0.0;    // m
    double bearing = 0.0;  // rad, wrapped to (-pi, pi]
};

// Noisy range/bearing between true states. Throws CoincidentAgents when the
// agents are closer than 1e-9 m.
RelativeMeasurement simulate_measurement(int observer_id, int target_id,
                                         const AgentState& true_observer,
                                         const AgentState& true_target, double range_std,
                                         double bearing_std, NormalStream& range_noise,
                                         NormalStream& bearing_noise);

// Noise-free measurement model c(observer, target) = [range; bearing].
Eigen::Vector2d measurement_model(const AgentState& observer, const AgentState& target);

// Gradient of the measurement w.r.t. the observer state [x, y, vx, vy]; the
// gradient w.r.t. the target state is its negation, giving the stacked
// [C, -C] structure of the linearized output map.
Eigen::Matrix<double, 2, 4> measurement_jacobian(const AgentState& obs_est,
                                                 const AgentState& tgt_est);

// Per-step observer-stability record. sigma_max is the largest singular
// value of A_OBS = A_CL - K_CL C_CL assembled over the step's measurement
// set; sigma_max_update_form tracks (I - K_CL C_CL) A_CL, the one-step map
// of the a-posteriori estimation error, which is the quantity that can
// actually contract below 1 for a position-only output map.
struct ObserverDiagnostics {
    double sigma_max = 0.0;
    double sigma_max_update_form = 0.0;
    double r2 = 0.0;
    bool stable = false;  // sigma_max < r2
    int num_measurements = 0;
    int num_skipped = 0;  // singular-innovation skips
};

ObserverDiagnostics observer_stability(const Eigen::MatrixXd& A_cl, const Eigen::MatrixXd& K_cl,
                                       const Eigen::MatrixXd& C_cl, double r2);

struct EstimatorConfig {
    int num_agents = 0;
    double process_accel_std = 0.5;  // per-axis std of the acceleration noise, m/s^2
    double range_std = 0.03;         // m
    double bearing_std = 0.01;       // rad
    Eigen::Vector4d initial_variance = Eigen::Vector4d::Constant(1e-4);
    double r2 = 0.999;
    double innovation_cond_max = 1e12;
    // Skip a measurement when its innovation covariance has an eigenvalue at
    // or below this floor. In zero-noise configurations S collapses to the
    // covariance roundoff scale (~|psd_floor|) and inverting it would only
    // amplify junk; 1e-7 sits two decades above that and three below any
    // realistic sensor variance.
    double innovation_floor = 1e-7;
    double psd_floor = -1e-9;  // abort below this minimum eigenvalue
};

// Joint EKF over all followers (agents 4..N). Leaders are exact anchors and
// never enter the state. The joint covariance keeps every cross block
// P_ij, which is what makes fusing relative measurements consistent.
//
// State ordering is agent-major: follower f (0-based) occupies rows
// [4f, 4f+4) with per-agent state [x, y, vx, vy].
class CooperativeEstimator {
public:
    explicit CooperativeEstimator(const EstimatorConfig& cfg);

    int num_followers() const { return F_; }

    // Resets estimates to the given follower states (ordered 4..N) and the
    // covariance to diag(initial_variance) per agent with zero cross blocks.
    void initialize(const std::vector<AgentState>& follower_states);

    // Time update with the commanded inputs (ordered 4..N):
    //   xhat_i <- A xhat_i + B u_i
    //   P_ij   <- A P_ij A^T  (+ B Q_i B^T on the diagonal blocks)
    void propagate(const std::vector<Vec2>& follower_inputs, double dt);

    // Measurement update. Measurements are applied sequentially in
    // (observer, target) lexicographic order; leader endpoints use the exact
    // `leader_states`. Measurements with an ill-conditioned innovation
    // covariance are skipped and counted in the returned diagnostics.
    ObserverDiagnostics update(std::vector<RelativeMeasurement> measurements,
                               const std::array<AgentState, 3>& leader_states);

    AgentState estimate(int agent_id) const;
    Eigen::Matrix4d covariance_block(int agent_i, int agent_j) const;

    const Eigen::VectorXd& state() const { return xhat_; }
    const Eigen::MatrixXd& covariance() const { return P_; }
    const EstimatorConfig& config() const { return cfg_; }

    // Collective plant matrix blkdiag(A_i) at the last propagation step.
    Eigen::MatrixXd A_cl() const;

private:
    int block_of(int agent_id) const;  // row offset of a follower's state
    void repair_psd(const char* stage);

    EstimatorConfig cfg_;
    int F_;
    double last_dt_;
    Eigen::VectorXd xhat_;
    Eigen::MatrixXd P_;
    std::vector<Eigen::Matrix2d> q_proc_;  // per-follower acceleration noise covariance
    Eigen::Matrix2d r_meas_;
};

}  // namespace contdef
