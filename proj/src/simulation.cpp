#include "contdef/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "contdef/errors.hpp"

namespace contdef {
namespace {

constexpr double kBlowupNorm = 1e9;

std::string stream_name(const char* kind, int a, int b = -1) {
    std::string name = std::string(kind) + "-" + std::to_string(a);
    if (b >= 0) name += "-" + std::to_string(b);
    return name;
}

void check_finite_state(const AgentState& s, int agent_id) {
    if (!s.as_vector().allFinite() || s.as_vector().norm() > kBlowupNorm) {
        throw NumericalBlowup("agent " + std::to_string(agent_id) +
                              " state exceeded the blow-up guard");
    }
}

}  // namespace

SimulationTrace run_simulation(const ScenarioConfig& cfg, const LeaderTrajectory& traj,
                               std::uint64_t seed, const StepObserver& observer) {
    cfg.validate();
    if (!(traj.tf > traj.t0) || traj.grid_size() < 2) {
        throw ValidationError("simulation requires a planned trajectory with tf > t0");
    }

    const int n = cfg.num_agents;
    const int F = num_followers(n);
    const WeightMatrix W = build_weight_matrix(cfg.graph, cfg.reference_positions());
    const Triangle ref_leaders = cfg.initial_leader_triangle();

    // Global barycentric coefficients of every agent w.r.t. the reference
    // leader triangle; desired positions follow the leaders through them.
    std::vector<BarycentricWeights> alpha;
    alpha.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        alpha.push_back(barycentric_coords(cfg.initial_state[static_cast<size_t>(i)].pos,
                                           ref_leaders));
    }

    // One named stream per noise source, split from the run seed, so traces
    // are reproducible and insensitive to unrelated config edits.
    std::vector<NormalStream> proc_x, proc_y;
    proc_x.reserve(static_cast<size_t>(n));
    proc_y.reserve(static_cast<size_t>(n));
    for (int i = 1; i <= n; ++i) {
        proc_x.emplace_back(derive_stream_seed(seed, stream_name("proc-x", i)));
        proc_y.emplace_back(derive_stream_seed(seed, stream_name("proc-y", i)));
    }
    std::vector<NormalStream> meas_range, meas_bearing;
    meas_range.reserve(cfg.graph.localization_edges.size());
    meas_bearing.reserve(cfg.graph.localization_edges.size());
    for (const LocalizationEdge& e : cfg.graph.localization_edges) {
        meas_range.emplace_back(
            derive_stream_seed(seed, stream_name("meas-range", e.observer, e.target)));
        meas_bearing.emplace_back(
            derive_stream_seed(seed, stream_name("meas-bearing", e.observer, e.target)));
    }

    EstimatorConfig est_cfg;
    est_cfg.num_agents = n;
    est_cfg.process_accel_std = cfg.noise.process_accel_std;
    est_cfg.range_std = cfg.noise.range_std;
    est_cfg.bearing_std = cfg.noise.bearing_std;
    est_cfg.initial_variance = cfg.initial_variance;
    est_cfg.r2 = cfg.r2;
    CooperativeEstimator estimator(est_cfg);

    std::vector<AgentState> truth = cfg.initial_state;
    {
        // Initial estimates drawn about the truth with the configured P_ii(0)
        // so the filter starts statistically consistent.
        const Eigen::Vector4d init_std = cfg.initial_variance.cwiseSqrt();
        std::vector<AgentState> init_est;
        init_est.reserve(static_cast<size_t>(F));
        for (int id = kNumLeaders + 1; id <= n; ++id) {
            NormalStream stream(derive_stream_seed(seed, stream_name("init", id)));
            Eigen::Vector4d x = truth[static_cast<size_t>(id - 1)].as_vector();
            for (int c = 0; c < 4; ++c) x(c) += stream.normal(init_std(c));
            init_est.push_back(AgentState::from_vector(x));
        }
        estimator.initialize(init_est);
    }

    auto desired_at = [&](double t) {
        const LeaderSample s = evaluate_trajectory(traj, std::min(t, traj.tf));
        std::vector<Point2> pos(static_cast<size_t>(n));
        std::vector<Vec2> vel(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            pos[static_cast<size_t>(i)] = desired_position(alpha[static_cast<size_t>(i)],
                                                           s.position);
            vel[static_cast<size_t>(i)] =
                alpha[static_cast<size_t>(i)].alpha[0] * s.velocity[0] +
                alpha[static_cast<size_t>(i)].alpha[1] * s.velocity[1] +
                alpha[static_cast<size_t>(i)].alpha[2] * s.velocity[2];
        }
        return std::make_pair(pos, vel);
    };

    SimulationTrace trace;
    trace.num_agents = n;
    trace.dt = cfg.dt;
    const double total = (traj.tf - traj.t0) + cfg.settle_time;
    const int K = std::max(1, static_cast<int>(std::ceil(total / cfg.dt - 1e-9)));

    auto append_row = [&](double t, const std::vector<Vec2>& controls, int fired, int skipped,
                          double sigma_max, double sigma_upd) {
        TraceRow row;
        row.t = t;
        row.agents = truth;
        row.desired = desired_at(t).first;
        for (int id = kNumLeaders + 1; id <= n; ++id) {
            row.estimates.push_back(estimator.estimate(id));
            row.cov_trace.push_back(estimator.covariance_block(id, id).trace());
        }
        row.controls = controls;
        row.measurements = fired;
        row.skipped_measurements = skipped;
        row.sigma_max = sigma_max;
        row.sigma_max_update_form = sigma_upd;
        trace.rows.push_back(std::move(row));
    };

    append_row(traj.t0, std::vector<Vec2>(static_cast<size_t>(n), Vec2::Zero()), 0, 0,
               std::numeric_limits<double>::quiet_NaN(),
               std::numeric_limits<double>::quiet_NaN());

    for (int k = 0; k < K; ++k) {
        const double t = traj.t0 + k * cfg.dt;
        const double t_next = traj.t0 + (k + 1) * cfg.dt;
        const auto [des_pos, des_vel] = desired_at(t);

        std::vector<Vec2> controls(static_cast<size_t>(n), Vec2::Zero());
        for (int id = 1; id <= kNumLeaders; ++id) {
            controls[static_cast<size_t>(id - 1)] =
                leader_control(truth[static_cast<size_t>(id - 1)],
                               des_pos[static_cast<size_t>(id - 1)],
                               des_vel[static_cast<size_t>(id - 1)], cfg.gains);
        }
        auto feedback_state = [&](int id) -> AgentState {
            if (is_leader(id) || cfg.bypass_estimator) return truth[static_cast<size_t>(id - 1)];
            return estimator.estimate(id);
        };
        for (int id = kNumLeaders + 1; id <= n; ++id) {
            const std::array<int, 3>& nbs = cfg.graph.neighbors_of(id);
            const std::array<AgentState, 3> nb_states{feedback_state(nbs[0]),
                                                      feedback_state(nbs[1]),
                                                      feedback_state(nbs[2])};
            controls[static_cast<size_t>(id - 1)] = follower_control(
                feedback_state(id), nb_states, W.row_weights(cfg.graph, id), cfg.gains);
        }

        for (int id = 1; id <= n; ++id) {
            const Vec2 eta(proc_x[static_cast<size_t>(id - 1)].normal(cfg.noise.process_accel_std),
                           proc_y[static_cast<size_t>(id - 1)].normal(cfg.noise.process_accel_std));
            truth[static_cast<size_t>(id - 1)] =
                step_agent(truth[static_cast<size_t>(id - 1)],
                           controls[static_cast<size_t>(id - 1)], eta, cfg.dt);
            check_finite_state(truth[static_cast<size_t>(id - 1)], id);
        }

        std::vector<Vec2> follower_inputs(controls.begin() + kNumLeaders, controls.end());
        estimator.propagate(follower_inputs, cfg.dt);

        std::vector<RelativeMeasurement> fired;
        int unfired = 0;
        for (size_t e = 0; e < cfg.graph.localization_edges.size(); ++e) {
            const LocalizationEdge& edge = cfg.graph.localization_edges[e];
            if ((k + 1) % edge.period != 0) continue;
            try {
                fired.push_back(simulate_measurement(
                    edge.observer, edge.target, truth[static_cast<size_t>(edge.observer - 1)],
                    truth[static_cast<size_t>(edge.target - 1)], cfg.noise.range_std,
                    cfg.noise.bearing_std, meas_range[e], meas_bearing[e]));
            } catch (const CoincidentAgents&) {
                ++unfired;  // sensor has no return at zero range; drop this edge
            }
        }
        const std::array<AgentState, 3> anchors{truth[0], truth[1], truth[2]};
        const ObserverDiagnostics diag = estimator.update(fired, anchors);
        for (int id = kNumLeaders + 1; id <= n; ++id) {
            check_finite_state(estimator.estimate(id), id);
        }

        append_row(t_next, controls, static_cast<int>(fired.size()),
                   diag.num_skipped + unfired, diag.sigma_max, diag.sigma_max_update_form);
        if (observer) observer(k + 1, estimator, truth);
    }
    trace.validate();
    return trace;
}

MonteCarloReport monte_carlo_verify(const ScenarioConfig& cfg, const LeaderTrajectory& traj,
                                    int n_runs, std::uint64_t base_seed) {
    if (n_runs < 1) {
        throw ValidationError("monte carlo verification needs n_runs >= 1");
    }
    MonteCarloReport report;
    report.runs = n_runs;
    for (int i = 0; i < n_runs; ++i) {
        RunRecord rec;
        rec.seed = derive_run_seed(base_seed, i);
        try {
            const SimulationTrace trace = run_simulation(cfg, traj, rec.seed);
            const SafetyReport sr = verify_run(trace, cfg.thresholds);
            rec.ok = sr.all_ok();
            rec.min_clearance = sr.min_clearance;
            rec.max_deviation = sr.max_deviation;
            rec.min_containment = sr.min_containment;
            rec.combined_margin = sr.combined_margin();
        } catch (const CovarianceDivergence&) {
            rec.ok = false;
            rec.combined_margin = -std::numeric_limits<double>::infinity();
        } catch (const NumericalBlowup&) {
            rec.ok = false;
            rec.combined_margin = -std::numeric_limits<double>::infinity();
        }
        if (rec.ok) ++report.passed;
        if (report.worst_run < 0 || rec.combined_margin < report.worst_margin) {
            report.worst_run = i;
            report.worst_seed = rec.seed;
            report.worst_margin = rec.combined_margin;
        }
        report.per_run.push_back(rec);
    }
    report.pass_rate = static_cast<double>(report.passed) / n_runs;
    return report;
}

MonteCarloReport monte_carlo_verify(const ScenarioConfig& cfg, int n_runs,
                                    std::uint64_t base_seed) {
    cfg.validate();
    if (!(cfg.planner.T > 0.0)) {
        throw ValidationError("monte carlo verification needs a fixed planner T");
    }
    const LeaderTrajectory traj = plan_leader_trajectories(
        cfg.boundary_conditions(), cfg.area_constraint(), cfg.planner.grid_size);
    return monte_carlo_verify(cfg, traj, n_runs, base_seed);
}

TimeSearchResult search_min_travel_time(const ScenarioConfig& cfg, int n_runs,
                                        std::uint64_t base_seed) {
    cfg.validate();
    if (!(cfg.planner.T_max > cfg.planner.T_min) || !(cfg.planner.T_min > 0.0)) {
        throw BracketInvalid("time search needs planner T_min/T_max bounds");
    }
    auto verifier = [&](const LeaderTrajectory& traj) {
        for (int i = 0; i < n_runs; ++i) {
            const std::uint64_t run_seed = derive_run_seed(base_seed, i);
            try {
                const SimulationTrace trace = run_simulation(cfg, traj, run_seed);
                if (!verify_run(trace, cfg.thresholds).all_ok()) return false;
            } catch (const CovarianceDivergence&) {
                return false;
            } catch (const NumericalBlowup&) {
                return false;
            }
        }
        return true;
    };
    return min_travel_time(cfg.boundary_conditions(), cfg.area_constraint(),
                           cfg.planner.grid_size, {cfg.planner.T_min, cfg.planner.T_max},
                           cfg.planner.T_res, verifier);
}

}  // namespace contdef
