#include "contdef/safety.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "contdef/errors.hpp"
#include "contdef/graphs.hpp"

namespace contdef {

void SafetyThresholds::validate() const {
    if (!(epsilon > 0.0) || !(delta > 0.0)) {
        throw ValidationError("safety thresholds require epsilon > 0 and delta > 0");
    }
}

CollisionCheck check_collision(const std::vector<Point2>& positions, double eps) {
    if (positions.size() < 2) {
        throw ValidationError("collision check needs at least two agents");
    }
    CollisionCheck out;
    const int n = static_cast<int>(positions.size());
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double d = (positions[i] - positions[j]).norm();
            if (d < out.min_clearance) {
                out.min_clearance = d;
                out.pair = {i + 1, j + 1};
            }
        }
    }
    out.ok = out.min_clearance > 2.0 * eps;
    return out;
}

BoundednessCheck check_boundedness(const std::vector<Point2>& actual,
                                   const std::vector<Point2>& desired, double delta) {
    if (actual.size() != desired.size()) {
        throw ValidationError("boundedness check requires aligned actual/desired lists");
    }
    BoundednessCheck out;
    for (size_t i = 0; i < actual.size(); ++i) {
        const double d = (actual[i] - desired[i]).norm();
        if (d > out.max_deviation || out.offender < 0) {
            out.max_deviation = d;
            out.offender = static_cast<int>(i) + 1;
        }
    }
    out.ok = out.max_deviation <= delta;
    return out;
}

Eigen::Vector3d containment_omega(const Point2& m, const Point2& j, const Point2& h,
                                  const Point2& t) {
    const BarycentricWeights w = barycentric_coords(t, Triangle(m, j, h));
    return {w.alpha[0], w.alpha[1], w.alpha[2]};
}

double SafetyReport::combined_margin() const {
    return std::min({min_clearance - 2.0 * thresholds.epsilon,
                     thresholds.delta - max_deviation, min_containment});
}

SafetyReport verify_run(const SimulationTrace& trace, const SafetyThresholds& th) {
    th.validate();
    trace.validate();
    SafetyReport report;
    report.thresholds = th;

    const int n = trace.num_agents;
    for (int k = 0; k < trace.steps(); ++k) {
        const TraceRow& row = trace.rows[static_cast<size_t>(k)];
        std::vector<Point2> pos(static_cast<size_t>(n));
        std::vector<Point2> des(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            pos[static_cast<size_t>(i)] = row.agents[static_cast<size_t>(i)].pos;
            des[static_cast<size_t>(i)] = row.desired[static_cast<size_t>(i)];
        }

        const CollisionCheck cc = check_collision(pos, th.epsilon);
        report.min_clearance = std::min(report.min_clearance, cc.min_clearance);
        if (!cc.ok && report.collision.ok) {
            report.collision.ok = false;
            report.collision.first_violation_step = k;
            report.collision.agents = cc.pair;
            report.collision.margin = cc.min_clearance - 2.0 * th.epsilon;
        }

        const BoundednessCheck bc = check_boundedness(pos, des, th.delta);
        report.max_deviation = std::max(report.max_deviation, bc.max_deviation);
        if (!bc.ok && report.boundedness.ok) {
            report.boundedness.ok = false;
            report.boundedness.first_violation_step = k;
            report.boundedness.agents = {bc.offender, -1};
            report.boundedness.margin = th.delta - bc.max_deviation;
        }

        double step_min_omega = std::numeric_limits<double>::infinity();
        int step_offender = -1;
        for (int i = 0; i < n; ++i) {
            double value;
            try {
                value = containment_omega(pos[0], pos[1], pos[2], pos[static_cast<size_t>(i)])
                            .minCoeff();
            } catch (const DegenerateTriangle&) {
                value = -std::numeric_limits<double>::infinity();
            }
            if (value < step_min_omega) {
                step_min_omega = value;
                step_offender = i + 1;
            }
        }
        report.min_containment = std::min(report.min_containment, step_min_omega);
        if (step_min_omega < 0.0 && report.containment.ok) {
            report.containment.ok = false;
            report.containment.first_violation_step = k;
            report.containment.agents = {step_offender, -1};
            report.containment.margin = step_min_omega;
        }
    }
    return report;
}

void export_report(const SafetyReport& report, const std::string& path) {
    auto verdict = [](const ConditionVerdict& v) {
        nlohmann::json j;
        j["ok"] = v.ok;
        if (!v.ok) {
            j["first_violation_step"] = v.first_violation_step;
            j["agents"] = v.agents;
            j["margin"] = v.margin;
        }
        return j;
    };
    nlohmann::json j;
    j["all_ok"] = report.all_ok();
    j["collision"] = verdict(report.collision);
    j["boundedness"] = verdict(report.boundedness);
    j["containment"] = verdict(report.containment);
    j["min_clearance"] = report.min_clearance;
    j["max_deviation"] = report.max_deviation;
    j["min_containment"] = report.min_containment;
    j["thresholds"] = {{"epsilon", report.thresholds.epsilon},
                       {"delta", report.thresholds.delta}};
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open report file for writing: " + path);
    }
    out << j.dump(2) << "\n";
    if (!out) {
        throw IoError("failed while writing report file: " + path);
    }
}

}  // namespace contdef
