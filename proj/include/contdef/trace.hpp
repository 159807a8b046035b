#pragma once

#include <limits>
#include <string>
#include <vector>

#include "contdef/dynamics.hpp"

namespace contdef {

// One sampling instant of a run. Only the documented CSV columns survive an
// export/import round trip; controls and estimator diagnostics are in-memory
// extras for tests and reports.
struct TraceRow {
    double t = 0.0;
    std::vector<AgentState> agents;     // true states, ids 1..N
    std::vector<Point2> desired;        // desired positions, ids 1..N
    std::vector<AgentState> estimates;  // follower estimates, ids 4..N
    std::vector<double> cov_trace;      // tr(P_ii), ids 4..N
    std::vector<Vec2> controls;         // applied accelerations, ids 1..N
    int measurements = 0;
    int skipped_measurements = 0;
    double sigma_max = std::numeric_limits<double>::quiet_NaN();
    double sigma_max_update_form = std::numeric_limits<double>::quiet_NaN();
};

struct SimulationTrace {
    int num_agents = 0;
    double dt = 0.0;
    std::vector<TraceRow> rows;

    int steps() const { return static_cast<int>(rows.size()); }
    // Checks the uniform time grid and per-row dimensions.
    void validate() const;
};

// CSV layout: t, per agent [x, y, vx, vy, des_x, des_y], per follower
// [est_x, est_y, est_vx, est_vy, cov_tr]; floats printed with 17 significant
// digits so the round trip is exact.
void export_trace(const SimulationTrace& trace, const std::string& path);
SimulationTrace import_trace(const std::string& path);

}  // namespace contdef
