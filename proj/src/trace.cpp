#include "contdef/trace.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "contdef/errors.hpp"
#include "contdef/graphs.hpp"

namespace contdef {
namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    return out;
}

}  // namespace

void SimulationTrace::validate() const {
    if (num_agents < 4) {
        throw ValidationError("trace requires at least 4 agents");
    }
    const size_t n = static_cast<size_t>(num_agents);
    const size_t f = static_cast<size_t>(num_followers(num_agents));
    for (size_t k = 0; k < rows.size(); ++k) {
        const TraceRow& row = rows[k];
        if (row.agents.size() != n || row.desired.size() != n || row.estimates.size() != f ||
            row.cov_trace.size() != f) {
            throw ValidationError("trace row " + std::to_string(k) + " has inconsistent sizes");
        }
        if (k > 0) {
            const double step = row.t - rows[k - 1].t;
            if (std::abs(step - dt) > 1e-9 * std::max(1.0, std::abs(row.t))) {
                throw ValidationError("trace time grid is not uniform at row " +
                                      std::to_string(k));
            }
        }
    }
}

void export_trace(const SimulationTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open trace file for writing: " + path);
    }
    out << "t";
    for (int i = 1; i <= trace.num_agents; ++i) {
        const std::string p = ",a" + std::to_string(i) + "_";
        out << p << "x" << p << "y" << p << "vx" << p << "vy" << p << "des_x" << p << "des_y";
    }
    for (int i = kNumLeaders + 1; i <= trace.num_agents; ++i) {
        const std::string p = ",a" + std::to_string(i) + "_";
        out << p << "est_x" << p << "est_y" << p << "est_vx" << p << "est_vy" << p << "cov_tr";
    }
    out << "\n";
    for (const TraceRow& row : trace.rows) {
        out << fmt(row.t);
        for (int i = 0; i < trace.num_agents; ++i) {
            const AgentState& s = row.agents[i];
            out << ',' << fmt(s.pos.x()) << ',' << fmt(s.pos.y()) << ',' << fmt(s.vel.x())
                << ',' << fmt(s.vel.y()) << ',' << fmt(row.desired[i].x()) << ','
                << fmt(row.desired[i].y());
        }
        for (int f = 0; f < num_followers(trace.num_agents); ++f) {
            const AgentState& s = row.estimates[f];
            out << ',' << fmt(s.pos.x()) << ',' << fmt(s.pos.y()) << ',' << fmt(s.vel.x())
                << ',' << fmt(s.vel.y()) << ',' << fmt(row.cov_trace[f]);
        }
        out << "\n";
    }
    if (!out) {
        throw IoError("failed while writing trace file: " + path);
    }
}

SimulationTrace import_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open trace file for reading: " + path);
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError("trace file is empty (missing header): " + path);
    }
    const size_t cols = split_csv(line).size();
    // 1 + 6N + 5(N - 3) columns -> N = (cols + 14) / 11.
    if (cols < 1 || (cols + 14) % 11 != 0) {
        throw ParseError("trace header has unexpected column count " + std::to_string(cols));
    }
    SimulationTrace trace;
    trace.num_agents = static_cast<int>((cols + 14) / 11);
    if (trace.num_agents < 4) {
        throw ParseError("trace header implies fewer than 4 agents");
    }

    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_csv(line);
        if (fields.size() != cols) {
            throw ParseError("trace line " + std::to_string(line_no) + " has " +
                             std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(cols));
        }
        std::vector<double> v(cols);
        for (size_t i = 0; i < cols; ++i) {
            try {
                size_t used = 0;
                v[i] = std::stod(fields[i], &used);
                if (used != fields[i].size()) throw std::invalid_argument(fields[i]);
            } catch (const std::exception&) {
                throw ParseError("trace line " + std::to_string(line_no) + " field " +
                                 std::to_string(i + 1) + " is not a number: " + fields[i]);
            }
        }
        TraceRow row;
        row.t = v[0];
        size_t c = 1;
        for (int i = 0; i < trace.num_agents; ++i) {
            AgentState s;
            s.pos = {v[c], v[c + 1]};
            s.vel = {v[c + 2], v[c + 3]};
            row.agents.push_back(s);
            row.desired.emplace_back(v[c + 4], v[c + 5]);
            c += 6;
        }
        for (int f = 0; f < num_followers(trace.num_agents); ++f) {
            AgentState s;
            s.pos = {v[c], v[c + 1]};
            s.vel = {v[c + 2], v[c + 3]};
            row.estimates.push_back(s);
            row.cov_trace.push_back(v[c + 4]);
            c += 5;
        }
        trace.rows.push_back(std::move(row));
    }
    if (trace.rows.size() > 1) {
        trace.dt = trace.rows[1].t - trace.rows[0].t;
    }
    trace.validate();
    return trace;
}

}  // namespace contdef
