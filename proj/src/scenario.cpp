#include "contdef/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "contdef/errors.hpp"

namespace contdef {
namespace {

using json = nlohmann::ordered_json;

Point2 parse_point(const json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 2) {
        throw ParseError(what + " must be a [x, y] pair");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

ScenarioConfig from_json(const json& j, const std::string& origin) {
    ScenarioConfig cfg;
    cfg.schema_version = j.value("schema_version", 1);
    cfg.name = j.value("name", std::string{});
    if (!j.contains("num_agents")) {
        throw ParseError(origin + ": missing required field num_agents");
    }
    cfg.num_agents = j.at("num_agents").get<int>();
    cfg.dt = j.value("dt", 0.1);
    cfg.seed = j.value("seed", std::uint64_t{1});
    cfg.settle_time = j.value("settle_time", 0.0);
    cfg.bypass_estimator = j.value("bypass_estimator", false);

    if (j.contains("gains")) {
        cfg.gains.g1 = j.at("gains").value("g1", cfg.gains.g1);
        cfg.gains.g2 = j.at("gains").value("g2", cfg.gains.g2);
    }
    if (j.contains("noise")) {
        const json& n = j.at("noise");
        cfg.noise.process_accel_std = n.value("process_accel_std", cfg.noise.process_accel_std);
        cfg.noise.range_std = n.value("range_std", cfg.noise.range_std);
        cfg.noise.bearing_std = n.value("bearing_std", cfg.noise.bearing_std);
    }
    if (j.contains("safety")) {
        cfg.thresholds.epsilon = j.at("safety").value("epsilon", cfg.thresholds.epsilon);
        cfg.thresholds.delta = j.at("safety").value("delta", cfg.thresholds.delta);
    }
    if (j.contains("estimator")) {
        const json& e = j.at("estimator");
        if (e.contains("initial_variance")) {
            const json& iv = e.at("initial_variance");
            if (iv.is_number()) {
                cfg.initial_variance.setConstant(iv.get<double>());
            } else if (iv.is_array() && iv.size() == 4) {
                for (int i = 0; i < 4; ++i) cfg.initial_variance(i) = iv[i].get<double>();
            } else {
                throw ParseError(origin + ": estimator.initial_variance must be a number or a "
                                          "4-element array");
            }
        }
        cfg.r2 = e.value("r2", cfg.r2);
    }

    if (!j.contains("agents")) {
        throw ParseError(origin + ": missing required field agents");
    }
    cfg.initial_state.assign(static_cast<size_t>(std::max(cfg.num_agents, 0)), AgentState{});
    std::set<int> seen;
    for (const json& a : j.at("agents")) {
        const int id = a.at("id").get<int>();
        if (id < 1 || id > cfg.num_agents) {
            throw ParseError(origin + ": agent id " + std::to_string(id) + " out of range");
        }
        if (!seen.insert(id).second) {
            throw ParseError(origin + ": duplicate agent id " + std::to_string(id));
        }
        AgentState s;
        s.pos = parse_point(a.at("position"), "agents[].position");
        if (a.contains("velocity")) s.vel = parse_point(a.at("velocity"), "agents[].velocity");
        cfg.initial_state[static_cast<size_t>(id - 1)] = s;
    }
    if (static_cast<int>(seen.size()) != cfg.num_agents) {
        throw ParseError(origin + ": agents must list every id 1.." +
                         std::to_string(cfg.num_agents) + " exactly once");
    }

    cfg.graph.num_agents = cfg.num_agents;
    if (!j.contains("coordination")) {
        throw ParseError(origin + ": missing required field coordination");
    }
    for (const auto& [key, value] : j.at("coordination").items()) {
        int follower = 0;
        try {
            follower = std::stoi(key);
        } catch (const std::exception&) {
            throw ParseError(origin + ": coordination key is not an agent id: " + key);
        }
        if (!value.is_array() || value.size() != 3) {
            throw ParseError(origin + ": coordination triple of agent " + key +
                             " must have exactly 3 in-neighbors");
        }
        cfg.graph.in_neighbors[follower] = {value[0].get<int>(), value[1].get<int>(),
                                            value[2].get<int>()};
    }
    if (j.contains("localization")) {
        const json& loc = j.at("localization");
        for (const json& e : loc.value("edges", json::array())) {
            LocalizationEdge edge;
            if (e.is_array() && e.size() == 2) {
                edge.observer = e[0].get<int>();
                edge.target = e[1].get<int>();
            } else if (e.is_object()) {
                edge.observer = e.at("observer").get<int>();
                edge.target = e.at("target").get<int>();
                edge.period = e.value("period", 1);
            } else {
                throw ParseError(origin + ": localization edge must be [observer, target] or an "
                                          "object with observer/target/period");
            }
            cfg.graph.localization_edges.push_back(edge);
        }
        for (const json& s : loc.value("self_measuring", json::array())) {
            cfg.graph.self_measuring.push_back(s.get<int>());
        }
    }

    if (!j.contains("planner") || !j.at("planner").contains("final_leaders")) {
        throw ParseError(origin + ": missing required field planner.final_leaders");
    }
    const json& p = j.at("planner");
    const json& fl = p.at("final_leaders");
    if (!fl.is_array() || fl.size() != 3) {
        throw ParseError(origin + ": planner.final_leaders must list 3 positions");
    }
    for (int l = 0; l < 3; ++l) {
        cfg.planner.final_leaders[static_cast<size_t>(l)] =
            parse_point(fl[static_cast<size_t>(l)], "planner.final_leaders[]");
    }
    cfg.planner.a0 = p.value("a0", 0.0);
    cfg.planner.area_tol_rel = p.value("area_tol_rel", cfg.planner.area_tol_rel);
    cfg.planner.grid_size = p.value("grid_size", cfg.planner.grid_size);
    cfg.planner.T = p.value("T", 0.0);
    cfg.planner.T_min = p.value("T_min", 0.0);
    cfg.planner.T_max = p.value("T_max", 0.0);
    cfg.planner.T_res = p.value("T_res", cfg.planner.T_res);
    return cfg;
}

}  // namespace

std::vector<Point2> ScenarioConfig::reference_positions() const {
    std::vector<Point2> out;
    out.reserve(initial_state.size());
    for (const AgentState& s : initial_state) out.push_back(s.pos);
    return out;
}

Triangle ScenarioConfig::initial_leader_triangle() const {
    return Triangle(initial_state[0].pos, initial_state[1].pos, initial_state[2].pos);
}

BoundaryConditions ScenarioConfig::boundary_conditions() const {
    BoundaryConditions bc;
    for (int l = 0; l < 3; ++l) {
        bc.initial_position[static_cast<size_t>(l)] = initial_state[static_cast<size_t>(l)].pos;
        bc.initial_velocity[static_cast<size_t>(l)] = initial_state[static_cast<size_t>(l)].vel;
        bc.final_position[static_cast<size_t>(l)] = planner.final_leaders[static_cast<size_t>(l)];
        bc.final_velocity[static_cast<size_t>(l)] = Vec2::Zero();
    }
    bc.t0 = 0.0;
    bc.tf = planner.T > 0.0 ? planner.T : planner.T_max;
    return bc;
}

AreaConstraint ScenarioConfig::area_constraint() const {
    AreaConstraint ac;
    ac.a0 = planner.a0 > 0.0 ? planner.a0 : std::abs(initial_leader_triangle().area());
    ac.area_tol = planner.area_tol_rel * ac.a0;
    ac.validate();
    return ac;
}

void ScenarioConfig::validate() const {
    if (schema_version != 1) {
        throw ValidationError("unsupported schema_version " + std::to_string(schema_version));
    }
    if (num_agents < 4) {
        throw ValidationError("scenario requires at least 4 agents");
    }
    if (!(dt > 0.0)) {
        throw ValidationError("scenario requires dt > 0");
    }
    if (noise.process_accel_std < 0.0 || noise.range_std < 0.0 || noise.bearing_std < 0.0) {
        throw ValidationError("noise standard deviations must be non-negative");
    }
    if (settle_time < 0.0) {
        throw ValidationError("settle_time must be non-negative");
    }
    if ((initial_variance.array() < 0.0).any()) {
        throw ValidationError("estimator.initial_variance must be non-negative");
    }
    if (!(r2 > 0.0 && r2 < 1.0)) {
        throw ValidationError("estimator.r2 must lie in (0, 1)");
    }
    gains.validate(dt);
    thresholds.validate();

    for (const LocalizationEdge& e : graph.localization_edges) {
        if (e.observer < 1 || e.observer > num_agents || e.target < 1 || e.target > num_agents) {
            throw ValidationError("localization edge references an unknown agent");
        }
        if (e.observer == e.target) {
            throw ValidationError("localization edge may not be a self loop; use "
                                  "self_measuring for anchored leaders");
        }
        if (e.period < 1) {
            throw ValidationError("localization edge period must be >= 1");
        }
    }
    for (int id : graph.self_measuring) {
        if (!is_leader(id)) {
            throw ValidationError("self_measuring entries must be leaders (ids 1..3)");
        }
    }

    if (planner.grid_size < 20) {
        throw ValidationError("planner.grid_size must be at least 20");
    }
    if (!(planner.area_tol_rel > 0.0)) {
        throw ValidationError("planner.area_tol_rel must be positive");
    }
    if (planner.a0 < 0.0) {
        throw ValidationError("planner.a0 must be positive (or omitted)");
    }
    const bool has_T = planner.T > 0.0;
    const bool has_bounds = planner.T_max > 0.0;
    if (!has_T && !has_bounds) {
        throw ValidationError("planner block needs either T or T-search bounds");
    }
    if (has_bounds && !(planner.T_min > 0.0 && planner.T_min < planner.T_max)) {
        throw ValidationError("planner T-search bounds require 0 < T_min < T_max");
    }
    if (!(planner.T_res > 0.0)) {
        throw ValidationError("planner.T_res must be positive");
    }
    Triangle(planner.final_leaders[0], planner.final_leaders[1], planner.final_leaders[2]);

    const AssumptionReport report = validate_assumptions(graph, reference_positions());
    if (!report.all_pass()) {
        throw AssumptionViolation(report);
    }
}

ScenarioConfig parse_scenario(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(origin + ": " + e.what());
    }
    ScenarioConfig cfg;
    try {
        cfg = from_json(j, origin);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(origin + ": " + e.what());
    }
    cfg.validate();
    return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open scenario file: " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), path);
}

std::string scenario_to_json(const ScenarioConfig& cfg) {
    json j;
    j["schema_version"] = cfg.schema_version;
    j["name"] = cfg.name;
    j["num_agents"] = cfg.num_agents;
    j["dt"] = cfg.dt;
    j["seed"] = cfg.seed;
    j["settle_time"] = cfg.settle_time;
    j["bypass_estimator"] = cfg.bypass_estimator;
    j["gains"] = {{"g1", cfg.gains.g1}, {"g2", cfg.gains.g2}};
    j["noise"] = {{"process_accel_std", cfg.noise.process_accel_std},
                  {"range_std", cfg.noise.range_std},
                  {"bearing_std", cfg.noise.bearing_std}};
    j["safety"] = {{"epsilon", cfg.thresholds.epsilon}, {"delta", cfg.thresholds.delta}};
    j["estimator"] = {{"initial_variance",
                       {cfg.initial_variance(0), cfg.initial_variance(1), cfg.initial_variance(2),
                        cfg.initial_variance(3)}},
                      {"r2", cfg.r2}};
    j["agents"] = json::array();
    for (int i = 0; i < cfg.num_agents; ++i) {
        const AgentState& s = cfg.initial_state[static_cast<size_t>(i)];
        j["agents"].push_back({{"id", i + 1},
                               {"position", {s.pos.x(), s.pos.y()}},
                               {"velocity", {s.vel.x(), s.vel.y()}}});
    }
    j["coordination"] = json::object();
    for (const auto& [follower, triple] : cfg.graph.in_neighbors) {
        j["coordination"][std::to_string(follower)] = triple;
    }
    j["localization"] = json::object();
    j["localization"]["edges"] = json::array();
    for (const LocalizationEdge& e : cfg.graph.localization_edges) {
        j["localization"]["edges"].push_back(
            {{"observer", e.observer}, {"target", e.target}, {"period", e.period}});
    }
    j["localization"]["self_measuring"] = cfg.graph.self_measuring;
    j["planner"] = json::object();
    j["planner"]["final_leaders"] = json::array();
    for (const Point2& p : cfg.planner.final_leaders) {
        j["planner"]["final_leaders"].push_back({p.x(), p.y()});
    }
    j["planner"]["a0"] = cfg.planner.a0;
    j["planner"]["area_tol_rel"] = cfg.planner.area_tol_rel;
    j["planner"]["grid_size"] = cfg.planner.grid_size;
    j["planner"]["T"] = cfg.planner.T;
    j["planner"]["T_min"] = cfg.planner.T_min;
    j["planner"]["T_max"] = cfg.planner.T_max;
    j["planner"]["T_res"] = cfg.planner.T_res;
    return j.dump(2);
}

}  // namespace contdef
