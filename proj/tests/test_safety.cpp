#include <doctest.h>

#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "contdef/geometry.hpp"
#include "contdef/safety.hpp"
#include "support/generators.hpp"

using namespace contdef;

TEST_CASE("threshold validation") {
    SafetyThresholds th;
    th.validate();
    th.epsilon = 0.0;
    CHECK_THROWS_AS(th.validate(), ValidationError);
    th = SafetyThresholds{0.5, -0.1};
    CHECK_THROWS_AS(th.validate(), ValidationError);
}

TEST_CASE("collision check: strict 2-epsilon clearance") {
    const std::vector<Point2> pos = {{0, 0}, {3, 4}, {10, 10}};
    auto c = check_collision(pos, 2.4);  // closest pair distance 5 > 4.8
    CHECK(c.ok);
    CHECK(c.min_clearance == doctest::Approx(5.0));
    CHECK(c.pair == std::array<int, 2>{1, 2});

    c = check_collision(pos, 2.5);  // exactly 2 eps is a violation
    CHECK_FALSE(c.ok);

    c = check_collision(pos, 2.6);
    CHECK_FALSE(c.ok);
    CHECK(c.pair == std::array<int, 2>{1, 2});
}

TEST_CASE("collision check matches a brute-force oracle") {
    testgen::Rng rng(3131);
    for (int trial = 0; trial < 500; ++trial) {
        const int n = rng.uniform_int(2, 12);
        std::vector<Point2> pos;
        for (int i = 0; i < n; ++i) pos.push_back(testgen::random_point(rng, 3.0));
        const double eps = rng.uniform(0.1, 2.0);

        double best = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < pos.size(); ++i)
            for (size_t j = i + 1; j < pos.size(); ++j)
                best = std::min(best, (pos[i] - pos[j]).norm());

        const auto c = check_collision(pos, eps);
        CHECK(c.min_clearance == doctest::Approx(best).epsilon(1e-12));
        CHECK(c.ok == (best > 2.0 * eps));
    }
}

TEST_CASE("boundedness check: non-strict delta") {
    const std::vector<Point2> actual = {{0, 0}, {1, 0}, {0, 2}};
    const std::vector<Point2> desired = {{0, 0}, {1, 0.5}, {0, 2}};
    auto b = check_boundedness(actual, desired, 0.5);
    CHECK(b.ok);  // deviation exactly delta is allowed
    CHECK(b.max_deviation == doctest::Approx(0.5));
    CHECK(b.offender == 2);

    b = check_boundedness(actual, desired, 0.5 - 1e-9);
    CHECK_FALSE(b.ok);
}

TEST_CASE("containment omega agrees with barycentric coordinates") {
    const Point2 m(0, 0), j(4, 0), h(0, 4);
    const Triangle tri(m, j, h);
    testgen::Rng rng(3232);
    for (int i = 0; i < 100; ++i) {
        const Point2 t = testgen::random_point(rng, 6.0);
        const auto omega = containment_omega(m, j, h, t);
        const auto alpha = barycentric_coords(t, tri);
        for (int k = 0; k < 3; ++k)
            CHECK(omega(k) == doctest::Approx(alpha.alpha[static_cast<size_t>(k)]).epsilon(1e-12));
    }
    CHECK(containment_omega(m, j, h, {1, 1}).minCoeff() > 0.0);
    CHECK(containment_omega(m, j, h, {-1, 1}).minCoeff() < 0.0);
    CHECK(containment_omega(m, j, h, {2, 0}).minCoeff() == doctest::Approx(0.0));
}

namespace {

// Hand-built four-agent trace: leaders on a fixed triangle, one follower.
SimulationTrace synthetic_trace(int steps) {
    SimulationTrace tr;
    tr.num_agents = 4;
    tr.dt = 0.1;
    for (int k = 0; k < steps; ++k) {
        TraceRow row;
        row.t = 0.1 * k;
        row.agents = {AgentState{{0, 0}, {0, 0}}, AgentState{{8, 0}, {0, 0}},
                      AgentState{{0, 8}, {0, 0}}, AgentState{{2, 2}, {0, 0}}};
        row.desired = {{0, 0}, {8, 0}, {0, 8}, {2, 2}};
        row.estimates = {AgentState{{2, 2}, {0, 0}}};
        row.cov_trace = {1e-4};
        row.controls = {Vec2::Zero(), Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
        tr.rows.push_back(row);
    }
    return tr;
}

}  // namespace

TEST_CASE("verify_run: clean trace passes with the expected margins") {
    const auto tr = synthetic_trace(12);
    const SafetyThresholds th;  // eps = delta = 0.5
    const auto rep = verify_run(tr, th);
    CHECK(rep.all_ok());
    // Closest pair is follower 4 to leader 1 at distance sqrt(8).
    CHECK(rep.min_clearance == doctest::Approx(std::sqrt(8.0)));
    CHECK(rep.max_deviation == doctest::Approx(0.0));
    // Follower 4 at (2,2) in {(0,0),(8,0),(0,8)} has alpha = (1/2, 1/4, 1/4);
    // the leaders themselves contribute the exact zeros.
    CHECK(rep.min_containment == doctest::Approx(0.0));
    CHECK(rep.combined_margin() ==
          doctest::Approx(std::min(std::sqrt(8.0) - 1.0, std::min(0.5, 0.0))));
}

TEST_CASE("verify_run: collision localized to the first offending step") {
    auto tr = synthetic_trace(12);
    tr.rows[6].agents[3].pos = Point2(0.6, 0.0);  // 0.6 m from leader 1 < 2 eps
    tr.rows[6].desired[3] = tr.rows[6].agents[3].pos;
    tr.rows[7] = tr.rows[6];
    tr.rows[7].t = 0.7;
    const auto rep = verify_run(tr, SafetyThresholds{});
    CHECK_FALSE(rep.collision.ok);
    CHECK(rep.collision.first_violation_step == 6);
    CHECK(rep.collision.agents == std::array<int, 2>{1, 4});
    CHECK(rep.min_clearance == doctest::Approx(0.6));
    // The follower moved outside its containment triangle too.
    CHECK(rep.containment.ok);  // (0.6, 0) still inside with omega >= 0? No: on edge y=0 it is 0+
    CHECK_FALSE(rep.all_ok());
}

TEST_CASE("verify_run: boundedness violation reports agent and step") {
    auto tr = synthetic_trace(10);
    tr.rows[4].agents[1].pos = Point2(8.0, 0.7);  // 0.7 m from desired
    const auto rep = verify_run(tr, SafetyThresholds{});
    CHECK(rep.collision.ok);
    CHECK_FALSE(rep.boundedness.ok);
    CHECK(rep.boundedness.first_violation_step == 4);
    CHECK(rep.boundedness.agents[0] == 2);
    CHECK(rep.max_deviation == doctest::Approx(0.7));
}

TEST_CASE("verify_run: follower outside the actual leading triangle") {
    auto tr = synthetic_trace(10);
    tr.rows[8].agents[3].pos = Point2(-1.0, 1.0);
    tr.rows[8].desired[3] = tr.rows[8].agents[3].pos;  // keep boundedness clean
    const auto rep = verify_run(tr, SafetyThresholds{});
    CHECK(rep.collision.ok);
    CHECK(rep.boundedness.ok);
    CHECK_FALSE(rep.containment.ok);
    CHECK(rep.containment.first_violation_step == 8);
    CHECK(rep.containment.agents[0] == 4);
    CHECK(rep.min_containment < 0.0);
}

TEST_CASE("verify_run: degenerate leading triangle counts as containment failure") {
    auto tr = synthetic_trace(6);
    for (auto& row : tr.rows) row.agents[2].pos = Point2(16, 0);  // leaders collinear
    const auto rep = verify_run(tr, SafetyThresholds{});
    CHECK_FALSE(rep.containment.ok);
    CHECK(rep.containment.first_violation_step == 0);
    CHECK(rep.min_containment == -std::numeric_limits<double>::infinity());
}

TEST_CASE("export_report writes a parseable verdict") {
    const auto rep = verify_run(synthetic_trace(5), SafetyThresholds{});
    const auto path = (std::filesystem::temp_directory_path() / "contdef_report_test.json").string();
    export_report(rep, path);
    std::ifstream in(path);
    REQUIRE(in.good());
    const auto j = nlohmann::json::parse(in);
    CHECK(j.at("all_ok").get<bool>());
    CHECK(j.at("collision").at("ok").get<bool>());
    CHECK(j.at("boundedness").at("ok").get<bool>());
    CHECK(j.at("containment").at("ok").get<bool>());
    CHECK(j.at("min_clearance").get<double>() == doctest::Approx(std::sqrt(8.0)));
    std::remove(path.c_str());
}
