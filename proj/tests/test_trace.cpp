#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "contdef/trace.hpp"
#include "support/generators.hpp"

using namespace contdef;

namespace {

std::string tmp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

SimulationTrace random_trace(testgen::Rng& rng, int num_agents, int steps) {
    SimulationTrace tr;
    tr.num_agents = num_agents;
    tr.dt = 0.1;
    for (int k = 0; k < steps; ++k) {
        TraceRow row;
        row.t = 0.1 * k;
        for (int i = 0; i < num_agents; ++i) {
            row.agents.push_back({testgen::random_point(rng, 1e3), testgen::random_point(rng, 10.0)});
            row.desired.push_back(testgen::random_point(rng, 1e3));
        }
        for (int f = 0; f < num_followers(num_agents); ++f) {
            row.estimates.push_back({testgen::random_point(rng, 1e3), testgen::random_point(rng, 10.0)});
            row.cov_trace.push_back(std::pow(10.0, rng.uniform(-9.0, 3.0)));
        }
        tr.rows.push_back(row);
    }
    return tr;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("trace round trip is exact") {
    testgen::Rng rng(5151);
    const auto tr = random_trace(rng, 6, 25);
    const auto path = tmp_path("contdef_trace_roundtrip.csv");
    export_trace(tr, path);
    const auto back = import_trace(path);

    REQUIRE(back.num_agents == tr.num_agents);
    REQUIRE(back.steps() == tr.steps());
    CHECK(back.dt == doctest::Approx(tr.dt).epsilon(1e-15));
    const auto same = [](const Vec2& x, const Vec2& y) {
        return x.x() == y.x() && x.y() == y.y();
    };
    for (int k = 0; k < tr.steps(); ++k) {
        const auto& a = tr.rows[static_cast<size_t>(k)];
        const auto& b = back.rows[static_cast<size_t>(k)];
        CHECK(b.t == a.t);
        for (size_t i = 0; i < a.agents.size(); ++i) {
            CHECK(same(b.agents[i].pos, a.agents[i].pos));
            CHECK(same(b.agents[i].vel, a.agents[i].vel));
            CHECK(same(b.desired[i], a.desired[i]));
        }
        for (size_t f = 0; f < a.estimates.size(); ++f) {
            CHECK(same(b.estimates[f].pos, a.estimates[f].pos));
            CHECK(same(b.estimates[f].vel, a.estimates[f].vel));
            CHECK(b.cov_trace[f] == a.cov_trace[f]);
        }
    }
    std::remove(path.c_str());
}

TEST_CASE("export is byte-stable") {
    testgen::Rng rng(5252);
    const auto tr = random_trace(rng, 5, 10);
    const auto p1 = tmp_path("contdef_trace_a.csv");
    const auto p2 = tmp_path("contdef_trace_b.csv");
    export_trace(tr, p1);
    export_trace(tr, p2);
    CHECK(slurp(p1) == slurp(p2));
    std::remove(p1.c_str());
    std::remove(p2.c_str());
}

TEST_CASE("trace validation rejects malformed traces") {
    testgen::Rng rng(5353);
    auto tr = random_trace(rng, 4, 8);
    tr.validate();

    auto bad_grid = tr;
    bad_grid.rows[5].t += 0.05;
    CHECK_THROWS_AS(bad_grid.validate(), ValidationError);

    auto bad_dims = tr;
    bad_dims.rows[2].estimates.clear();
    CHECK_THROWS_AS(bad_dims.validate(), ValidationError);

    auto too_small = tr;
    too_small.num_agents = 3;
    CHECK_THROWS_AS(too_small.validate(), ValidationError);
}

TEST_CASE("import rejects malformed files with located errors") {
    const auto path = tmp_path("contdef_trace_bad.csv");

    {
        std::ofstream out(path);
    }
    CHECK_THROWS_AS(import_trace(path), ParseError);

    {
        std::ofstream out(path);
        out << "t,a1_x,a1_y\n";  // wrong column count
    }
    CHECK_THROWS_AS(import_trace(path), ParseError);

    {
        // Valid 4-agent header (1 + 24 + 5 = 30 columns), bad field.
        std::ofstream out(path);
        out << "t";
        for (int i = 1; i <= 4; ++i)
            out << ",a" << i << "_x,a" << i << "_y,a" << i << "_vx,a" << i << "_vy,a" << i
                << "_des_x,a" << i << "_des_y";
        out << ",a4_est_x,a4_est_y,a4_est_vx,a4_est_vy,a4_cov_tr\n";
        for (int c = 0; c < 30; ++c) out << (c ? ",1.0" : "0.0");
        out << "\n0.1";
        for (int c = 1; c < 29; ++c) out << ",1.0";
        out << ",oops\n";
    }
    try {
        import_trace(path);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        const std::string what = e.what();
        CHECK(what.find("line 3") != std::string::npos);
        CHECK(what.find("oops") != std::string::npos);
    }

    CHECK_THROWS_AS(import_trace(tmp_path("contdef_no_such_file.csv")), IoError);
    std::remove(path.c_str());
}
