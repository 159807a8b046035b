#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <map>
#include <vector>

#include "contdef/graphs.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

using namespace contdef;

namespace {

GraphSpec quad_graph() {
    GraphSpec g;
    g.num_agents = 4;
    g.in_neighbors[4] = {1, 2, 3};
    return g;
}

}  // namespace

TEST_CASE("single-follower weight matrix") {
    const std::vector<Point2> pos = {{0, 0}, {4, 0}, {0, 4}, {1, 1}};
    const auto w = build_weight_matrix(quad_graph(), pos);
    REQUIRE(w.rows() == 1);
    CHECK(w.B(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(w.B(0, 1) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(w.B(0, 2) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(w.A(0, 0) == -1.0);

    const auto rw = w.row_weights(quad_graph(), 4);
    CHECK(rw[0] == doctest::Approx(0.5));
    CHECK(rw[1] == doctest::Approx(0.25));
    CHECK(rw[2] == doctest::Approx(0.25));

    const auto props = check_A_properties(w);
    CHECK(props.diag_minus_one);
    CHECK(props.nonneg_offdiag);
    CHECK(props.spectral_abscissa == doctest::Approx(-1.0));
    CHECK(props.hurwitz());
}

TEST_CASE("follower at centroid gets uniform weights") {
    const std::vector<Point2> pos = {{0, 0}, {6, 0}, {0, 6}, {2, 2}};
    const auto w = build_weight_matrix(quad_graph(), pos);
    for (int j = 0; j < 3; ++j) CHECK(w.B(0, j) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("weight matrix structural properties on random scenarios") {
    testgen::Rng rng(606);
    for (int i = 0; i < 30; ++i) {
        const int n = rng.uniform_int(4, 15);
        const auto sc = testgen::random_valid_scenario(rng, n);
        const auto report = validate_assumptions(sc.graph, sc.positions);
        REQUIRE_MESSAGE(report.all_pass(), report.describe());

        const auto w = build_weight_matrix(sc.graph, sc.positions);
        REQUIRE(w.W.rows() == n - 3);
        REQUIRE(w.W.cols() == n);
        for (int r = 0; r < w.rows(); ++r) {
            CHECK(std::abs(w.W.row(r).sum()) <= 1e-12);
            for (int c = 0; c < w.W.cols(); ++c) {
                if (c == r + 3) {
                    CHECK(w.W(r, c) == -1.0);
                } else {
                    CHECK(w.W(r, c) >= 0.0);
                }
            }
        }

        const auto props = check_A_properties(w);
        CHECK(props.diag_minus_one);
        CHECK(props.nonneg_offdiag);
        CHECK(props.hurwitz());

        // Gershgorin: rows of A sum into [-1, 0), so every eigenvalue lies in
        // the unit disk centered at -1.
        const Eigen::EigenSolver<Eigen::MatrixXd> eig(w.A);
        for (int k = 0; k < w.A.rows(); ++k) {
            CHECK(std::abs(eig.eigenvalues()(k) + std::complex<double>(1.0, 0.0)) <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("ten-agent fixture passes all assumptions and is Hurwitz") {
    const auto cfg = fixtures::ten_agent();
    const auto report = validate_assumptions(cfg.graph, cfg.reference_positions());
    CHECK(report.leaders_triangle);
    CHECK(report.neighbor_triangles);
    CHECK(report.followers_contained);
    CHECK(report.leaders_reach_all);

    const auto w = build_weight_matrix(cfg.graph, cfg.reference_positions());
    CHECK(check_A_properties(w).hurwitz());
}

TEST_CASE("assumption 1: collinear leaders flagged") {
    const std::vector<Point2> pos = {{0, 0}, {1, 0}, {2, 0}, {1, 1}};
    const auto report = validate_assumptions(quad_graph(), pos);
    CHECK_FALSE(report.leaders_triangle);
    CHECK_FALSE(report.all_pass());
    CHECK_THROWS_AS(build_weight_matrix(quad_graph(), pos), AssumptionViolation);
}

TEST_CASE("assumption 3: follower on an in-neighbor edge flagged") {
    const std::vector<Point2> pos = {{0, 0}, {4, 0}, {0, 4}, {2, 0}};
    const auto report = validate_assumptions(quad_graph(), pos);
    CHECK(report.leaders_triangle);
    CHECK_FALSE(report.followers_contained);
    REQUIRE(report.uncontained_followers.size() == 1);
    CHECK(report.uncontained_followers[0] == 4);

    try {
        build_weight_matrix(quad_graph(), pos);
        FAIL("expected AssumptionViolation");
    } catch (const AssumptionViolation& e) {
        CHECK_FALSE(e.report.followers_contained);
    }
}

TEST_CASE("assumption 2: collinear in-neighbor triple flagged") {
    GraphSpec g;
    g.num_agents = 5;
    g.in_neighbors[4] = {1, 2, 3};
    g.in_neighbors[5] = {1, 2, 4};
    // Agent 4 sits on the 1-2 edge, so 5's triple (1,2,4) is collinear.
    const std::vector<Point2> pos = {{0, 0}, {4, 0}, {0, 4}, {2, 0}, {1, 1}};
    const auto report = validate_assumptions(g, pos);
    CHECK_FALSE(report.neighbor_triangles);
    REQUIRE(report.degenerate_neighbor_triangles.size() == 1);
    CHECK(report.degenerate_neighbor_triangles[0] == 5);
}

TEST_CASE("assumption 4: followers unreachable from a leader flagged") {
    // 4 and 5 reference each other plus leaders 2 and 3; nothing references
    // leader 1, so no directed path from it reaches any follower. Such a cut
    // always breaches containment too: whichever of 4/5 sits deeper toward
    // leader 1 cannot lie inside a triangle built only from {2, 3, other}.
    // The graph check must still report the cut in its own right.
    GraphSpec g;
    g.num_agents = 5;
    g.in_neighbors[4] = {2, 3, 5};
    g.in_neighbors[5] = {2, 3, 4};
    // 4 = (1.6, 1.6) is strictly inside ((4,0), (0,4), (1.5,1.5)); 5 is the
    // deeper one and is necessarily uncontained.
    const std::vector<Point2> pos = {{0, 0}, {4, 0}, {0, 4}, {1.6, 1.6}, {1.5, 1.5}};
    const auto report = validate_assumptions(g, pos);
    CHECK(report.leaders_triangle);
    CHECK(report.neighbor_triangles);
    CHECK_FALSE(report.followers_contained);
    CHECK(report.uncontained_followers == std::vector<int>{5});
    CHECK_FALSE(report.leaders_reach_all);
    CHECK(report.unreachable_followers == std::vector<int>{4, 5});
}

TEST_CASE("build_weight_matrix is equivariant under follower relabeling") {
    testgen::Rng rng(707);
    const auto sc = testgen::random_valid_scenario(rng, 8);
    const auto w1 = build_weight_matrix(sc.graph, sc.positions);

    // Relabel followers 4..8 -> 8,4,7,5,6.
    std::map<int, int> relabel = {{1, 1}, {2, 2}, {3, 3}, {4, 8}, {5, 4}, {6, 7}, {7, 5}, {8, 6}};
    GraphSpec g2;
    g2.num_agents = 8;
    std::vector<Point2> pos2(8);
    for (int id = 1; id <= 8; ++id) pos2[static_cast<size_t>(relabel[id] - 1)] = sc.positions[static_cast<size_t>(id - 1)];
    for (const auto& [id, nbs] : sc.graph.in_neighbors) {
        std::array<int, 3> mapped{};
        for (int k = 0; k < 3; ++k) mapped[static_cast<size_t>(k)] = relabel[nbs[static_cast<size_t>(k)]];
        g2.in_neighbors[relabel[id]] = mapped;
    }
    const auto w2 = build_weight_matrix(g2, pos2);

    for (int id = 4; id <= 8; ++id) {
        for (int col = 1; col <= 8; ++col) {
            CHECK(w2.W(relabel[id] - 4, relabel[col] - 1) == w1.W(id - 4, col - 1));
        }
    }
}
