#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>

#include "contdef/geometry.hpp"
#include "support/generators.hpp"

using namespace contdef;

TEST_CASE("signed_area orientation") {
    CHECK(signed_area({0, 0}, {1, 0}, {0, 1}) == doctest::Approx(0.5));
    CHECK(signed_area({0, 0}, {0, 1}, {1, 0}) == doctest::Approx(-0.5));
    CHECK(signed_area({0, 0}, {1, 1}, {2, 2}) == 0.0);
}

TEST_CASE("Triangle rejects collinear vertices") {
    CHECK_THROWS_AS(Triangle({0, 0}, {1, 1}, {2, 2}), DegenerateTriangle);
    CHECK_THROWS_AS(Triangle({0, 0}, {0, 0}, {1, 0}), DegenerateTriangle);
    const Triangle tri({0, 0}, {4, 0}, {0, 4});
    CHECK(tri.area() == doctest::Approx(8.0));
    CHECK(tri.centroid().isApprox(Point2(4.0 / 3.0, 4.0 / 3.0)));
}

TEST_CASE("barycentric_coords pinned cases") {
    const Triangle tri({0, 0}, {4, 0}, {0, 4});

    const auto centroid = barycentric_coords(tri.centroid(), tri);
    for (double a : centroid.alpha) CHECK(a == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    const auto vertex = barycentric_coords(tri.vertex(0), tri);
    CHECK(vertex.alpha[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(vertex.alpha[1]) < 1e-12);
    CHECK(std::abs(vertex.alpha[2]) < 1e-12);

    // Hand Cramer's rule: p = (1,1) in {(0,0),(4,0),(0,4)} -> (1/2, 1/4, 1/4).
    const auto w = barycentric_coords({1, 1}, tri);
    CHECK(w.alpha[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(w.alpha[1] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(w.alpha[2] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(w.inside());
}

TEST_CASE("barycentric partition of unity, inside/outside classification") {
    testgen::Rng rng(101);
    for (int i = 0; i < 300; ++i) {
        const Triangle tri = testgen::random_triangle(rng);
        const Point2 p = testgen::random_point(rng, 25.0);
        const auto w = barycentric_coords(p, tri);
        CHECK(std::abs(w.sum() - 1.0) <= 1e-12);

        // Reconstruction is the defining identity.
        const Point2 back = w.alpha[0] * tri.vertex(0) + w.alpha[1] * tri.vertex(1) +
                            w.alpha[2] * tri.vertex(2);
        CHECK((back - p).norm() <= 1e-10);
    }
    // Interior points by construction classify as inside.
    for (int i = 0; i < 100; ++i) {
        const Triangle tri = testgen::random_triangle(rng);
        const auto w0 = testgen::random_interior_weights(rng);
        const auto w = barycentric_coords(testgen::point_from_weights(w0, tri), tri);
        CHECK(w.inside(1e-9));
    }
}

TEST_CASE("solve_transform pinned cases") {
    const Triangle ref({0, 0}, {1, 0}, {0, 1});

    const auto id = solve_transform(ref, ref);
    CHECK(id.Q.isApprox(Eigen::Matrix2d::Identity(), 1e-12));
    CHECK(id.d.norm() <= 1e-12);

    const Triangle shifted({2, -1}, {3, -1}, {2, 0});
    const auto tr = solve_transform(ref, shifted);
    CHECK(tr.Q.isApprox(Eigen::Matrix2d::Identity(), 1e-12));
    CHECK(tr.d.isApprox(Point2(2, -1), 1e-12));

    const Triangle scaled({0, 0}, {2, 0}, {0, 3});
    const auto sc = solve_transform(ref, scaled);
    Eigen::Matrix2d expect;
    expect << 2, 0, 0, 3;
    CHECK(sc.Q.isApprox(expect, 1e-12));
    CHECK(sc.d.norm() <= 1e-12);
}

TEST_CASE("solve_transform round trip on random triangles") {
    testgen::Rng rng(202);
    for (int i = 0; i < 300; ++i) {
        const Triangle ref = testgen::random_triangle(rng);
        const Triangle des = testgen::random_triangle(rng);
        const auto t = solve_transform(ref, des);
        for (int v = 0; v < 3; ++v) {
            CHECK((t.apply(ref.vertex(v)) - des.vertex(v)).norm() <= 1e-10);
        }
    }
}

TEST_CASE("affine map equals barycentric combination of mapped leaders") {
    testgen::Rng rng(303);
    for (int i = 0; i < 300; ++i) {
        const Triangle ref = testgen::random_triangle(rng);
        const auto t = testgen::random_transform(rng);
        const Point2 p = testgen::random_point(rng, 20.0);
        const auto w = barycentric_coords(p, ref);
        const Point2 direct = t.apply(p);
        const Point2 combined = desired_position(
            w, {t.apply(ref.vertex(0)), t.apply(ref.vertex(1)), t.apply(ref.vertex(2))});
        CHECK((direct - combined).norm() <= 1e-10);
    }
}

TEST_CASE("polar_decompose pinned cases") {
    HomogeneousTransform t;  // identity
    auto f = polar_decompose(t);
    CHECK(f.R.isApprox(Eigen::Matrix2d::Identity(), 1e-12));
    CHECK(f.U.isApprox(Eigen::Matrix2d::Identity(), 1e-12));
    CHECK(f.lambda1 == doctest::Approx(1.0));
    CHECK(f.lambda2 == doctest::Approx(1.0));

    const double c = std::cos(M_PI / 6.0), s = std::sin(M_PI / 6.0);
    t.Q << c, -s, s, c;
    f = polar_decompose(t);
    CHECK(f.R.isApprox(t.Q, 1e-12));
    CHECK(f.U.isApprox(Eigen::Matrix2d::Identity(), 1e-12));

    // U = sqrt(Q^T Q) for diagonal Q is the |diagonal|.
    t.Q << 2, 0, 0, 0.5;
    f = polar_decompose(t);
    CHECK(f.R.isApprox(Eigen::Matrix2d::Identity(), 1e-12));
    CHECK(f.U(0, 0) == doctest::Approx(2.0));
    CHECK(f.U(1, 1) == doctest::Approx(0.5));
    CHECK(f.lambda1 == doctest::Approx(2.0));
    CHECK(f.lambda2 == doctest::Approx(0.5));
}

TEST_CASE("polar factors: reconstruction, orthogonality, symmetry") {
    testgen::Rng rng(404);
    for (int i = 0; i < 400; ++i) {
        const auto t = testgen::random_transform(rng);  // reflections included
        const auto f = polar_decompose(t);
        CHECK((f.R * f.U - t.Q).norm() <= 1e-10);
        CHECK((f.R.transpose() * f.R - Eigen::Matrix2d::Identity()).norm() <= 1e-12);
        CHECK(f.R.determinant() == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(f.U(0, 1) == f.U(1, 0));
        CHECK(f.lambda1 >= f.lambda2);
        // The stretch eigenvalues carry the transform's orientation.
        const double det = t.Q.determinant();
        CHECK(f.lambda1 * f.lambda2 == doctest::Approx(det).epsilon(1e-9));
        if (det < 0.0) CHECK(f.lambda2 < 0.0);
    }
}

TEST_CASE("stretch eigenvalues stay positive along det>0 transform paths") {
    testgen::Rng rng(505);
    for (int path = 0; path < 20; ++path) {
        const double theta = rng.uniform(-M_PI, M_PI);
        const double a = rng.uniform(0.2, 3.0), b = rng.uniform(0.2, 3.0);
        for (int k = 0; k <= 50; ++k) {
            const double s = k / 50.0;
            const double c = std::cos(theta * s), sn = std::sin(theta * s);
            HomogeneousTransform t;
            Eigen::Matrix2d rot;
            rot << c, -sn, sn, c;
            t.Q = rot * Eigen::Vector2d(1.0 + s * (a - 1.0), 1.0 + s * (b - 1.0)).asDiagonal();
            REQUIRE(t.Q.determinant() > 0.0);
            const auto f = polar_decompose(t);
            CHECK(f.lambda1 > 0.0);
            CHECK(f.lambda2 > 0.0);
        }
    }
}

TEST_CASE("desired_position pinned cases") {
    const std::array<Point2, 3> leaders = {Point2(0, 0), Point2(3, 0), Point2(0, 3)};
    CHECK(desired_position({{1.0, 0.0, 0.0}}, leaders).isApprox(Point2(0, 0)));
    CHECK(desired_position({{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}}, leaders).isApprox(Point2(1, 1)));

    // Weights of (1,1) in {(0,0),(4,0),(0,4)} pushed through Q = diag(2,3).
    const Triangle ref({0, 0}, {4, 0}, {0, 4});
    const auto w = barycentric_coords({1, 1}, ref);
    const std::array<Point2, 3> deformed = {Point2(0, 0), Point2(8, 0), Point2(0, 12)};
    CHECK(desired_position(w, deformed).isApprox(Point2(2, 3), 1e-12));
}
