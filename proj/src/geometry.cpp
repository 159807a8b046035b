#include "contdef/geometry.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace contdef {

double signed_area(const Point2& a, const Point2& b, const Point2& c) {
    const Vec2 ab = b - a;
    const Vec2 ac = c - a;
    return 0.5 * (ab.x() * ac.y() - ab.y() * ac.x());
}

namespace {

void require_finite(const Point2& p, const char* what) {
    if (!p.allFinite()) throw Error(std::string(what) + ": non-finite coordinates");
}

}  // namespace

Triangle::Triangle(const Point2& v1, const Point2& v2, const Point2& v3) : v_{v1, v2, v3} {
    require_finite(v1, "Triangle");
    require_finite(v2, "Triangle");
    require_finite(v3, "Triangle");
    if (std::abs(signed_area(v1, v2, v3)) < kDegenerateAreaTol)
        throw DegenerateTriangle("Triangle: vertices are collinear");
}

Triangle::Triangle(const std::array<Point2, 3>& vertices)
    : Triangle(vertices[0], vertices[1], vertices[2]) {}

double Triangle::area() const { return signed_area(v_[0], v_[1], v_[2]); }

Point2 Triangle::centroid() const { return (v_[0] + v_[1] + v_[2]) / 3.0; }

double BarycentricWeights::min() const {
    return std::min(alpha[0], std::min(alpha[1], alpha[2]));
}

BarycentricWeights barycentric_coords(const Point2& p, const Triangle& tri) {
    const Point2& a = tri.vertex(0);
    const Point2& b = tri.vertex(1);
    const Point2& c = tri.vertex(2);
    const double total = signed_area(a, b, c);
    // Cramer's rule on [v1 v2 v3; 1 1 1] alpha = [p; 1]: each coefficient is
    // a sub-triangle area ratio.
    BarycentricWeights w;
    w.alpha[0] = signed_area(p, b, c) / total;
    w.alpha[1] = signed_area(a, p, c) / total;
    w.alpha[2] = signed_area(a, b, p) / total;
    return w;
}

HomogeneousTransform solve_transform(const Triangle& ref_leaders,
                                     const Triangle& desired_leaders) {
    // Per axis, [Q_row d_q] solves the 3x3 system stacking the reference
    // vertices over a column of ones; the same LU serves both axes.
    Eigen::Matrix3d M;
    Eigen::Matrix<double, 3, 2> rhs;
    for (int i = 0; i < 3; ++i) {
        M(i, 0) = ref_leaders.vertex(i).x();
        M(i, 1) = ref_leaders.vertex(i).y();
        M(i, 2) = 1.0;
        rhs(i, 0) = desired_leaders.vertex(i).x();
        rhs(i, 1) = desired_leaders.vertex(i).y();
    }
    const Eigen::Matrix<double, 3, 2> sol = M.partialPivLu().solve(rhs);

    HomogeneousTransform t;
    t.Q << sol(0, 0), sol(1, 0), sol(0, 1), sol(1, 1);
    t.d << sol(2, 0), sol(2, 1);
    if (std::abs(t.Q.determinant()) < kDegenerateAreaTol)
        throw SingularTransform("solve_transform: desired leaders are collinear");
    return t;
}

PolarFactors polar_decompose(const HomogeneousTransform& t) {
    const Eigen::Matrix2d& Q = t.Q;
    const double detQ = Q.determinant();
    if (std::abs(detQ) < kDegenerateAreaTol)
        throw SingularTransform("polar_decompose: singular transform");

    PolarFactors f;
    if (detQ > 0.0) {
        // U = sqrt(Q^T Q) for a 2x2 SPD matrix A: (A + sqrt(det A) I) / tau
        // with tau = sqrt(trace A + 2 sqrt(det A)).
        const Eigen::Matrix2d A = Q.transpose() * Q;
        const double s = std::sqrt(A.determinant());
        const double tau = std::sqrt(A.trace() + 2.0 * s);
        Eigen::Matrix2d U = (A + s * Eigen::Matrix2d::Identity()) / tau;
        U(1, 0) = U(0, 1);  // store exactly symmetric
        // analytic 2x2 inverse; det(U) = s
        Eigen::Matrix2d Uinv;
        Uinv << U(1, 1), -U(0, 1), -U(1, 0), U(0, 0);
        Uinv /= s;
        f.R = Q * Uinv;
        f.U = U;
    } else {
        // Keep the rotation proper: R(theta) with theta chosen so R^T Q is
        // symmetric. U then has eigenvalues of mixed sign.
        const double theta = std::atan2(Q(1, 0) - Q(0, 1), Q(0, 0) + Q(1, 1));
        const double c = std::cos(theta);
        const double si = std::sin(theta);
        f.R << c, -si, si, c;
        Eigen::Matrix2d U = f.R.transpose() * Q;
        U(1, 0) = U(0, 1) = 0.5 * (U(0, 1) + U(1, 0));
        f.U = U;
    }

    // Eigenvalues of the symmetric 2x2 factor, sorted descending.
    const double mean = 0.5 * f.U.trace();
    const double disc = std::sqrt(std::max(0.0, mean * mean - f.U.determinant()));
    f.lambda1 = mean + disc;
    f.lambda2 = mean - disc;
    return f;
}

Point2 desired_position(const BarycentricWeights& w,
                        const std::array<Point2, 3>& leader_positions) {
    return w.alpha[0] * leader_positions[0] + w.alpha[1] * leader_positions[1] +
           w.alpha[2] * leader_positions[2];
}

}  // namespace contdef
