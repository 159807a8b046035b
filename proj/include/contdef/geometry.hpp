#pragma once

#include <Eigen/Core>

#include <array>

#include "contdef/errors.hpp"

namespace contdef {

using Point2 = Eigen::Vector2d;
using Vec2 = Eigen::Vector2d;

// |signed area| below this is treated as degenerate (square meters).
inline constexpr double kDegenerateAreaTol = 1e-12;

// Signed area of the triangle (a, b, c); positive for counterclockwise order.
double signed_area(const Point2& a, const Point2& b, const Point2& c);

// Three ordered vertices with nonzero signed area, validated on construction.
class Triangle {
public:
    Triangle(const Point2& v1, const Point2& v2, const Point2& v3);
    explicit Triangle(const std::array<Point2, 3>& vertices);

    const Point2& vertex(int i) const { return v_[i]; }
    const std::array<Point2, 3>& vertices() const { return v_; }
    double area() const;         // signed
    Point2 centroid() const;

private:
    std::array<Point2, 3> v_;
};

// Affine map r -> Q r + d shared by all agents. Q must stay non-singular.
struct HomogeneousTransform {
    Eigen::Matrix2d Q = Eigen::Matrix2d::Identity();
    Vec2 d = Vec2::Zero();

    Point2 apply(const Point2& r) const { return Q * r + d; }
};

// Rotation/stretch factors of Q = R * U with U symmetric. The eigenvalues of
// U are sorted lambda1 >= lambda2 and are both positive exactly when
// det(Q) > 0.
struct PolarFactors {
    Eigen::Matrix2d R;
    Eigen::Matrix2d U;
    double lambda1;
    double lambda2;
};

// Affine coefficients of a point w.r.t. a triangle; they always sum to 1 and
// are all nonnegative iff the point lies inside the triangle.
struct BarycentricWeights {
    std::array<double, 3> alpha;

    double sum() const { return alpha[0] + alpha[1] + alpha[2]; }
    double min() const;
    bool inside(double margin = 0.0) const { return min() > margin; }
};

// Coefficients alpha with p = alpha1*v1 + alpha2*v2 + alpha3*v3 and
// sum(alpha) = 1, solved by Cramer's rule on the vertex matrix.
BarycentricWeights barycentric_coords(const Point2& p, const Triangle& tri);

// Identifies the affine map that carries the reference leader triangle onto
// the desired one. Throws SingularTransform when the desired vertices are
// collinear.
HomogeneousTransform solve_transform(const Triangle& ref_leaders,
                                     const Triangle& desired_leaders);

// Closed-form 2x2 polar decomposition. For det(Q) > 0 it uses the analytic
// symmetric square root U = sqrt(Q^T Q); for det(Q) < 0 the rotation factor
// is still proper (det = +1) and U picks up one negative eigenvalue.
PolarFactors polar_decompose(const HomogeneousTransform& t);

// Weighted combination of the three leader positions.
Point2 desired_position(const BarycentricWeights& w,
                        const std::array<Point2, 3>& leader_positions);

}  // namespace contdef
