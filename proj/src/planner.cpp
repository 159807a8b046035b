#include "contdef/planner.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "contdef/errors.hpp"

namespace contdef {
namespace {

// Stacked scalar-trajectory layout: coordinate i = 2*leader + axis owns the
// decision block z[i*n, (i+1)*n) holding that coordinate's acceleration at
// the grid nodes.
constexpr int kCoords = 6;

struct Transcription {
    int n = 0;
    double h = 0.0;
    Eigen::VectorXd times;   // n
    Eigen::VectorXd w;       // trapezoid quadrature weights (n)
    Eigen::MatrixXd C;       // cumulative trapezoid: v = v0 + C u
    Eigen::MatrixXd P;       // double integration: p = p0 + v0 (t - t0) + P u
    Eigen::MatrixXd A_eq;    // 12 x 6n terminal equalities
    Eigen::VectorXd b_eq;    // 12
    std::array<double, kCoords> p0{}, v0{};
};

Transcription build_transcription(const BoundaryConditions& bc, int n) {
    Transcription tr;
    tr.n = n;
    const double T = bc.tf - bc.t0;
    tr.h = T / (n - 1);
    tr.times = Eigen::VectorXd::LinSpaced(n, bc.t0, bc.tf);

    tr.w = Eigen::VectorXd::Constant(n, tr.h);
    tr.w(0) = tr.w(n - 1) = 0.5 * tr.h;

    tr.C = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        tr.C.row(k) = tr.C.row(k - 1);
        tr.C(k, k - 1) += 0.5 * tr.h;
        tr.C(k, k) += 0.5 * tr.h;
    }
    tr.P = tr.C * tr.C;

    for (int l = 0; l < 3; ++l) {
        for (int a = 0; a < 2; ++a) {
            const int i = 2 * l + a;
            tr.p0[i] = bc.initial_position[l](a);
            tr.v0[i] = bc.initial_velocity[l](a);
        }
    }

    tr.A_eq = Eigen::MatrixXd::Zero(2 * kCoords, kCoords * n);
    tr.b_eq = Eigen::VectorXd::Zero(2 * kCoords);
    for (int l = 0; l < 3; ++l) {
        for (int a = 0; a < 2; ++a) {
            const int i = 2 * l + a;
            tr.A_eq.block(2 * i, i * n, 1, n) = tr.C.row(n - 1);
            tr.b_eq(2 * i) = bc.final_velocity[l](a) - tr.v0[i];
            tr.A_eq.block(2 * i + 1, i * n, 1, n) = tr.P.row(n - 1);
            tr.b_eq(2 * i + 1) = bc.final_position[l](a) - tr.p0[i] - tr.v0[i] * T;
        }
    }
    return tr;
}

// Grid positions of all six coordinates, one column per coordinate.
Eigen::MatrixXd grid_positions(const Transcription& tr, const Eigen::VectorXd& z) {
    Eigen::MatrixXd p(tr.n, kCoords);
    for (int i = 0; i < kCoords; ++i) {
        p.col(i) = Eigen::VectorXd::Constant(tr.n, tr.p0[i]) +
                   tr.v0[i] * (tr.times.array() - tr.times(0)).matrix() +
                   tr.P * z.segment(i * tr.n, tr.n);
    }
    return p;
}

double signed_area_row(const Eigen::MatrixXd& p, int k) {
    return 0.5 * ((p(k, 2) - p(k, 0)) * (p(k, 5) - p(k, 1)) -
                  (p(k, 4) - p(k, 0)) * (p(k, 3) - p(k, 1)));
}

// d(signed area)/d(coordinate i) at grid row k.
std::array<double, kCoords> area_gradient_row(const Eigen::MatrixXd& p, int k) {
    const double x1 = p(k, 0), y1 = p(k, 1);
    const double x2 = p(k, 2), y2 = p(k, 3);
    const double x3 = p(k, 4), y3 = p(k, 5);
    return {0.5 * (y2 - y3), 0.5 * (x3 - x2), 0.5 * (y3 - y1),
            0.5 * (x1 - x3), 0.5 * (y1 - y2), 0.5 * (x2 - x1)};
}

double quadrature_cost(const Transcription& tr, const Eigen::VectorXd& z) {
    double J = 0.0;
    for (int i = 0; i < kCoords; ++i) {
        J += z.segment(i * tr.n, tr.n).cwiseProduct(tr.w).dot(z.segment(i * tr.n, tr.n));
    }
    return J;
}

// Solves (D + mu G^T G) dz + A_eq^T nu = -g,  A_eq dz = r via the
// Sherman-Morrison-Woodbury identity on the diagonal-plus-low-rank Hessian;
// the dense KKT system never has to be formed.
Eigen::VectorXd solve_kkt(const Eigen::VectorXd& Dinv, const Eigen::MatrixXd& G, double mu,
                          const Eigen::MatrixXd& A_eq, const Eigen::VectorXd& g,
                          const Eigen::VectorXd& r) {
    const int nz = static_cast<int>(Dinv.size());
    const int neq = static_cast<int>(A_eq.rows());

    Eigen::LLT<Eigen::MatrixXd> llt;
    Eigen::MatrixXd GD;
    const bool low_rank = mu > 0.0 && G.rows() > 0;
    if (low_rank) {
        GD = G * Dinv.asDiagonal();
        Eigen::MatrixXd S = GD * G.transpose();
        S.diagonal().array() += 1.0 / mu;
        llt.compute(S);
        if (llt.info() != Eigen::Success) {
            throw NoConvergence("augmented system factorization failed");
        }
    }
    auto apply_Hinv = [&](const Eigen::MatrixXd& X) -> Eigen::MatrixXd {
        Eigen::MatrixXd Y = Dinv.asDiagonal() * X;
        if (low_rank) {
            Y -= GD.transpose() * llt.solve(G * Y);
        }
        return Y;
    };

    Eigen::MatrixXd rhs(nz, 1 + neq);
    rhs.col(0) = -g;
    rhs.rightCols(neq) = A_eq.transpose();
    const Eigen::MatrixXd Y = apply_Hinv(rhs);
    const Eigen::MatrixXd M = A_eq * Y.rightCols(neq);  // neq x neq
    const Eigen::VectorXd nu = M.ldlt().solve(A_eq * Y.col(0) - r);
    return Y.col(0) - Y.rightCols(neq) * nu;
}

LeaderTrajectory assemble(const BoundaryConditions& bc, const Transcription& tr,
                          const Eigen::VectorXd& z, double s_target) {
    LeaderTrajectory out;
    out.t0 = bc.t0;
    out.tf = bc.tf;
    out.times = tr.times;
    const Eigen::MatrixXd p = grid_positions(tr, z);
    for (int l = 0; l < 3; ++l) {
        out.position[l].resize(tr.n, 2);
        out.velocity[l].resize(tr.n, 2);
        out.accel[l].resize(tr.n, 2);
        for (int a = 0; a < 2; ++a) {
            const int i = 2 * l + a;
            const Eigen::VectorXd u = z.segment(i * tr.n, tr.n);
            out.position[l].col(a) = p.col(i);
            out.velocity[l].col(a) =
                Eigen::VectorXd::Constant(tr.n, tr.v0[i]) + tr.C * u;
            out.accel[l].col(a) = u;
        }
    }
    out.cost = quadrature_cost(tr, z);
    out.max_area_violation = 0.0;
    for (int k = 0; k < tr.n; ++k) {
        out.max_area_violation =
            std::max(out.max_area_violation, std::abs(signed_area_row(p, k) - s_target));
    }
    return out;
}

}  // namespace

void BoundaryConditions::validate() const {
    if (!(tf > t0)) {
        throw ValidationError("boundary conditions require tf > t0");
    }
    initial_triangle();
    final_triangle();
    for (int l = 0; l < 3; ++l) {
        if (!initial_velocity[l].allFinite() || !final_velocity[l].allFinite()) {
            throw ValidationError("boundary velocities must be finite");
        }
    }
}

Triangle BoundaryConditions::initial_triangle() const {
    return Triangle(initial_position[0], initial_position[1], initial_position[2]);
}

Triangle BoundaryConditions::final_triangle() const {
    return Triangle(final_position[0], final_position[1], final_position[2]);
}

AreaConstraint AreaConstraint::from_triangle(const Triangle& tri, double rel_tol) {
    AreaConstraint ac;
    ac.a0 = std::abs(tri.area());
    ac.area_tol = rel_tol * ac.a0;
    ac.validate();
    return ac;
}

void AreaConstraint::validate() const {
    if (!(a0 > 0.0) || !std::isfinite(a0)) {
        throw ValidationError("area constraint requires a0 > 0");
    }
    if (!(area_tol > 0.0) || !std::isfinite(area_tol)) {
        throw ValidationError("area constraint requires area_tol > 0");
    }
}

Triangle LeaderSample::triangle() const {
    return Triangle(position[0], position[1], position[2]);
}

LeaderTrajectory plan_leader_trajectories(const BoundaryConditions& bc, const AreaConstraint& ac,
                                          int grid_size, const PlannerOptions& opts) {
    bc.validate();
    ac.validate();
    if (grid_size < 20) {
        throw ValidationError("planner grid must have at least 20 points");
    }

    const double s_init = bc.initial_triangle().area();
    const double s_final = bc.final_triangle().area();
    if (std::abs(std::abs(s_init) - ac.a0) > ac.area_tol) {
        throw InfeasibleConstraint("initial leading-triangle area differs from a0 beyond tolerance");
    }
    if (std::abs(std::abs(s_final) - ac.a0) > ac.area_tol) {
        throw InfeasibleConstraint("final leading-triangle area differs from a0 beyond tolerance");
    }
    if (s_init * s_final < 0.0) {
        throw InfeasibleConstraint("boundary triangles have opposite orientation; "
                                   "a fixed-area path cannot connect them");
    }
    const double s_target = (s_init >= 0.0 ? 1.0 : -1.0) * ac.a0;

    const Transcription tr = build_transcription(bc, grid_size);
    const int n = tr.n;
    const int nz = kCoords * n;

    Eigen::VectorXd D(nz);
    for (int i = 0; i < kCoords; ++i) D.segment(i * n, n) = 2.0 * tr.w;
    const Eigen::VectorXd Dinv = D.cwiseInverse();

    // Interior grid rows carry the area equality; the endpoints are pinned by
    // the boundary conditions and checked above.
    const int m = n - 2;
    auto area_residual = [&](const Eigen::MatrixXd& p) {
        Eigen::VectorXd c(m);
        for (int k = 1; k <= m; ++k) c(k - 1) = signed_area_row(p, k) - s_target;
        return c;
    };
    auto area_jacobian = [&](const Eigen::MatrixXd& p) {
        Eigen::MatrixXd G = Eigen::MatrixXd::Zero(m, nz);
        for (int k = 1; k <= m; ++k) {
            const auto grad = area_gradient_row(p, k);
            for (int i = 0; i < kCoords; ++i) {
                G.block(k - 1, i * n, 1, n) = grad[i] * tr.P.row(k);
            }
        }
        return G;
    };

    // Unconstrained equality-QP optimum as the starting iterate.
    Eigen::VectorXd z = Eigen::VectorXd::Zero(nz);
    z += solve_kkt(Dinv, Eigen::MatrixXd(), 0.0, tr.A_eq, D.cwiseProduct(z),
                   tr.b_eq - tr.A_eq * z);

    Eigen::MatrixXd p = grid_positions(tr, z);
    Eigen::VectorXd c = area_residual(p);
    double max_viol = c.size() > 0 ? c.cwiseAbs().maxCoeff() : 0.0;
    int outer_used = 0;

    if (opts.enforce_area && max_viol > ac.area_tol) {
        Eigen::VectorXd lambda = Eigen::VectorXd::Zero(m);
        double mu = opts.initial_penalty;
        double J_prev = quadrature_cost(tr, z);
        double best_viol = max_viol;
        bool converged = false;

        auto merit = [&](const Eigen::VectorXd& zz) {
            const Eigen::VectorXd cc = area_residual(grid_positions(tr, zz));
            return quadrature_cost(tr, zz) + lambda.dot(cc) + 0.5 * mu * cc.squaredNorm();
        };

        for (int outer = 1; outer <= opts.max_outer; ++outer) {
            outer_used = outer;
            for (int inner = 0; inner < opts.max_inner; ++inner) {
                p = grid_positions(tr, z);
                c = area_residual(p);
                const Eigen::MatrixXd G = area_jacobian(p);
                const Eigen::VectorXd g =
                    D.cwiseProduct(z) + G.transpose() * (lambda + mu * c);
                const Eigen::VectorXd r = tr.b_eq - tr.A_eq * z;
                Eigen::VectorXd dz = solve_kkt(Dinv, G, mu, tr.A_eq, g, r);

                const double phi0 = merit(z);
                double step = 1.0;
                Eigen::VectorXd z_new = z + dz;
                for (int bt = 0; bt < 5 && merit(z_new) > phi0 + 1e-12; ++bt) {
                    step *= 0.5;
                    z_new = z + step * dz;
                }
                const double dz_inf = (step * dz).cwiseAbs().maxCoeff();
                z = z_new;
                if (dz_inf < 1e-12 * std::max(1.0, z.cwiseAbs().maxCoeff())) break;
            }
            p = grid_positions(tr, z);
            c = area_residual(p);
            max_viol = c.cwiseAbs().maxCoeff();
            const double J = quadrature_cost(tr, z);
            if (max_viol < ac.area_tol &&
                std::abs(J - J_prev) < opts.cost_change_tol * std::max(1.0, std::abs(J_prev))) {
                converged = true;
                break;
            }
            J_prev = J;
            lambda += mu * c;
            if (max_viol > 0.25 * best_viol) {
                mu = std::min(mu * opts.penalty_ramp, opts.max_penalty);
            }
            best_viol = std::min(best_viol, max_viol);
        }
        if (!converged && max_viol > ac.area_tol) {
            char buf[160];
            std::snprintf(buf, sizeof(buf),
                          "area-constrained solve exhausted %d outer iterations "
                          "(max violation %.3e, tolerance %.3e, penalty %.1e)",
                          opts.max_outer, max_viol, ac.area_tol, mu);
            throw NoConvergence(buf);
        }
    }

    LeaderTrajectory out = assemble(bc, tr, z, s_target);
    out.outer_iterations = outer_used;
    return out;
}

LeaderSample evaluate_trajectory(const LeaderTrajectory& traj, double t) {
    const int n = traj.grid_size();
    if (n < 2) {
        throw ValidationError("trajectory has no grid");
    }
    const double slack = 1e-9 * std::max(1.0, traj.tf - traj.t0);
    if (t < traj.t0 - slack || t > traj.tf + slack) {
        throw OutOfRange("trajectory evaluated outside [t0, tf]");
    }
    t = std::clamp(t, traj.t0, traj.tf);
    const double h = (traj.tf - traj.t0) / (n - 1);
    int k = std::min(static_cast<int>((t - traj.t0) / h), n - 2);
    const double s = (t - (traj.t0 + k * h)) / h;

    const double h00 = (2 * s - 3) * s * s + 1;
    const double h10 = ((s - 2) * s + 1) * s;
    const double h01 = (3 - 2 * s) * s * s;
    const double h11 = (s - 1) * s * s;
    const double d00 = 6 * s * (s - 1);
    const double d10 = (3 * s - 4) * s + 1;
    const double d11 = (3 * s - 2) * s;

    LeaderSample out;
    for (int l = 0; l < 3; ++l) {
        const Eigen::RowVector2d pk = traj.position[l].row(k);
        const Eigen::RowVector2d pk1 = traj.position[l].row(k + 1);
        const Eigen::RowVector2d vk = traj.velocity[l].row(k);
        const Eigen::RowVector2d vk1 = traj.velocity[l].row(k + 1);
        const Eigen::RowVector2d uk = traj.accel[l].row(k);
        const Eigen::RowVector2d uk1 = traj.accel[l].row(k + 1);
        out.position[l] = (h00 * pk + h01 * pk1 + h * (h10 * vk + h11 * vk1)).transpose();
        out.velocity[l] = ((d00 / h) * (pk - pk1) + d10 * vk + d11 * vk1).transpose();
        out.accel[l] = ((1 - s) * uk + s * uk1).transpose();
    }
    return out;
}

TimeSearchResult min_travel_time(const BoundaryConditions& bc, const AreaConstraint& ac,
                                 int grid_size, std::pair<double, double> T_bounds, double T_res,
                                 const std::function<bool(const LeaderTrajectory&)>& verifier,
                                 const PlannerOptions& opts) {
    const double T_lo = T_bounds.first;
    const double T_hi = T_bounds.second;
    if (!(T_res > 0.0)) {
        throw ValidationError("time search requires T_res > 0");
    }
    if (!(T_lo > 0.0) || !(T_hi > T_lo)) {
        throw BracketInvalid("time search requires 0 < T_lo < T_hi");
    }

    const int K = std::max(1, static_cast<int>(std::ceil((T_hi - T_lo) / T_res - 1e-9)));
    auto T_of = [&](int k) { return std::min(T_lo + k * T_res, T_hi); };

    TimeSearchResult result;
    std::map<int, LeaderTrajectory> feasible_cache;
    auto probe = [&](int k) {
        BoundaryConditions cand = bc;
        cand.tf = bc.t0 + T_of(k);
        bool ok = false;
        try {
            const LeaderTrajectory traj = plan_leader_trajectories(cand, ac, grid_size, opts);
            ok = verifier(traj);
            if (ok) feasible_cache[k] = traj;
        } catch (const NoConvergence&) {
            // An unplannable candidate duration is unverified, hence infeasible.
        }
        result.probes.emplace_back(T_of(k), ok);
        return ok;
    };

    if (!probe(K)) {
        throw UpperBoundInfeasible("upper travel-time bound failed the safety verifier");
    }
    int hi = K;
    if (probe(0)) {
        hi = 0;
    } else {
        int lo = 0;
        while (hi - lo > 1) {
            const int mid = lo + (hi - lo) / 2;
            if (probe(mid)) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    result.T_star = T_of(hi);
    result.trajectory = feasible_cache.at(hi);
    for (const auto& [Ta, oka] : result.probes) {
        for (const auto& [Tb, okb] : result.probes) {
            if (oka && !okb && Tb > Ta + 1e-12) result.monotone = false;
        }
    }
    return result;
}

}  // namespace contdef
