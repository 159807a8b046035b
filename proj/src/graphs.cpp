#include "contdef/graphs.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <queue>
#include <sstream>

namespace contdef {

const std::array<int, 3>& GraphSpec::neighbors_of(int follower_id) const {
    auto it = in_neighbors.find(follower_id);
    if (it == in_neighbors.end())
        throw Error("GraphSpec: no in-neighbor triple for agent " + std::to_string(follower_id));
    return it->second;
}

std::string AssumptionReport::describe() const {
    std::ostringstream os;
    auto list = [&os](const char* label, const std::vector<int>& ids) {
        os << label;
        for (size_t i = 0; i < ids.size(); ++i) os << (i ? "," : " ") << ids[i];
    };
    if (!leaders_triangle) os << "[1] leaders collinear ";
    if (!neighbor_triangles) list("[2] degenerate in-neighbor triangle for", degenerate_neighbor_triangles);
    if (!followers_contained) list(" [3] follower outside in-neighbor triangle:", uncontained_followers);
    if (!leaders_reach_all) list(" [4] unreachable from some leader:", unreachable_followers);
    if (all_pass()) os << "all assumptions hold";
    return os.str();
}

std::array<double, 3> WeightMatrix::row_weights(const GraphSpec& g, int follower_id) const {
    const auto& nbrs = g.neighbors_of(follower_id);
    std::array<double, 3> out;
    for (int k = 0; k < 3; ++k) out[k] = W(follower_id - kNumLeaders - 1, nbrs[k] - 1);
    return out;
}

namespace {

// Multi-source check of assumption 4: every follower must be reachable from
// every leader along coordination edges (in-neighbor -> follower).
std::vector<int> unreachable_from_any_leader(const GraphSpec& g) {
    const int n = g.num_agents;
    std::vector<std::vector<int>> out_edges(n + 1);
    for (const auto& [follower, nbrs] : g.in_neighbors)
        for (int j : nbrs) out_edges[j].push_back(follower);

    std::vector<int> reach_count(n + 1, 0);
    for (int leader = 1; leader <= kNumLeaders; ++leader) {
        std::vector<char> seen(n + 1, 0);
        std::queue<int> q;
        q.push(leader);
        seen[leader] = 1;
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (int v : out_edges[u])
                if (!seen[v]) {
                    seen[v] = 1;
                    q.push(v);
                }
        }
        for (int i = kNumLeaders + 1; i <= n; ++i) reach_count[i] += seen[i];
    }
    std::vector<int> bad;
    for (int i = kNumLeaders + 1; i <= n; ++i)
        if (reach_count[i] < kNumLeaders) bad.push_back(i);
    return bad;
}

}  // namespace

AssumptionReport validate_assumptions(const GraphSpec& g,
                                      const std::vector<Point2>& ref_positions) {
    if (static_cast<int>(ref_positions.size()) != g.num_agents)
        throw Error("validate_assumptions: need a reference position for every agent");

    AssumptionReport rep;
    rep.leaders_triangle =
        std::abs(signed_area(ref_positions[0], ref_positions[1], ref_positions[2])) >=
        kDegenerateAreaTol;

    rep.neighbor_triangles = true;
    rep.followers_contained = true;
    for (int f = kNumLeaders + 1; f <= g.num_agents; ++f) {
        const auto& nbrs = g.neighbors_of(f);
        const Point2& a = ref_positions[nbrs[0] - 1];
        const Point2& b = ref_positions[nbrs[1] - 1];
        const Point2& c = ref_positions[nbrs[2] - 1];
        if (std::abs(signed_area(a, b, c)) < kDegenerateAreaTol) {
            rep.neighbor_triangles = false;
            rep.degenerate_neighbor_triangles.push_back(f);
            continue;  // containment undefined for a degenerate triangle
        }
        const auto w = barycentric_coords(ref_positions[f - 1], Triangle(a, b, c));
        if (!w.inside(kContainmentMargin)) {
            rep.followers_contained = false;
            rep.uncontained_followers.push_back(f);
        }
    }

    rep.unreachable_followers = unreachable_from_any_leader(g);
    rep.leaders_reach_all = rep.unreachable_followers.empty();
    return rep;
}

WeightMatrix build_weight_matrix(const GraphSpec& g,
                                 const std::vector<Point2>& ref_positions) {
    AssumptionReport rep = validate_assumptions(g, ref_positions);
    if (!rep.all_pass()) throw AssumptionViolation(std::move(rep));

    const int n = g.num_agents;
    const int rows = num_followers(n);
    WeightMatrix wm;
    wm.num_agents = n;
    wm.W = Eigen::MatrixXd::Zero(rows, n);
    for (int f = kNumLeaders + 1; f <= n; ++f) {
        const auto& nbrs = g.neighbors_of(f);
        const Triangle tri(ref_positions[nbrs[0] - 1], ref_positions[nbrs[1] - 1],
                           ref_positions[nbrs[2] - 1]);
        const auto w = barycentric_coords(ref_positions[f - 1], tri);
        const int row = f - kNumLeaders - 1;
        for (int k = 0; k < 3; ++k) wm.W(row, nbrs[k] - 1) = w.alpha[k];
        wm.W(row, f - 1) = -1.0;
    }
    wm.B = wm.W.leftCols(kNumLeaders);
    wm.A = wm.W.rightCols(rows);
    return wm;
}

AMatrixProperties check_A_properties(const WeightMatrix& w) {
    AMatrixProperties p;
    p.diag_minus_one = (w.A.diagonal().array() == -1.0).all();
    p.nonneg_offdiag = true;
    for (int i = 0; i < w.A.rows(); ++i)
        for (int j = 0; j < w.A.cols(); ++j)
            if (i != j && w.A(i, j) < 0.0) p.nonneg_offdiag = false;
    if (w.B.size() > 0 && w.B.minCoeff() < 0.0) p.nonneg_offdiag = false;

    const Eigen::EigenSolver<Eigen::MatrixXd> es(w.A, /*computeEigenvectors=*/false);
    p.spectral_abscissa = es.eigenvalues().real().maxCoeff();
    return p;
}

}  // namespace contdef
