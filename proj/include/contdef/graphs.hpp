#pragma once

#include <Eigen/Core>

#include <array>
#include <map>
#include <string>
#include <vector>

#include "contdef/geometry.hpp"

namespace contdef {

// Agent ids are 1-based throughout the public API; agents 1..3 are the
// leaders, 4..N the followers.
inline constexpr int kNumLeaders = 3;

inline int num_followers(int num_agents) { return num_agents - kNumLeaders; }
inline bool is_leader(int agent_id) { return agent_id >= 1 && agent_id <= kNumLeaders; }

// A localization edge: observer takes a relative measurement of target every
// `period` update steps.
struct LocalizationEdge {
    int observer;
    int target;
    int period = 1;
};

// Static topology of the coordination and localization digraphs. Followers
// carry an explicit ordered in-neighbor triple so the containment checks are
// unambiguous.
struct GraphSpec {
    int num_agents = 0;
    std::map<int, std::array<int, 3>> in_neighbors;  // follower id -> triple
    std::vector<LocalizationEdge> localization_edges;
    std::vector<int> self_measuring;  // leaders with absolute self measurement

    const std::array<int, 3>& neighbors_of(int follower_id) const;
};

// Pass/fail verdicts for the four structural assumptions, with the agents
// that break them.
struct AssumptionReport {
    bool leaders_triangle = false;             // assumption 1
    bool neighbor_triangles = false;           // assumption 2
    bool followers_contained = false;          // assumption 3
    bool leaders_reach_all = false;            // assumption 4
    std::vector<int> degenerate_neighbor_triangles;
    std::vector<int> uncontained_followers;
    std::vector<int> unreachable_followers;

    bool all_pass() const {
        return leaders_triangle && neighbor_triangles && followers_contained &&
               leaders_reach_all;
    }
    std::string describe() const;
};

struct AssumptionViolation : Error {
    AssumptionReport report;
    explicit AssumptionViolation(AssumptionReport r)
        : Error("assumption violation: " + r.describe()), report(std::move(r)) {}
};

// The partitioned weight matrix W = [B A] over the coordination graph.
// Row f (0-based) belongs to follower f+4; diag(A) = -1, everything else in
// [B A] is nonnegative, and each row of W sums to zero.
struct WeightMatrix {
    int num_agents = 0;
    Eigen::MatrixXd W;  // (N-3) x N
    Eigen::MatrixXd B;  // (N-3) x 3
    Eigen::MatrixXd A;  // (N-3) x (N-3)

    int rows() const { return num_agents - kNumLeaders; }
    // Communication weights of follower `follower_id` toward its ordered
    // in-neighbor triple.
    std::array<double, 3> row_weights(const GraphSpec& g, int follower_id) const;
};

struct AMatrixProperties {
    bool diag_minus_one = false;
    bool nonneg_offdiag = false;
    double spectral_abscissa = 0.0;  // max real part of eig(A)
    bool hurwitz() const { return spectral_abscissa < 0.0; }
};

// Strict-containment margin for assumption 3 (barycentric coordinates must
// exceed this).
inline constexpr double kContainmentMargin = 1e-9;

AssumptionReport validate_assumptions(const GraphSpec& g,
                                      const std::vector<Point2>& ref_positions);

// Builds W = [B A] with reference-consistent weights (each follower row is
// the barycentric coordinates of the follower w.r.t. its in-neighbor
// triangle). Throws AssumptionViolation when validate_assumptions fails.
WeightMatrix build_weight_matrix(const GraphSpec& g,
                                 const std::vector<Point2>& ref_positions);

AMatrixProperties check_A_properties(const WeightMatrix& w);

}  // namespace contdef
