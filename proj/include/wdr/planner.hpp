#pragma once

#include <cstdint>
#include <vector>

#include "wdr/linear_system.hpp"
#include "wdr/validity.hpp"

namespace wdr {

struct TreeNode {
    int id = 0;
    int parent = -1;
    Eigen::VectorXd x;  // reference state
    int t = 0;
    Eigen::VectorXd u_in;  // control held along the incoming edge
    int duration = 0;
    bool active = true;  // false once dominated in sparse mode
};

struct PlannerConfig {
    long long max_iterations = 200000;
    double timeout_s = 0.0;  // 0 disables the wall clock limit
    Eigen::VectorXd x_init;
    Eigen::VectorXd control_lo, control_hi;  // sampling box inside U
    std::vector<int> durations = {1, 2, 3, 4, 5};
    double goal_bias = 0.05;
    std::uint64_t seed = 0;
    CheckerKind checker = CheckerKind::Hybrid;
    bool sparse = false;         // witness-based node dominance (SST style)
    double witness_radius = 0.0;
    int bandit_bins = 10;

    void validate() const;
};

enum class PlanStatus { Solved, Timeout, InvalidStart };

struct PlanStats {
    long long iterations = 0;
    long long nodes = 0;
    CheckStats checks;
    double wall_s = 0.0;
};

struct PlanResult {
    PlanStatus status = PlanStatus::Timeout;
    MotionPlan plan;
    std::vector<TreeNode> tree;
    PlanStats stats;
};

// Grows a tree of reference states under the configured validity checker;
// returns the first plan whose terminal node passes the goal chance
// constraint. Deterministic given the seed when no wall clock limit is set.
PlanResult plan(const LinearSystem& sys, const FeedbackLaw& law, CheckerContext& ctx,
                const Environment& env, const PlannerConfig& cfg);

// Nearest active node by Euclidean distance on reference states, ties to the
// lowest id.
int select_nearest(const std::vector<TreeNode>& tree, const Eigen::VectorXd& x);

// Root-to-node plan with multi-step edges unrolled to unit steps.
MotionPlan extract_path(const LinearSystem& sys, const std::vector<TreeNode>& tree, int node_id);

int exit_code(PlanStatus status);

}  // namespace wdr
