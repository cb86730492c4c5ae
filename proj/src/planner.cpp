#include "wdr/planner.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <stdexcept>

namespace wdr {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

struct GoalBox {
    Eigen::VectorXd lo, hi;
};

GoalBox goal_bounding_box(const SetExpr& goal) {
    require(goal.prims.size() == 1, "planner: goal must be a single primitive");
    const auto& prim = goal.prims.front();
    GoalBox box;
    if (const auto* b = std::get_if<BoxPrim>(&prim.var)) {
        box.lo = b->lo;
        box.hi = b->hi;
    } else if (const auto* b = std::get_if<BallPrim>(&prim.var)) {
        box.lo = b->center.array() - b->radius;
        box.hi = b->center.array() + b->radius;
    } else if (const auto* poly = std::get_if<PolygonPrim>(&prim.var)) {
        box.lo = Eigen::Vector2d::Constant(std::numeric_limits<double>::infinity());
        box.hi = Eigen::Vector2d::Constant(-std::numeric_limits<double>::infinity());
        for (const auto& v : poly->verts) {
            box.lo = box.lo.cwiseMin(Eigen::VectorXd(v));
            box.hi = box.hi.cwiseMax(Eigen::VectorXd(v));
        }
    } else {
        throw std::invalid_argument("planner: unsupported goal primitive for sampling");
    }
    return box;
}

class Sampler {
public:
    Sampler(const Environment& env, const PlannerConfig& cfg, Rng& rng)
        : env_(env), cfg_(cfg), rng_(rng), goal_box_(goal_bounding_box(env.goal)) {}

    Eigen::VectorXd sample_state() {
        const int n = static_cast<int>(env_.state_lo.size());
        Eigen::VectorXd x(n);
        if (cfg_.goal_bias > 0.0 && rng_.uniform() < cfg_.goal_bias) {
            // position components from the goal region, rest uniform
            const int gdim = static_cast<int>(goal_box_.lo.size());
            Eigen::VectorXd g(gdim);
            for (int tries = 0; tries < 64; ++tries) {
                for (int i = 0; i < gdim; ++i) g(i) = rng_.uniform(goal_box_.lo(i), goal_box_.hi(i));
                if (dist_to_set_projected(g) == 0.0) break;
            }
            for (int i = 0; i < n; ++i)
                x(i) = i < gdim ? g(i) : rng_.uniform(env_.state_lo(i), env_.state_hi(i));
            return x;
        }
        for (int i = 0; i < n; ++i) x(i) = rng_.uniform(env_.state_lo(i), env_.state_hi(i));
        return x;
    }

    Eigen::VectorXd sample_control() {
        const int m = static_cast<int>(cfg_.control_lo.size());
        Eigen::VectorXd u(m);
        for (int i = 0; i < m; ++i) u(i) = rng_.uniform(cfg_.control_lo(i), cfg_.control_hi(i));
        return u;
    }

    int sample_duration() {
        return cfg_.durations[static_cast<std::size_t>(
            rng_.uniform_index(static_cast<std::uint64_t>(cfg_.durations.size())))];
    }

private:
    double dist_to_set_projected(const Eigen::VectorXd& g) {
        // goal primitives carry coordinate tags against the full state; query
        // them with a padded vector
        Eigen::VectorXd padded = Eigen::VectorXd::Zero(env_.state_lo.size());
        padded.head(g.size()) = g;
        return dist_to_set(padded, env_.goal);
    }

    const Environment& env_;
    const PlannerConfig& cfg_;
    Rng& rng_;
    GoalBox goal_box_;
};

}  // namespace

void PlannerConfig::validate() const {
    require(max_iterations > 0, "PlannerConfig: iteration budget must be > 0");
    require(!durations.empty(), "PlannerConfig: duration set must be nonempty");
    for (int d : durations) require(d >= 1, "PlannerConfig: durations must be >= 1");
    require(goal_bias >= 0.0 && goal_bias < 1.0, "PlannerConfig: goal bias must lie in [0,1)");
    require(control_lo.size() == control_hi.size() && control_lo.size() > 0,
            "PlannerConfig: control bounds missing");
    require((control_lo.array() <= control_hi.array()).all(),
            "PlannerConfig: control bounds inverted");
    require(x_init.size() > 0, "PlannerConfig: x_init missing");
    require(timeout_s >= 0.0, "PlannerConfig: negative timeout");
}

int select_nearest(const std::vector<TreeNode>& tree, const Eigen::VectorXd& x) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& node : tree) {
        if (!node.active) continue;
        const double d = (node.x - x).squaredNorm();
        if (d < best_d) {  // strict: ties keep the lowest id
            best_d = d;
            best = node.id;
        }
    }
    if (best < 0) throw std::logic_error("select_nearest: no active nodes");
    return best;
}

MotionPlan extract_path(const LinearSystem& sys, const std::vector<TreeNode>& tree, int node_id) {
    if (node_id < 0 || node_id >= static_cast<int>(tree.size()))
        throw std::invalid_argument("extract_path: node not in tree");
    std::vector<int> chain;
    for (int id = node_id; id >= 0; id = tree[static_cast<std::size_t>(id)].parent)
        chain.push_back(id);
    std::reverse(chain.begin(), chain.end());

    MotionPlan plan;
    const TreeNode& root = tree[static_cast<std::size_t>(chain.front())];
    Eigen::VectorXd x = root.x;
    for (std::size_t k = 1; k < chain.size(); ++k) {
        const TreeNode& node = tree[static_cast<std::size_t>(chain[k])];
        for (int step = 0; step < node.duration; ++step) {
            plan.steps.push_back(MotionPlanStep{node.u_in, x});
            x = reference_step(sys, x, node.u_in);
        }
    }
    plan.steps.push_back(MotionPlanStep{Eigen::VectorXd::Zero(sys.m()), x});
    return plan;
}

PlanResult plan(const LinearSystem& sys, const FeedbackLaw& law, CheckerContext& ctx,
                const Environment& env, const PlannerConfig& cfg) {
    sys.validate();
    cfg.validate();
    for (auto& ch : ctx.channels) ch.tube->check_compatible(sys, law);

    const auto t_start = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    };

    Rng rng(cfg.seed);
    BanditState bandit(cfg.bandit_bins);

    auto valid = [&](const NodeQuery& q) {
        switch (cfg.checker) {
            case CheckerKind::Exact: return check_exact(q, ctx);
            case CheckerKind::Lazy: return check_lazy(q, ctx);
            case CheckerKind::Hybrid: return check_hybrid(q, ctx);
            case CheckerKind::Bandit: return check_bandit(q, ctx, bandit, rng);
        }
        return false;
    };
    auto goal_ok = [&](const NodeQuery& q) {
        switch (cfg.checker) {
            case CheckerKind::Exact: return check_goal_exact(q, ctx);
            case CheckerKind::Lazy: return check_goal_lazy(q, ctx);
            default: return check_goal_hybrid(q, ctx);
        }
    };

    PlanResult result;
    const Eigen::VectorXd u_zero = Eigen::VectorXd::Zero(sys.m());

    const NodeQuery start_query{0, cfg.x_init, u_zero};
    if (!valid(start_query)) {
        result.status = PlanStatus::InvalidStart;
        result.stats.wall_s = elapsed();
        return result;
    }

    std::vector<TreeNode> tree;
    tree.push_back(TreeNode{0, -1, cfg.x_init, 0, u_zero, 0, true});

    if (goal_ok(start_query)) {
        result.status = PlanStatus::Solved;
        result.plan = extract_path(sys, tree, 0);
        result.tree = tree;
        result.stats.nodes = 1;
        result.stats.checks = ctx.stats;
        result.stats.wall_s = elapsed();
        return result;
    }

    // witness set for sparse mode: representative state and incumbent node
    std::vector<std::pair<Eigen::VectorXd, int>> witnesses;
    if (cfg.sparse) witnesses.emplace_back(cfg.x_init, 0);

    Sampler sampler(env, cfg, rng);
    long long iterations = 0;
    for (; iterations < cfg.max_iterations; ++iterations) {
        if (cfg.timeout_s > 0.0 && elapsed() > cfg.timeout_s) break;

        const Eigen::VectorXd x_rand = sampler.sample_state();
        const Eigen::VectorXd u_rand = sampler.sample_control();
        const int duration = sampler.sample_duration();
        const int parent_id = select_nearest(tree, x_rand);
        const TreeNode& parent = tree[static_cast<std::size_t>(parent_id)];

        // per-step chance constraints along the whole extension; reference
        // states must stay inside the state-space bounds (discrete-time
        // checking would otherwise tunnel through thin obstacles at speed)
        Eigen::VectorXd x = parent.x;
        int t = parent.t;
        bool ok = true;
        for (int step = 0; step < duration; ++step) {
            x = reference_step(sys, x, u_rand);
            t += 1;
            if ((x.array() < env.state_lo.array()).any() ||
                (x.array() > env.state_hi.array()).any()) {
                ok = false;
                break;
            }
            if (!valid(NodeQuery{t, x, u_rand})) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;

        if (cfg.sparse && cfg.witness_radius > 0.0) {
            int witness = -1;
            for (std::size_t widx = 0; widx < witnesses.size(); ++widx)
                if ((witnesses[widx].first - x).norm() <= cfg.witness_radius) {
                    witness = static_cast<int>(widx);
                    break;
                }
            if (witness < 0) {
                witnesses.emplace_back(x, static_cast<int>(tree.size()));
            } else {
                TreeNode& incumbent = tree[static_cast<std::size_t>(witnesses[static_cast<std::size_t>(witness)].second)];
                if (incumbent.t <= t) continue;  // dominated: slower arrival at a nearby state
                incumbent.active = false;
                witnesses[static_cast<std::size_t>(witness)].second = static_cast<int>(tree.size());
            }
        }

        const int id = static_cast<int>(tree.size());
        tree.push_back(TreeNode{id, parent_id, x, t, u_rand, duration, true});

        if (goal_ok(NodeQuery{t, x, u_rand})) {
            result.status = PlanStatus::Solved;
            result.plan = extract_path(sys, tree, id);
            break;
        }
    }

    result.tree = std::move(tree);
    result.stats.iterations = iterations;
    result.stats.nodes = 0;
    for (const auto& node : result.tree)
        if (node.active) result.stats.nodes += 1;
    result.stats.checks = ctx.stats;
    result.stats.wall_s = elapsed();
    return result;
}

int exit_code(PlanStatus status) {
    switch (status) {
        case PlanStatus::Solved: return 0;
        case PlanStatus::Timeout: return 10;
        case PlanStatus::InvalidStart: return 11;
    }
    return 1;
}

}  // namespace wdr
