#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wdr/ambiguity_tube.hpp"
#include "wdr/geometry.hpp"
#include "wdr/rng.hpp"
#include "wdr/weighted_atoms.hpp"

namespace wdr {

// Exact minimum of P[x outside S] over the Wasserstein ball, by greedy mass
// transport toward S: atoms sorted by distance, full atoms moved while the
// budget lasts, then the affordable fraction of the next one. Atoms already
// in S contribute no safe mass and no cost.
double worst_case_prob_outside(const AmbiguitySet& amb, const SetExpr& s);

// Mirror image for the goal test: minimum of P[x inside S] when the
// adversary pushes mass out through the boundary. S must be convex.
double worst_case_prob_inside(const AmbiguitySet& amb, const SetExpr& s);

// Origin-centered balls, one per anchor region, each holding more than
// p_target worst-case probability mass of the error at every time the
// region covers.
struct ConfidenceTube {
    std::vector<double> ball_radius;  // per anchor of the owning tube
    double p_target = 0.0;

    void save_file(const std::string& path) const;
    static ConfidenceTube load_file(const std::string& path);
};

// Smallest radii (bisection, 1e-6 relative tolerance, rounded up and
// re-verified) with worst_case_prob_inside(ball) > p_target against each
// anchor's largest regional radius. Throws when p_target cannot be met.
ConfidenceTube build_confidence_tube(AmbiguityTube& tube, double p_target);

// Per-bin Thompson posterior over "the exact checker overturns the lazy
// reject", keyed by the obstructed volume fraction of the confidence ball.
struct BanditState {
    std::vector<double> succ;
    std::vector<double> fail;

    explicit BanditState(int n_bins = 10)
        : succ(static_cast<std::size_t>(n_bins), 1.0), fail(static_cast<std::size_t>(n_bins), 1.0) {}

    int bins() const { return static_cast<int>(succ.size()); }
    int bin_for(double volume_fraction) const;
};

struct NodeQuery {
    int t = 0;
    Eigen::VectorXd xbar;
    Eigen::VectorXd ubar;
};

// One projected constraint space: the tube for M_l e_t, its confidence
// radii, and the obstacle/goal sets expressed in that space. A control
// channel builds its obstacle from the query's (xbar, ubar).
struct CheckChannel {
    AmbiguityTube* tube = nullptr;
    const ConfidenceTube* conf = nullptr;
    SetExpr obstacles;               // empty means unobstructed
    std::optional<SetExpr> goal;     // nullopt means the whole space
    bool is_control = false;
};

struct CheckStats {
    long long lazy_calls = 0;
    long long exact_calls = 0;
    long long volume_calls = 0;
};

struct CheckerContext {
    std::vector<CheckChannel> channels;
    Eigen::MatrixXd gain;            // K, for control channels
    std::optional<ControlConstraint> control;
    double p_safe = 0.99;
    int vol_mc = 2048;
    CheckStats stats;
};

// Sum test over the channels: 1 - L + sum_l alpha_l > p_safe with alpha_l
// the exact worst-case non-collision probability in channel l. Reduces to
// the plain transport check at L = 1.
bool check_exact(const NodeQuery& node, CheckerContext& ctx);

// Confidence-ball miss test per channel; conservative and fast.
bool check_lazy(const NodeQuery& node, CheckerContext& ctx);

// Lazy first, exact on lazy reject.
bool check_hybrid(const NodeQuery& node, CheckerContext& ctx);

// Lazy first; on reject, Thompson-sample whether the exact checker is worth
// invoking, binned by the obstructed volume fraction. State mutates only
// when the exact checker runs.
bool check_bandit(const NodeQuery& node, CheckerContext& ctx, BanditState& state, Rng& rng);

// Goal variants (terminal chance constraint).
bool check_goal_exact(const NodeQuery& node, CheckerContext& ctx);
bool check_goal_lazy(const NodeQuery& node, CheckerContext& ctx);
bool check_goal_hybrid(const NodeQuery& node, CheckerContext& ctx);

enum class CheckerKind { Exact, Lazy, Hybrid, Bandit };

CheckerKind checker_from_string(const std::string& name);
std::string checker_name(CheckerKind kind);

// Assembles the channels for an environment: the workspace tube plus,
// when the environment constrains the control, a feedback-projection tube.
// Confidence radii certify mass 1 - (1 - p_safe) / L per channel so the
// lazy accept stays sound for any L.
CheckerContext make_context(std::vector<AmbiguityTube*> tubes,
                            std::vector<const ConfidenceTube*> confs, const Environment& env,
                            const Eigen::MatrixXd& gain, double p_safe);

double lazy_mass_target(double p_safe, int channel_count);

}  // namespace wdr
