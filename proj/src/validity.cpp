#include "wdr/validity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "json.hpp"
#include "wdr/io_util.hpp"

namespace wdr {

namespace {

// Greedy transport worth of the sorted distance profile. Returns the mass
// that remains un-transported (still "safe") given the budget.
double greedy_remaining_mass(std::vector<std::pair<double, double>>& dist_weight, double budget) {
    std::sort(dist_weight.begin(), dist_weight.end());
    double remaining = 0.0;
    for (const auto& [d, a] : dist_weight)
        if (d > 0.0) remaining += a;

    double cum = 0.0;
    for (const auto& [d, a] : dist_weight) {
        if (d <= 0.0) continue;  // already in the target set, nothing to move
        const double cost = a * d;
        if (cum + cost <= budget) {
            cum += cost;
            remaining -= a;
        } else {
            const double partial = (budget - cum) / d;
            remaining -= partial;
            break;
        }
    }
    return std::max(remaining, 0.0);
}

}  // namespace

double worst_case_prob_outside(const AmbiguitySet& amb, const SetExpr& s) {
    amb.center.validate();
    if (amb.radius < 0.0) throw std::invalid_argument("worst_case_prob_outside: negative radius");
    if (s.empty()) return 1.0;
    std::vector<std::pair<double, double>> dist_weight;
    dist_weight.reserve(static_cast<std::size_t>(amb.center.count()));
    for (int i = 0; i < amb.center.count(); ++i)
        dist_weight.emplace_back(dist_to_set(amb.center.point(i), s), amb.center.weights(i));
    return greedy_remaining_mass(dist_weight, amb.radius);
}

double worst_case_prob_inside(const AmbiguitySet& amb, const SetExpr& s) {
    amb.center.validate();
    if (amb.radius < 0.0) throw std::invalid_argument("worst_case_prob_inside: negative radius");
    std::vector<std::pair<double, double>> depth_weight;
    depth_weight.reserve(static_cast<std::size_t>(amb.center.count()));
    for (int i = 0; i < amb.center.count(); ++i)
        depth_weight.emplace_back(dist_to_complement(amb.center.point(i), s), amb.center.weights(i));
    return greedy_remaining_mass(depth_weight, amb.radius);
}

ConfidenceTube build_confidence_tube(AmbiguityTube& tube, double p_target) {
    if (!(p_target > 0.0 && p_target < 1.0))
        throw std::invalid_argument("build_confidence_tube: p_target must lie in (0,1)");
    ConfidenceTube conf;
    conf.p_target = p_target;
    conf.ball_radius.resize(static_cast<std::size_t>(tube.anchor_count()));

    for (int j = 0; j < tube.anchor_count(); ++j) {
        const double eps_bar = tube.sup_radius_by_anchor(j);
        const WeightedAtoms& center = tube.anchor(j).center;
        const AmbiguitySet set{center, eps_bar};

        double spread = 0.0;
        for (int i = 0; i < center.count(); ++i) spread = std::max(spread, center.point(i).norm());

        const double hi0 = (spread + eps_bar / (1.0 - p_target)) * 1.001 + 1e-12;
        auto mass_ok = [&](double r) {
            const SetExpr ball = make_ball(Eigen::VectorXd::Zero(center.dim()), r);
            return worst_case_prob_inside(set, ball) > p_target;
        };
        if (!mass_ok(hi0))
            throw std::runtime_error(
                "build_confidence_tube: p_target unreachable for anchor tau=" +
                std::to_string(tube.anchor(j).tau) +
                " (radius too large relative to the atom spread)");

        double lo = 0.0, hi = hi0;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mass_ok(mid))
                hi = mid;
            else
                lo = mid;
        }
        double r = hi + 1e-6 * std::max(hi0, 1.0);  // round up by the tolerance
        if (!mass_ok(r)) r = hi0;
        conf.ball_radius[static_cast<std::size_t>(j)] = r;
    }
    return conf;
}

void ConfidenceTube::save_file(const std::string& path) const {
    nlohmann::json j;
    j["version"] = 1;
    j["p_target"] = p_target;
    j["ball_radius"] = ball_radius;
    io::write_file(path, j.dump(2) + "\n");
}

ConfidenceTube ConfidenceTube::load_file(const std::string& path) {
    const nlohmann::json j = nlohmann::json::parse(io::read_file(path));
    if (j.at("version").get<int>() != 1) throw std::runtime_error("confidence tube: unsupported version");
    ConfidenceTube conf;
    conf.p_target = j.at("p_target").get<double>();
    conf.ball_radius = j.at("ball_radius").get<std::vector<double>>();
    return conf;
}

int BanditState::bin_for(double volume_fraction) const {
    const int idx = static_cast<int>(std::floor(volume_fraction * bins()));
    return std::clamp(idx, 0, bins() - 1);
}

namespace {

Eigen::VectorXd channel_point(const CheckChannel& ch, const Eigen::VectorXd& xbar) {
    return ch.tube->projection() * xbar;
}

SetExpr channel_obstacles(const CheckChannel& ch, const CheckerContext& ctx, const NodeQuery& node) {
    if (!ch.is_control) return ch.obstacles;
    if (!ctx.control) throw std::logic_error("control channel without a control constraint");
    return control_obstacle(*ctx.control, ctx.gain, node.xbar, node.ubar);
}

}  // namespace

bool check_exact(const NodeQuery& node, CheckerContext& ctx) {
    ctx.stats.exact_calls += 1;
    const int count = static_cast<int>(ctx.channels.size());
    double total = 0.0;
    for (auto& ch : ctx.channels) {
        const auto radius = ch.tube->radius_at(node.t);
        const SetExpr obs = channel_obstacles(ch, ctx, node);
        if (obs.empty()) {
            total += 1.0;
            continue;
        }
        const WeightedAtoms center = shift(ch.tube->anchor(radius.anchor).center, channel_point(ch, node.xbar));
        total += worst_case_prob_outside(AmbiguitySet{center, radius.eps}, obs);
    }
    return 1.0 - count + total > ctx.p_safe;
}

bool check_lazy(const NodeQuery& node, CheckerContext& ctx) {
    ctx.stats.lazy_calls += 1;
    for (auto& ch : ctx.channels) {
        if (ch.conf == nullptr) throw std::logic_error("lazy check requires confidence tubes");
        const SetExpr obs = channel_obstacles(ch, ctx, node);
        if (obs.empty()) continue;
        const int j = ch.tube->anchor_index_at(node.t);
        const double r = ch.conf->ball_radius[static_cast<std::size_t>(j)];
        if (ball_intersects(channel_point(ch, node.xbar), r, obs)) return false;
    }
    return true;
}

bool check_hybrid(const NodeQuery& node, CheckerContext& ctx) {
    if (check_lazy(node, ctx)) return true;
    return check_exact(node, ctx);
}

bool check_bandit(const NodeQuery& node, CheckerContext& ctx, BanditState& state, Rng& rng) {
    if (check_lazy(node, ctx)) return true;

    // volume fraction of the first obstructed confidence ball
    double fraction = 1.0;
    for (auto& ch : ctx.channels) {
        const SetExpr obs = channel_obstacles(ch, ctx, node);
        if (obs.empty()) continue;
        const int j = ch.tube->anchor_index_at(node.t);
        const double r = ch.conf->ball_radius[static_cast<std::size_t>(j)];
        const Eigen::VectorXd c = channel_point(ch, node.xbar);
        if (!ball_intersects(c, r, obs)) continue;
        ctx.stats.volume_calls += 1;
        fraction = volume_ratio(c, r, obs, ctx.vol_mc, rng.next_u64());
        break;
    }

    const int bin = state.bin_for(fraction);
    const double u = rng.uniform();
    const double p = rng.beta(state.succ[static_cast<std::size_t>(bin)],
                              state.fail[static_cast<std::size_t>(bin)]);
    if (u >= p) return false;

    const bool ok = check_exact(node, ctx);
    if (ok)
        state.succ[static_cast<std::size_t>(bin)] += 1.0;
    else
        state.fail[static_cast<std::size_t>(bin)] += 1.0;
    return ok;
}

bool check_goal_exact(const NodeQuery& node, CheckerContext& ctx) {
    const int count = static_cast<int>(ctx.channels.size());
    double total = 0.0;
    for (auto& ch : ctx.channels) {
        if (!ch.goal) {
            total += 1.0;
            continue;
        }
        const auto radius = ch.tube->radius_at(node.t);
        const WeightedAtoms center = shift(ch.tube->anchor(radius.anchor).center, channel_point(ch, node.xbar));
        total += worst_case_prob_inside(AmbiguitySet{center, radius.eps}, *ch.goal);
    }
    return 1.0 - count + total > ctx.p_safe;
}

bool check_goal_lazy(const NodeQuery& node, CheckerContext& ctx) {
    for (auto& ch : ctx.channels) {
        if (!ch.goal) continue;
        if (ch.conf == nullptr) throw std::logic_error("lazy goal check requires confidence tubes");
        const int j = ch.tube->anchor_index_at(node.t);
        const double r = ch.conf->ball_radius[static_cast<std::size_t>(j)];
        if (!ball_contained(channel_point(ch, node.xbar), r, *ch.goal)) return false;
    }
    return true;
}

bool check_goal_hybrid(const NodeQuery& node, CheckerContext& ctx) {
    if (check_goal_lazy(node, ctx)) return true;
    return check_goal_exact(node, ctx);
}

CheckerKind checker_from_string(const std::string& name) {
    if (name == "exact") return CheckerKind::Exact;
    if (name == "lazy") return CheckerKind::Lazy;
    if (name == "hybrid") return CheckerKind::Hybrid;
    if (name == "bandit") return CheckerKind::Bandit;
    throw std::invalid_argument("unknown checker: " + name);
}

std::string checker_name(CheckerKind kind) {
    switch (kind) {
        case CheckerKind::Exact: return "exact";
        case CheckerKind::Lazy: return "lazy";
        case CheckerKind::Hybrid: return "hybrid";
        case CheckerKind::Bandit: return "bandit";
    }
    return "unknown";
}

double lazy_mass_target(double p_safe, int channel_count) {
    // per-channel mass so the union bound over channels still certifies
    // P[safe] > p_safe
    return 1.0 - (1.0 - p_safe) / static_cast<double>(channel_count);
}

CheckerContext make_context(std::vector<AmbiguityTube*> tubes,
                            std::vector<const ConfidenceTube*> confs, const Environment& env,
                            const Eigen::MatrixXd& gain, double p_safe) {
    if (tubes.empty()) throw std::invalid_argument("make_context: no tubes");
    if (confs.size() != tubes.size() && !confs.empty())
        throw std::invalid_argument("make_context: confidence tube count mismatch");

    CheckerContext ctx;
    ctx.gain = gain;
    ctx.control = env.control;
    ctx.p_safe = p_safe;

    for (std::size_t l = 0; l < tubes.size(); ++l) {
        CheckChannel ch;
        ch.tube = tubes[l];
        ch.conf = confs.empty() ? nullptr : confs[l];

        // a channel whose projection is the feedback gain row space carries
        // the control constraint; all others see the workspace obstacles
        const bool control_channel =
            env.control && gain.size() > 0 &&
            tubes[l]->projection().rows() == gain.rows() &&
            (tubes[l]->projection() + gain).cwiseAbs().maxCoeff() < 1e-12;
        if (control_channel) {
            ch.is_control = true;
            ch.goal = std::nullopt;
        } else {
            ch.obstacles = env.obstacles;
            ch.goal = env.goal;
        }
        ctx.channels.push_back(std::move(ch));
    }
    return ctx;
}

}  // namespace wdr
