#include "wdr/validate_plan.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "wdr/validity.hpp"

namespace wdr {

double ValidationReport::max_collision_freq() const {
    double worst = 0.0;
    for (double f : collision_freq) worst = std::max(worst, f);
    return worst;
}

std::pair<double, double> wilson_interval(double freq, int trials) {
    const double z = 1.959963984540054;  // 97.5% quantile
    const double n = static_cast<double>(trials);
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (freq + z2 / (2.0 * n)) / denom;
    const double margin = z * std::sqrt(freq * (1.0 - freq) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(center - margin, 0.0), std::min(center + margin, 1.0)};
}

ValidationReport validate_plan(const MotionPlan& plan, const LinearSystem& sys,
                               const FeedbackLaw& law, const GroundTruth& gt, int rollouts,
                               const Environment& env, std::uint64_t seed, AmbiguityTube* tube) {
    if (rollouts < 1) throw std::invalid_argument("validate_plan: rollouts must be >= 1");
    if (plan.steps.empty()) throw std::invalid_argument("validate_plan: empty plan");
    sys.validate();

    const int horizon = plan.horizon();
    const Eigen::MatrixXd acl = law.closed_loop(sys);

    std::vector<long long> collisions(static_cast<std::size_t>(horizon) + 1, 0);
    std::vector<long long> control_violations(static_cast<std::size_t>(horizon) + 1, 0);
    long long goal_hits = 0;

    Rng rng(seed);
    for (int rollout = 0; rollout < rollouts; ++rollout) {
        const Eigen::MatrixXd e0 = sample_noise(gt.p0, rng, 1);
        Eigen::VectorXd x = plan.steps.front().x + e0.row(0).transpose();
        for (int t = 0; t <= horizon; ++t) {
            if (!env.obstacles.empty() && dist_to_set(x, env.obstacles) == 0.0)
                collisions[static_cast<std::size_t>(t)] += 1;
            if (env.control) {
                const Eigen::VectorXd u_fb =
                    -law.K * (x - plan.steps[static_cast<std::size_t>(t)].x) +
                    plan.steps[static_cast<std::size_t>(t)].u;
                if (dist_to_set(u_fb, env.control->u_set) > 0.0)
                    control_violations[static_cast<std::size_t>(t)] += 1;
            }
            if (t == horizon) break;
            const Eigen::MatrixXd w = sample_noise(gt.pw, rng, 1);
            x = acl * x +
                sys.B * (law.K * plan.steps[static_cast<std::size_t>(t)].x +
                         plan.steps[static_cast<std::size_t>(t)].u) +
                sys.G * w.row(0).transpose();
        }
        if (dist_to_set(x, env.goal) == 0.0) goal_hits += 1;
    }

    ValidationReport report;
    report.rollouts = rollouts;
    report.collision_freq.resize(static_cast<std::size_t>(horizon) + 1);
    report.collision_wilson_hi.resize(static_cast<std::size_t>(horizon) + 1);
    report.control_violation_freq.resize(static_cast<std::size_t>(horizon) + 1);
    for (int t = 0; t <= horizon; ++t) {
        const double freq =
            static_cast<double>(collisions[static_cast<std::size_t>(t)]) / rollouts;
        report.collision_freq[static_cast<std::size_t>(t)] = freq;
        report.collision_wilson_hi[static_cast<std::size_t>(t)] = wilson_interval(freq, rollouts).second;
        report.control_violation_freq[static_cast<std::size_t>(t)] =
            static_cast<double>(control_violations[static_cast<std::size_t>(t)]) / rollouts;
    }
    report.goal_freq = static_cast<double>(goal_hits) / rollouts;
    report.goal_wilson_lo = wilson_interval(report.goal_freq, rollouts).first;

    if (tube != nullptr && !env.obstacles.empty()) {
        report.tube_worst_case_collision.resize(static_cast<std::size_t>(horizon) + 1);
        for (int t = 0; t <= horizon; ++t) {
            const auto radius = tube->radius_at(t);
            const WeightedAtoms center =
                shift(tube->anchor(radius.anchor).center,
                      tube->projection() * plan.steps[static_cast<std::size_t>(t)].x);
            const double safe = worst_case_prob_outside(AmbiguitySet{center, radius.eps}, env.obstacles);
            report.tube_worst_case_collision[static_cast<std::size_t>(t)] = 1.0 - safe;
        }
    }
    return report;
}

std::string report_csv(const ValidationReport& report) {
    std::ostringstream out;
    out.precision(17);
    out << "t,collision_freq,collision_wilson_hi,control_violation_freq,tube_worst_case\n";
    for (std::size_t t = 0; t < report.collision_freq.size(); ++t) {
        out << t << ',' << report.collision_freq[t] << ',' << report.collision_wilson_hi[t] << ','
            << report.control_violation_freq[t] << ',';
        if (t < report.tube_worst_case_collision.size())
            out << report.tube_worst_case_collision[t];
        out << '\n';
    }
    out << "goal," << report.goal_freq << ',' << report.goal_wilson_lo << ",,\n";
    return out.str();
}

}  // namespace wdr
