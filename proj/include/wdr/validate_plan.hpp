#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wdr/ambiguity_tube.hpp"
#include "wdr/geometry.hpp"
#include "wdr/linear_system.hpp"
#include "wdr/noise.hpp"

namespace wdr {

// Closed-loop Monte Carlo statistics for a motion plan against the hidden
// ground truth. Per-step frequencies with Wilson 95% intervals, plus the
// tube's worst-case bound when a tube is supplied so the conservatism is
// visible.
struct ValidationReport {
    int rollouts = 0;
    std::vector<double> collision_freq;          // per step
    std::vector<double> collision_wilson_hi;     // upper interval edge
    std::vector<double> control_violation_freq;  // per step (zero without a control set)
    double goal_freq = 0.0;
    double goal_wilson_lo = 0.0;
    std::vector<double> tube_worst_case_collision;  // optional, per step

    double max_collision_freq() const;
};

ValidationReport validate_plan(const MotionPlan& plan, const LinearSystem& sys,
                               const FeedbackLaw& law, const GroundTruth& gt, int rollouts,
                               const Environment& env, std::uint64_t seed,
                               AmbiguityTube* tube = nullptr);

std::string report_csv(const ValidationReport& report);

// Wilson score interval for a binomial proportion at 95% confidence.
std::pair<double, double> wilson_interval(double freq, int trials);

}  // namespace wdr
