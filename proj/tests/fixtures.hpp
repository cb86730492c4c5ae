#pragma once

#include <vector>

#include "wdr/ambiguity_tube.hpp"
#include "wdr/data_archive.hpp"
#include "wdr/formats.hpp"
#include "wdr/geometry.hpp"
#include "wdr/noise.hpp"
#include "wdr/planner.hpp"
#include "wdr/validity.hpp"

// Shared builders for the 4-D planar double integrator used across the
// planner tests and the acceptance suite.
namespace fixtures {

struct Stack {
    wdr::SystemFile sf;
    wdr::GroundTruth gt;
    std::vector<int> taus;
    wdr::TubeSpec spec;
    wdr::AmbiguityTube tube;
    wdr::ConfidenceTube conf;
};

// Planar double integrator: state (x, y, vx, vy), acceleration control,
// velocity disturbances.
wdr::SystemFile make_di4(double dt = 0.25);

wdr::GroundTruth gaussian_gt(double scale);
wdr::GroundTruth pushforward_gt(double scale);

// Workspace projection (first two state coordinates).
Eigen::MatrixXd workspace_projection(int state_dim);

// Generates data, estimates moments and builds the workspace-projected tube
// plus its confidence radii.
Stack build_di4_stack(const wdr::GroundTruth& gt, long long samples, double beta, int cluster_k,
                      double p_safe, std::uint64_t seed, const std::vector<int>& taus = {});

wdr::PlannerConfig base_config(const wdr::SystemFile& sf, std::uint64_t seed);

// Planar drone stand-in: per axis a chain position -> velocity -> tilt ->
// tilt rate, driven by a small torque-like control; state ordering
// (px, py, vx, vy, tx, ty, wx, wy), disturbances kick the velocities.
wdr::SystemFile make_drone8(double dt = 0.5);

wdr::GroundTruth drone_gt(double scale);

}  // namespace fixtures
