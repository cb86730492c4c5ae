#pragma once

#include <Eigen/Dense>
#include <variant>

#include "wdr/rng.hpp"

namespace wdr {

// Gaussian resampled until the whitened draw lies within trunc_sd standard
// deviations. Singular covariances are handled through their eigenbasis.
struct TruncatedGaussian {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    double trunc_sd = 4.0;
};

// Bivariate map (w1, w2) -> amplitude * w1^radial_exponent * sqrt(scale) *
// (cos 2 pi w2, sin 2 pi w2) applied to independent uniforms.
struct PushforwardUniform {
    Eigen::MatrixXd scale;  // 2 x 2, symmetric PSD
    double amplitude = 4.0;
    double radial_exponent = 0.25;
};

struct PointMass {
    Eigen::VectorXd value;
};

using NoiseModel = std::variant<TruncatedGaussian, PushforwardUniform, PointMass>;

int noise_dim(const NoiseModel& model);
void validate_noise(const NoiseModel& model);

// One sample per row.
Eigen::MatrixXd sample_noise(const NoiseModel& model, Rng& rng, int count);

// Diameter of the support (an upper bound where the support is an ellipsoid).
double noise_support_diameter(const NoiseModel& model);

// Hidden-from-planner distributions of the initial error and the
// disturbance.
struct GroundTruth {
    NoiseModel p0;
    NoiseModel pw;
};

}  // namespace wdr
