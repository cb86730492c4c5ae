#pragma once

#include <string>
#include <vector>

#include "wdr/ambiguity_tube.hpp"
#include "wdr/linear_system.hpp"
#include "wdr/noise.hpp"

namespace wdr {

// Error-trajectory sample archive: a directory holding a manifest plus one
// packed binary block per anchor time, the initial errors and the first-step
// disturbances (the latter two feed the moment estimates).
struct ArchiveManifest {
    int version = 1;
    int n = 0;
    int d = 0;
    long long count = 0;
    std::vector<int> taus;
    std::uint64_t seed = 0;
};

// Simulates `count` error trajectories through e_{t+1} = A_cl e_t + G w_t,
// recording the error at every anchor time. Streams to disk in chunks.
void generate_error_archive(const std::string& dir, const LinearSystem& sys,
                            const FeedbackLaw& law, const GroundTruth& gt, long long count,
                            const std::vector<int>& taus, std::uint64_t seed);

ArchiveManifest read_manifest(const std::string& dir);

Eigen::MatrixXd load_block(const std::string& dir, const std::string& name);

std::vector<AnchorSamples> load_anchor_samples(const std::string& dir);

// In-memory variant for tests and small runs.
struct ErrorData {
    Eigen::MatrixXd e0;  // count x n
    Eigen::MatrixXd w;   // count x d
    std::vector<AnchorSamples> anchors;
};

ErrorData generate_error_data(const LinearSystem& sys, const FeedbackLaw& law,
                              const GroundTruth& gt, long long count, const std::vector<int>& taus,
                              std::uint64_t seed);

// Moment upper bounds for the radius dynamics via the empirical p-th power
// average plus its deviation term, each at confidence 1 - beta_moments / 2.
struct MomentBounds {
    double p0 = 0.0;
    double pw = 0.0;
};

MomentBounds estimate_moments(const Eigen::MatrixXd& e0, const Eigen::MatrixXd& w,
                              const SupportSpec& support, int p, double beta_moments);

}  // namespace wdr
