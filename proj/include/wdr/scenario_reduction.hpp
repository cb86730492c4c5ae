#pragma once

#include <cstdint>

#include "wdr/weighted_atoms.hpp"

namespace wdr {

struct ClusterResult {
    WeightedAtoms reduced;
    // feasible-plan transport bound: sum_i a_i |x_i - centroid(x_i)|, always
    // an upper bound on W1(input, reduced)
    double cost_bound = 0.0;
};

// Scenario reduction by weighted k-means (k-means++ seeding, 100 Lloyd
// iterations max, 1e-8 relative inertia tolerance, assignment ties broken by
// lowest centroid index). Deterministic given the seed. Coincident centroids
// are merged afterwards.
ClusterResult cluster(const WeightedAtoms& p, int k, std::uint64_t seed);

}  // namespace wdr
