#pragma once

#include "wdr/weighted_atoms.hpp"

namespace wdr {

// Exact 1-Wasserstein distance between finitely supported distributions with
// Euclidean ground cost, solved as a transportation problem by successive
// shortest augmenting paths. Guarded to count(p) * count(q) <= 1e6; larger
// inputs must be clustered first.
double wasserstein1(const WeightedAtoms& p, const WeightedAtoms& q);

// Optimal transport cost for an arbitrary nonnegative cost matrix with the
// given marginals (weights of p as supplies, weights of q as demands).
double transport_cost(const Eigen::VectorXd& supply, const Eigen::VectorXd& demand,
                      const Eigen::MatrixXd& cost);

}  // namespace wdr
