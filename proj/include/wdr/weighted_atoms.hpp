#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace wdr {

// Finitely supported probability distribution: one point per row, weights
// summing to one. Carrier for empirical, clustered and worst-case
// distributions.
struct WeightedAtoms {
    Eigen::MatrixXd points;   // count x dim
    Eigen::VectorXd weights;  // count

    int count() const { return static_cast<int>(points.rows()); }
    int dim() const { return static_cast<int>(points.cols()); }

    // throws std::invalid_argument when weights are negative, do not sum to
    // one within 1e-12, or the atom set is empty
    void validate() const;

    Eigen::VectorXd point(int i) const { return points.row(i).transpose(); }
};

// Rescales to unit total mass, absorbing float rounding exactly.
void normalize_weights(Eigen::VectorXd& weights);

// Uniform weights 1/N on each sample row; duplicates kept.
WeightedAtoms empirical(const Eigen::MatrixXd& samples);

// Maps every atom by M, keeps weights.
WeightedAtoms pushforward(const WeightedAtoms& p, const Eigen::MatrixXd& m);

// Adds v to every atom.
WeightedAtoms shift(const WeightedAtoms& p, const Eigen::VectorXd& v);

// Sums weights of exactly coincident atoms.
WeightedAtoms merge_duplicates(const WeightedAtoms& p);

// Wasserstein ball: all distributions within `radius` of `center` in W1.
struct AmbiguitySet {
    WeightedAtoms center;
    double radius = 0.0;
};

// Packed binary layout (little endian): count, dim, row-major point doubles,
// weight doubles. Bit-exact round trip.
void write_atoms(std::ostream& os, const WeightedAtoms& p);
WeightedAtoms read_atoms(std::istream& is);

}  // namespace wdr
