#include "wdr/weighted_atoms.hpp"

#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "wdr/io_util.hpp"

namespace wdr {

void WeightedAtoms::validate() const {
    if (points.rows() == 0 || points.cols() < 1)
        throw std::invalid_argument("WeightedAtoms: empty atom set");
    if (weights.size() != points.rows())
        throw std::invalid_argument("WeightedAtoms: weight count mismatch");
    if ((weights.array() < 0.0).any())
        throw std::invalid_argument("WeightedAtoms: negative weight");
    if (std::abs(weights.sum() - 1.0) > 1e-12)
        throw std::invalid_argument("WeightedAtoms: weights must sum to 1");
    if (!points.allFinite() || !weights.allFinite())
        throw std::invalid_argument("WeightedAtoms: non-finite entries");
}

void normalize_weights(Eigen::VectorXd& weights) {
    weights /= weights.sum();
    // pin the accumulated rounding residual so the unit-mass invariant holds
    // exactly even for very large atom counts
    weights(0) += 1.0 - weights.sum();
}

WeightedAtoms empirical(const Eigen::MatrixXd& samples) {
    if (samples.rows() == 0) throw std::invalid_argument("empirical: no samples");
    WeightedAtoms p;
    p.points = samples;
    p.weights = Eigen::VectorXd::Constant(samples.rows(), 1.0 / static_cast<double>(samples.rows()));
    normalize_weights(p.weights);
    return p;
}

WeightedAtoms pushforward(const WeightedAtoms& p, const Eigen::MatrixXd& m) {
    if (m.cols() != p.dim()) throw std::invalid_argument("pushforward: dimension mismatch");
    WeightedAtoms out;
    out.points = p.points * m.transpose();
    out.weights = p.weights;
    return out;
}

WeightedAtoms shift(const WeightedAtoms& p, const Eigen::VectorXd& v) {
    if (v.size() != p.dim()) throw std::invalid_argument("shift: dimension mismatch");
    WeightedAtoms out;
    out.points = p.points.rowwise() + v.transpose();
    out.weights = p.weights;
    return out;
}

WeightedAtoms merge_duplicates(const WeightedAtoms& p) {
    std::map<std::vector<double>, double> merged;
    std::vector<std::vector<double>> order;
    for (int i = 0; i < p.count(); ++i) {
        std::vector<double> key(p.points.row(i).data(), p.points.row(i).data() + p.dim());
        // row(i).data() strides over the full row-major buffer; copy explicitly
        for (int j = 0; j < p.dim(); ++j) key[static_cast<std::size_t>(j)] = p.points(i, j);
        auto [it, inserted] = merged.try_emplace(key, 0.0);
        if (inserted) order.push_back(key);
        it->second += p.weights(i);
    }
    WeightedAtoms out;
    out.points.resize(static_cast<Eigen::Index>(order.size()), p.dim());
    out.weights.resize(static_cast<Eigen::Index>(order.size()));
    for (std::size_t i = 0; i < order.size(); ++i) {
        for (int j = 0; j < p.dim(); ++j) out.points(static_cast<Eigen::Index>(i), j) = order[i][static_cast<std::size_t>(j)];
        out.weights(static_cast<Eigen::Index>(i)) = merged.at(order[i]);
    }
    normalize_weights(out.weights);
    return out;
}

void write_atoms(std::ostream& os, const WeightedAtoms& p) {
    io::write_u64(os, static_cast<std::uint64_t>(p.count()));
    io::write_u64(os, static_cast<std::uint64_t>(p.dim()));
    for (int i = 0; i < p.count(); ++i)
        for (int j = 0; j < p.dim(); ++j) io::write_f64(os, p.points(i, j));
    for (int i = 0; i < p.count(); ++i) io::write_f64(os, p.weights(i));
}

WeightedAtoms read_atoms(std::istream& is) {
    const std::uint64_t count = io::read_u64(is);
    const std::uint64_t dim = io::read_u64(is);
    if (count == 0 || dim == 0 || count > (1ULL << 32) || dim > (1ULL << 16))
        throw std::runtime_error("read_atoms: corrupt header");
    WeightedAtoms p;
    p.points.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(dim));
    p.weights.resize(static_cast<Eigen::Index>(count));
    for (Eigen::Index i = 0; i < p.points.rows(); ++i)
        for (Eigen::Index j = 0; j < p.points.cols(); ++j) p.points(i, j) = io::read_f64(is);
    for (Eigen::Index i = 0; i < p.weights.size(); ++i) p.weights(i) = io::read_f64(is);
    return p;
}

}  // namespace wdr
