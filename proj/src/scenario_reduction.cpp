#include "wdr/scenario_reduction.hpp"

#include <limits>
#include <stdexcept>
#include <vector>

#include "wdr/rng.hpp"

namespace wdr {

namespace {

// squared distance from every point to one center
void sq_dist_to(const Eigen::MatrixXd& pts, const Eigen::RowVectorXd& c, Eigen::VectorXd& out) {
    out = (pts.rowwise() - c).rowwise().squaredNorm();
}

}  // namespace

namespace {

// Lloyd fitting above this size runs on a seeded subsample; the final
// assignment and the transport bound always cover every atom.
constexpr int kFitCap = 50000;

}  // namespace

ClusterResult cluster(const WeightedAtoms& p, int k, std::uint64_t seed) {
    if (k < 1) throw std::invalid_argument("cluster: k must be >= 1");
    p.validate();
    const int n = p.count();
    const int dim = p.dim();

    if (k >= n) {
        ClusterResult out;
        out.reduced = merge_duplicates(p);
        out.cost_bound = 0.0;
        return out;
    }

    Rng rng(seed);

    if (n > kFitCap) {
        WeightedAtoms fit;
        fit.points.resize(kFitCap, dim);
        for (int i = 0; i < kFitCap; ++i)
            fit.points.row(i) = p.points.row(static_cast<Eigen::Index>(
                rng.uniform_index(static_cast<std::uint64_t>(n))));
        fit.weights = Eigen::VectorXd::Constant(kFitCap, 1.0 / kFitCap);
        const ClusterResult centers = cluster(fit, k, seed + 1);

        // full assignment pass against the fitted centers
        const Eigen::MatrixXd& c = centers.reduced.points;
        Eigen::VectorXd mass = Eigen::VectorXd::Zero(c.rows());
        double bound = 0.0;
        Eigen::VectorXd dists(c.rows());
        for (int i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < c.rows(); ++j)
                dists(j) = (p.points.row(i) - c.row(j)).squaredNorm();
            Eigen::Index best = 0;
            dists.minCoeff(&best);
            mass(best) += p.weights(i);
            bound += p.weights(i) * std::sqrt(dists(best));
        }
        WeightedAtoms reduced;
        int kept = 0;
        for (Eigen::Index j = 0; j < c.rows(); ++j)
            if (mass(j) > 0.0) ++kept;
        reduced.points.resize(kept, dim);
        reduced.weights.resize(kept);
        int w = 0;
        for (Eigen::Index j = 0; j < c.rows(); ++j) {
            if (mass(j) <= 0.0) continue;
            reduced.points.row(w) = c.row(j);
            reduced.weights(w) = mass(j);
            ++w;
        }
        normalize_weights(reduced.weights);
        ClusterResult out;
        out.reduced = merge_duplicates(reduced);
        out.cost_bound = bound;
        return out;
    }

    // k-means++ seeding, weighted by atom mass times squared distance
    Eigen::MatrixXd centers(k, dim);
    Eigen::VectorXd best_sq = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
    {
        // first center: mass-weighted draw
        double r = rng.uniform() * p.weights.sum();
        int first = n - 1;
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            acc += p.weights(i);
            if (r <= acc) {
                first = i;
                break;
            }
        }
        centers.row(0) = p.points.row(first);
    }
    Eigen::VectorXd tmp(n);
    for (int c = 1; c < k; ++c) {
        sq_dist_to(p.points, centers.row(c - 1), tmp);
        best_sq = best_sq.cwiseMin(tmp);
        Eigen::VectorXd score = best_sq.cwiseProduct(p.weights);
        const double total = score.sum();
        int chosen = 0;
        if (total <= 0.0) {
            // all remaining mass already coincides with a center
            chosen = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n)));
        } else {
            double r = rng.uniform() * total;
            double acc = 0.0;
            chosen = n - 1;
            for (int i = 0; i < n; ++i) {
                acc += score(i);
                if (r <= acc) {
                    chosen = i;
                    break;
                }
            }
        }
        centers.row(c) = p.points.row(chosen);
    }

    // Lloyd iterations
    std::vector<int> assign(static_cast<std::size_t>(n), 0);
    Eigen::MatrixXd dist2(n, k);
    double prev_inertia = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 100; ++it) {
        for (int c = 0; c < k; ++c) {
            sq_dist_to(p.points, centers.row(c), tmp);
            dist2.col(c) = tmp;
        }
        double inertia = 0.0;
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double bd = dist2(i, 0);
            for (int c = 1; c < k; ++c)
                if (dist2(i, c) < bd) {  // strict: ties keep the lowest index
                    bd = dist2(i, c);
                    best = c;
                }
            assign[static_cast<std::size_t>(i)] = best;
            inertia += p.weights(i) * bd;
        }

        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, dim);
        Eigen::VectorXd mass = Eigen::VectorXd::Zero(k);
        for (int i = 0; i < n; ++i) {
            sums.row(assign[static_cast<std::size_t>(i)]) += p.weights(i) * p.points.row(i);
            mass(assign[static_cast<std::size_t>(i)]) += p.weights(i);
        }
        for (int c = 0; c < k; ++c) {
            if (mass(c) > 0.0) {
                centers.row(c) = sums.row(c) / mass(c);
            } else {
                // empty cluster: restart it at the point farthest from its center
                int far = 0;
                double fd = -1.0;
                for (int i = 0; i < n; ++i) {
                    const double d = dist2(i, assign[static_cast<std::size_t>(i)]);
                    if (d > fd) {
                        fd = d;
                        far = i;
                    }
                }
                centers.row(c) = p.points.row(far);
            }
        }

        if (prev_inertia - inertia <= 1e-8 * std::max(prev_inertia, 1e-300)) break;
        prev_inertia = inertia;
    }

    // final assignment against the converged centers
    for (int c = 0; c < k; ++c) {
        sq_dist_to(p.points, centers.row(c), tmp);
        dist2.col(c) = tmp;
    }
    Eigen::VectorXd mass = Eigen::VectorXd::Zero(k);
    double bound = 0.0;
    for (int i = 0; i < n; ++i) {
        int best = 0;
        double bd = dist2(i, 0);
        for (int c = 1; c < k; ++c)
            if (dist2(i, c) < bd) {
                bd = dist2(i, c);
                best = c;
            }
        mass(best) += p.weights(i);
        bound += p.weights(i) * std::sqrt(bd);
    }

    // drop empty clusters, then merge coincident centroids
    int kept = 0;
    for (int c = 0; c < k; ++c)
        if (mass(c) > 0.0) ++kept;
    WeightedAtoms reduced;
    reduced.points.resize(kept, dim);
    reduced.weights.resize(kept);
    int w = 0;
    for (int c = 0; c < k; ++c) {
        if (mass(c) <= 0.0) continue;
        reduced.points.row(w) = centers.row(c);
        reduced.weights(w) = mass(c);
        ++w;
    }
    normalize_weights(reduced.weights);

    ClusterResult out;
    out.reduced = merge_duplicates(reduced);
    out.cost_bound = bound;
    return out;
}

}  // namespace wdr
