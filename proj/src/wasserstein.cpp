#include "wdr/wasserstein.hpp"

#include <limits>
#include <stdexcept>
#include <vector>

namespace wdr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double transport_cost(const Eigen::VectorXd& supply, const Eigen::VectorXd& demand,
                      const Eigen::MatrixXd& cost) {
    const int m = static_cast<int>(supply.size());
    const int n = static_cast<int>(demand.size());
    if (cost.rows() != m || cost.cols() != n)
        throw std::invalid_argument("transport_cost: cost matrix shape mismatch");
    if (static_cast<long long>(m) * n > 1000000)
        throw std::invalid_argument("transport_cost: instance too large, cluster the inputs first");
    if (std::abs(supply.sum() - demand.sum()) > 1e-9)
        throw std::invalid_argument("transport_cost: unbalanced marginals");

    const double total = supply.sum();
    const double eps = 1e-15 * std::max(1.0, total);

    std::vector<double> ra(supply.data(), supply.data() + m);   // residual supply
    std::vector<double> rb(demand.data(), demand.data() + n);   // residual demand
    Eigen::MatrixXd flow = Eigen::MatrixXd::Zero(m, n);
    std::vector<double> pot_src(static_cast<std::size_t>(m), 0.0);
    std::vector<double> pot_snk(static_cast<std::size_t>(n), 0.0);

    // node ids: sources 0..m-1, sinks m..m+n-1
    const int nodes = m + n;
    std::vector<double> dist(static_cast<std::size_t>(nodes));
    std::vector<int> prev(static_cast<std::size_t>(nodes));
    std::vector<bool> done(static_cast<std::size_t>(nodes));

    double remaining = total;
    const int max_rounds = 8 * nodes + 64;
    for (int round = 0; remaining > eps; ++round) {
        if (round >= max_rounds) throw std::runtime_error("transport_cost: augmentation limit hit");

        // multi-source Dijkstra over the residual graph with reduced costs
        std::fill(dist.begin(), dist.end(), kInf);
        std::fill(prev.begin(), prev.end(), -1);
        std::fill(done.begin(), done.end(), false);
        for (int i = 0; i < m; ++i)
            if (ra[static_cast<std::size_t>(i)] > eps) dist[static_cast<std::size_t>(i)] = 0.0;

        int target = -1;
        for (int it = 0; it < nodes; ++it) {
            int u = -1;
            double best = kInf;
            for (int v = 0; v < nodes; ++v)
                if (!done[static_cast<std::size_t>(v)] && dist[static_cast<std::size_t>(v)] < best) {
                    best = dist[static_cast<std::size_t>(v)];
                    u = v;
                }
            if (u < 0) break;
            done[static_cast<std::size_t>(u)] = true;
            if (u >= m && rb[static_cast<std::size_t>(u - m)] > eps) {
                target = u - m;
                break;
            }
            if (u < m) {
                // forward arcs source u -> every sink
                const double du = dist[static_cast<std::size_t>(u)];
                const double pot_u = pot_src[static_cast<std::size_t>(u)];
                for (int j = 0; j < n; ++j) {
                    if (done[static_cast<std::size_t>(m + j)]) continue;
                    // rounding in the potentials can leave the reduced cost
                    // marginally negative; clamp to keep Dijkstra valid
                    const double rc =
                        std::max(cost(u, j) + pot_u - pot_snk[static_cast<std::size_t>(j)], 0.0);
                    const double nd = du + rc;
                    if (nd < dist[static_cast<std::size_t>(m + j)]) {
                        dist[static_cast<std::size_t>(m + j)] = nd;
                        prev[static_cast<std::size_t>(m + j)] = u;
                    }
                }
            } else {
                // reverse arcs sink -> source where flow exists
                const int j = u - m;
                const double du = dist[static_cast<std::size_t>(u)];
                const double pot_j = pot_snk[static_cast<std::size_t>(j)];
                for (int i = 0; i < m; ++i) {
                    if (done[static_cast<std::size_t>(i)] || flow(i, j) <= eps) continue;
                    const double rc =
                        std::max(-cost(i, j) - pot_src[static_cast<std::size_t>(i)] + pot_j, 0.0);
                    const double nd = du + rc;
                    if (nd < dist[static_cast<std::size_t>(i)]) {
                        dist[static_cast<std::size_t>(i)] = nd;
                        prev[static_cast<std::size_t>(i)] = u;
                    }
                }
            }
        }
        if (target < 0) throw std::runtime_error("transport_cost: no augmenting path");

        const double d_target = dist[static_cast<std::size_t>(m + target)];
        for (int i = 0; i < m; ++i)
            pot_src[static_cast<std::size_t>(i)] += std::min(dist[static_cast<std::size_t>(i)], d_target);
        for (int j = 0; j < n; ++j)
            pot_snk[static_cast<std::size_t>(j)] += std::min(dist[static_cast<std::size_t>(m + j)], d_target);

        // bottleneck: residual demand at the target, residual supply at the
        // path start, and existing flow on every reverse arc in between
        // (forward arcs are uncapacitated)
        double delta = rb[static_cast<std::size_t>(target)];
        int start = m + target;
        while (prev[static_cast<std::size_t>(start)] >= 0) {
            const int u = prev[static_cast<std::size_t>(start)];
            if (start < m) delta = std::min(delta, flow(start, u - m));
            start = u;
        }
        delta = std::min(delta, ra[static_cast<std::size_t>(start)]);
        if (!(delta > 0.0)) throw std::runtime_error("transport_cost: zero augmentation");

        for (int v = m + target; prev[static_cast<std::size_t>(v)] >= 0;) {
            const int u = prev[static_cast<std::size_t>(v)];
            if (v >= m)
                flow(u, v - m) += delta;
            else
                flow(v, u - m) -= delta;
            v = u;
        }
        ra[static_cast<std::size_t>(start)] -= delta;
        if (ra[static_cast<std::size_t>(start)] < eps) ra[static_cast<std::size_t>(start)] = 0.0;
        rb[static_cast<std::size_t>(target)] -= delta;
        if (rb[static_cast<std::size_t>(target)] < eps) rb[static_cast<std::size_t>(target)] = 0.0;
        remaining -= delta;
    }

    return flow.cwiseProduct(cost).sum();
}

double wasserstein1(const WeightedAtoms& p, const WeightedAtoms& q) {
    if (p.dim() != q.dim()) throw std::invalid_argument("wasserstein1: dimension mismatch");
    if (static_cast<long long>(p.count()) * q.count() > 1000000)
        throw std::invalid_argument("wasserstein1: instance too large, cluster the inputs first");

    if (p.count() == 1) {
        double w = 0.0;
        for (int j = 0; j < q.count(); ++j)
            w += q.weights(j) * (q.points.row(j) - p.points.row(0)).norm();
        return w;
    }
    if (q.count() == 1) return wasserstein1(q, p);

    Eigen::MatrixXd cost(p.count(), q.count());
    for (int i = 0; i < p.count(); ++i)
        for (int j = 0; j < q.count(); ++j) cost(i, j) = (p.points.row(i) - q.points.row(j)).norm();

    // normalize marginals to a common total to tolerate 1e-12 weight slack
    Eigen::VectorXd a = p.weights / p.weights.sum();
    Eigen::VectorXd b = q.weights / q.weights.sum();
    return transport_cost(a, b, cost);
}

}  // namespace wdr
