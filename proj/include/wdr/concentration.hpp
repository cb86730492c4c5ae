#pragma once

#include <Eigen/Dense>
#include <functional>

namespace wdr {

// Budgets and constants for the data-driven radius. beta1 covers the moment
// estimate, beta2 the McDiarmid deviation of the empirical W1 around its
// mean; both confidences combine as 1 - (beta1 + beta2).
struct ConcentrationParams {
    int q = 1;           // moment order
    double beta1 = 0.0;  // in (0,1)
    double beta2 = 0.0;  // in (0,1)
    double c_g = 1.0;    // rate constant of the mean-convergence bound

    // optional replacement for the built-in mean-rate shape; receives
    // (d, q, Mq, N) and must return a bound on E[W1(P, empirical_N)]
    std::function<double(int, int, double, long long)> rate_fn;

    void validate() const;
};

// Empirical bound on the p-th moment of |x|: the p-th power average plus a
// Hoeffding deviation term, then the outer 1/p root.
//   ( mean |x|^p + (phi/2)^p sqrt(log(1/beta) / (2N)) )^(1/p)
double moment_bound(const Eigen::MatrixXd& samples, double phi, double beta, int p);

// Bound on E[W1(P, empirical_N)]:
//   c_g * Mq * ( rate(d, N) + N^(-(q-1)/q) )
// with rate N^(-1/2) for d=1, N^(-1/2) log(1+N) for d=2 and N^(-1/d) for
// d>=3; the moment tail term is dropped at q=1. Vanishes as N grows.
double mean_rate_g(int d, int q, double mq, long long n, const ConcentrationParams& params);

// Data-driven ambiguity radius: the mean-rate bound on the moment estimate
// plus the deviation term phi * sqrt(log(1/beta2) / (2N)). The true
// distribution lies within this W1 radius of the empirical one with
// confidence 1 - (beta1 + beta2).
double concentration_radius(const Eigen::MatrixXd& samples, double phi,
                            const ConcentrationParams& params);

}  // namespace wdr
