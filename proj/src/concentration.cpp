#include "wdr/concentration.hpp"

#include <cmath>
#include <stdexcept>

namespace wdr {

void ConcentrationParams::validate() const {
    if (q < 1) throw std::invalid_argument("ConcentrationParams: q must be >= 1");
    if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0))
        throw std::invalid_argument("ConcentrationParams: betas must lie in (0,1)");
    if (beta1 + beta2 >= 1.0)
        throw std::invalid_argument("ConcentrationParams: beta1 + beta2 must be < 1");
    if (!(c_g > 0.0)) throw std::invalid_argument("ConcentrationParams: c_g must be > 0");
}

double moment_bound(const Eigen::MatrixXd& samples, double phi, double beta, int p) {
    if (samples.rows() == 0) throw std::invalid_argument("moment_bound: no samples");
    if (phi < 0.0) throw std::invalid_argument("moment_bound: phi must be >= 0");
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("moment_bound: beta must lie in (0,1)");
    if (p < 1) throw std::invalid_argument("moment_bound: p must be >= 1");

    const long long n = samples.rows();
    double mean_pow = 0.0;
    for (long long i = 0; i < n; ++i)
        mean_pow += std::pow(samples.row(static_cast<Eigen::Index>(i)).norm(), p);
    mean_pow /= static_cast<double>(n);

    const double deviation =
        std::pow(phi / 2.0, p) * std::sqrt(std::log(1.0 / beta) / (2.0 * static_cast<double>(n)));
    return std::pow(mean_pow + deviation, 1.0 / static_cast<double>(p));
}

double mean_rate_g(int d, int q, double mq, long long n, const ConcentrationParams& params) {
    if (n < 1) throw std::invalid_argument("mean_rate_g: N must be >= 1");
    if (d < 1) throw std::invalid_argument("mean_rate_g: d must be >= 1");
    if (q < 1) throw std::invalid_argument("mean_rate_g: q must be >= 1");
    if (params.rate_fn) return params.rate_fn(d, q, mq, n);

    const double nd = static_cast<double>(n);
    double rate;
    if (d == 1)
        rate = 1.0 / std::sqrt(nd);
    else if (d == 2)
        rate = std::log(1.0 + nd) / std::sqrt(nd);
    else
        rate = std::pow(nd, -1.0 / static_cast<double>(d));

    double tail = 0.0;
    if (q > 1) tail = std::pow(nd, -static_cast<double>(q - 1) / static_cast<double>(q));

    return params.c_g * mq * (rate + tail);
}

double concentration_radius(const Eigen::MatrixXd& samples, double phi,
                            const ConcentrationParams& params) {
    params.validate();
    if (samples.rows() == 0) throw std::invalid_argument("concentration_radius: no samples");
    const long long n = samples.rows();
    const int d = static_cast<int>(samples.cols());

    const double mq = moment_bound(samples, phi, params.beta1, params.q);
    const double g = mean_rate_g(d, params.q, mq, n, params);
    const double deviation = phi * std::sqrt(std::log(1.0 / params.beta2) / (2.0 * static_cast<double>(n)));
    return g + deviation;
}

}  // namespace wdr
