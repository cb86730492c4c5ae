#include "wdr/noise.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace wdr {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// PSD square root through the eigenbasis, clamping eigenvalue noise.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m, const char* what) {
    if (m.rows() != m.cols()) throw std::invalid_argument(std::string(what) + ": must be square");
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, m.cwiseAbs().maxCoeff()))
        throw std::invalid_argument(std::string(what) + ": must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success) throw std::runtime_error(std::string(what) + ": eigensolver failed");
    Eigen::VectorXd ev = es.eigenvalues();
    const double tol = 1e-12 * std::max(1.0, ev.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) < -tol) throw std::invalid_argument(std::string(what) + ": not positive semidefinite");
        ev(i) = std::max(ev(i), 0.0);
    }
    return es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

int noise_dim(const NoiseModel& model) {
    if (const auto* g = std::get_if<TruncatedGaussian>(&model)) return static_cast<int>(g->mean.size());
    if (std::get_if<PushforwardUniform>(&model)) return 2;
    return static_cast<int>(std::get<PointMass>(model).value.size());
}

void validate_noise(const NoiseModel& model) {
    if (const auto* g = std::get_if<TruncatedGaussian>(&model)) {
        if (g->cov.rows() != g->mean.size() || g->cov.cols() != g->mean.size())
            throw std::invalid_argument("TruncatedGaussian: covariance shape mismatch");
        if (!(g->trunc_sd > 0.0)) throw std::invalid_argument("TruncatedGaussian: truncation must be > 0");
        psd_sqrt(g->cov, "TruncatedGaussian covariance");
    } else if (const auto* p = std::get_if<PushforwardUniform>(&model)) {
        if (p->scale.rows() != 2 || p->scale.cols() != 2)
            throw std::invalid_argument("PushforwardUniform: scale must be 2x2");
        if (!(p->amplitude >= 0.0) || !(p->radial_exponent > 0.0))
            throw std::invalid_argument("PushforwardUniform: bad amplitude or exponent");
        psd_sqrt(p->scale, "PushforwardUniform scale");
    }
}

Eigen::MatrixXd sample_noise(const NoiseModel& model, Rng& rng, int count) {
    if (count < 0) throw std::invalid_argument("sample_noise: negative count");
    const int dim = noise_dim(model);
    Eigen::MatrixXd out(count, dim);

    if (const auto* g = std::get_if<TruncatedGaussian>(&model)) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g->cov);
        if (es.info() != Eigen::Success) throw std::runtime_error("sample_noise: eigensolver failed");
        Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
        const Eigen::MatrixXd basis = es.eigenvectors() * ev.cwiseSqrt().asDiagonal();
        Eigen::VectorXd z(dim);
        for (int i = 0; i < count; ++i) {
            do {
                for (int j = 0; j < dim; ++j) z(j) = rng.normal();
            } while (z.norm() > g->trunc_sd);
            out.row(i) = (g->mean + basis * z).transpose();
        }
        return out;
    }
    if (const auto* p = std::get_if<PushforwardUniform>(&model)) {
        const Eigen::MatrixXd half = psd_sqrt(p->scale, "PushforwardUniform scale");
        for (int i = 0; i < count; ++i) {
            const double w1 = rng.uniform();
            const double w2 = rng.uniform();
            const double radius = p->amplitude * std::pow(w1, p->radial_exponent);
            const Eigen::Vector2d dir(std::cos(kTwoPi * w2), std::sin(kTwoPi * w2));
            out.row(i) = (radius * (half * dir)).transpose();
        }
        return out;
    }
    const auto& pm = std::get<PointMass>(model);
    out.rowwise() = pm.value.transpose();
    return out;
}

double noise_support_diameter(const NoiseModel& model) {
    if (const auto* g = std::get_if<TruncatedGaussian>(&model)) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g->cov);
        const double sigma_max = std::sqrt(std::max(es.eigenvalues().maxCoeff(), 0.0));
        return 2.0 * g->trunc_sd * sigma_max;
    }
    if (const auto* p = std::get_if<PushforwardUniform>(&model)) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p->scale);
        return 2.0 * p->amplitude * std::sqrt(std::max(es.eigenvalues().maxCoeff(), 0.0));
    }
    return 0.0;
}

}  // namespace wdr
