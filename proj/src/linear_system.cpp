#include "wdr/linear_system.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <stdexcept>

namespace wdr {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

void LinearSystem::validate() const {
    require(A.rows() > 0 && A.rows() == A.cols(), "A must be square and nonempty");
    require(B.rows() == A.rows() && B.cols() > 0, "B row count must match A");
    require(G.rows() == A.rows() && G.cols() > 0, "G row count must match A");
    require(A.allFinite() && B.allFinite() && G.allFinite(), "system matrices must be finite");
}

double MotionPlan::replay_defect(const LinearSystem& sys) const {
    double worst = 0.0;
    for (std::size_t t = 0; t + 1 < steps.size(); ++t) {
        const Eigen::VectorXd pred = reference_step(sys, steps[t].x, steps[t].u);
        const double scale = std::max(1.0, steps[t + 1].x.norm());
        worst = std::max(worst, (pred - steps[t + 1].x).norm() / scale);
    }
    return worst;
}

Eigen::VectorXd reference_step(const LinearSystem& sys, const Eigen::VectorXd& xbar,
                               const Eigen::VectorXd& ubar) {
    require(xbar.size() == sys.n(), "reference_step: state dimension mismatch");
    require(ubar.size() == sys.m(), "reference_step: control dimension mismatch");
    return sys.A * xbar + sys.B * ubar;
}

Eigen::VectorXd error_step(const LinearSystem& sys, const FeedbackLaw& law,
                           const Eigen::VectorXd& e, const Eigen::VectorXd& w) {
    require(e.size() == sys.n(), "error_step: error dimension mismatch");
    require(w.size() == sys.d(), "error_step: disturbance dimension mismatch");
    require(law.K.rows() == sys.m() && law.K.cols() == sys.n(), "error_step: gain dimension mismatch");
    return law.closed_loop(sys) * e + sys.G * w;
}

Eigen::VectorXd closed_loop_step(const LinearSystem& sys, const FeedbackLaw& law,
                                 const Eigen::VectorXd& x, const Eigen::VectorXd& xbar,
                                 const Eigen::VectorXd& ubar, const Eigen::VectorXd& w) {
    require(x.size() == sys.n(), "closed_loop_step: state dimension mismatch");
    return law.closed_loop(sys) * x + sys.B * (law.K * xbar + ubar) + sys.G * w;
}

double operator_norm(const Eigen::MatrixXd& M) {
    if (M.size() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    return svd.singularValues()(0);
}

NormSequences norm_sequences(const LinearSystem& sys, const FeedbackLaw& law, int t_max) {
    require(t_max >= 0, "norm_sequences: t_max must be >= 0");
    const Eigen::MatrixXd acl = law.closed_loop(sys);
    NormSequences out;
    out.acl_pow_norm.reserve(static_cast<std::size_t>(t_max) + 1);
    out.acl_pow_g_norm.reserve(static_cast<std::size_t>(std::max(t_max, 0)));
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(sys.n(), sys.n());
    for (int t = 0; t <= t_max; ++t) {
        out.acl_pow_norm.push_back(operator_norm(power));
        if (t < t_max) out.acl_pow_g_norm.push_back(operator_norm(power * sys.G));
        power = acl * power;
    }
    return out;
}

double support_diameter_bound(const LinearSystem& sys, const FeedbackLaw& law,
                              const SupportSpec& spec, int t) {
    require(t >= 0, "support_diameter_bound: t must be >= 0");
    require(spec.diam_x0 >= 0.0 && spec.diam_w >= 0.0, "support diameters must be >= 0");
    const NormSequences seq = norm_sequences(sys, law, t);
    double bound = seq.acl_pow_norm[static_cast<std::size_t>(t)] * spec.diam_x0;
    for (int i = 0; i < t; ++i) bound += seq.acl_pow_g_norm[static_cast<std::size_t>(i)] * spec.diam_w;
    return bound;
}

double spectral_radius(const Eigen::MatrixXd& M) {
    if (M.rows() <= 16) {
        Eigen::EigenSolver<Eigen::MatrixXd> es(M, /*computeEigenvectors=*/false);
        if (es.info() != Eigen::Success) throw std::runtime_error("spectral_radius: eigensolver failed");
        return es.eigenvalues().cwiseAbs().maxCoeff();
    }
    // power iteration on pairs of steps; the two-step ratio is insensitive to
    // complex-conjugate dominant pairs
    Eigen::VectorXd v = Eigen::VectorXd::Ones(M.rows()).normalized();
    double estimate = 0.0;
    for (int it = 0; it < 100000; ++it) {
        Eigen::VectorXd w = M * (M * v);
        const double norm = w.norm();
        if (norm == 0.0) return 0.0;
        const double next = std::sqrt(norm / v.norm());
        w /= norm;
        if (std::abs(next - estimate) < 1e-10 * std::max(1.0, next)) return next;
        estimate = next;
        v = w;
    }
    throw std::runtime_error("spectral_radius: power iteration did not converge");
}

double stability_margin(const LinearSystem& sys, const FeedbackLaw& law) {
    return spectral_radius(law.closed_loop(sys));
}

Eigen::MatrixXd dlqr_gain(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                          const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R) {
    Eigen::MatrixXd P = Q;
    for (int it = 0; it < 10000; ++it) {
        const Eigen::MatrixXd btp = B.transpose() * P;
        const Eigen::MatrixXd K = (R + btp * B).ldlt().solve(btp * A);
        const Eigen::MatrixXd next =
            Q + A.transpose() * P * (A - B * K);
        if ((next - P).cwiseAbs().maxCoeff() < 1e-12) {
            P = next;
            break;
        }
        P = next;
    }
    const Eigen::MatrixXd btp = B.transpose() * P;
    return (R + btp * B).ldlt().solve(btp * A);
}

}  // namespace wdr
