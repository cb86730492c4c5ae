#pragma once

#include <Eigen/Dense>
#include <vector>

namespace wdr {

// Discrete-time stochastic linear system
//   x_{t+1} = A x_t + B u_t + G w_t
// with state dimension n, control dimension m and disturbance dimension d.
struct LinearSystem {
    Eigen::MatrixXd A;  // n x n
    Eigen::MatrixXd B;  // n x m
    Eigen::MatrixXd G;  // n x d

    int n() const { return static_cast<int>(A.rows()); }
    int m() const { return static_cast<int>(B.cols()); }
    int d() const { return static_cast<int>(G.cols()); }

    // throws std::invalid_argument on inconsistent or non-finite matrices
    void validate() const;
};

// State feedback u_t = -K (x_t - xbar_t) + ubar_t.
struct FeedbackLaw {
    Eigen::MatrixXd K;  // m x n

    Eigen::MatrixXd closed_loop(const LinearSystem& sys) const { return sys.A - sys.B * K; }
};

// Known support sizes of the initial error and the disturbance.
struct SupportSpec {
    double diam_x0 = 0.0;
    double diam_w = 0.0;
};

struct MotionPlanStep {
    Eigen::VectorXd u;  // feedforward control applied at time t
    Eigen::VectorXd x;  // reference state at time t
};

// Reference plan ((ubar_t, xbar_t))_{t=0..T}. The final step carries the
// terminal state; its control is unused and stored as zero.
struct MotionPlan {
    std::vector<MotionPlanStep> steps;

    int horizon() const { return static_cast<int>(steps.size()) - 1; }

    // max relative defect of xbar_{t+1} = A xbar_t + B ubar_t over the plan
    double replay_defect(const LinearSystem& sys) const;
};

// xbar_{t+1} = A xbar + B ubar
Eigen::VectorXd reference_step(const LinearSystem& sys, const Eigen::VectorXd& xbar,
                               const Eigen::VectorXd& ubar);

// e_{t+1} = A_cl e + G w
Eigen::VectorXd error_step(const LinearSystem& sys, const FeedbackLaw& law,
                           const Eigen::VectorXd& e, const Eigen::VectorXd& w);

// x_{t+1} = A_cl x + B (K xbar + ubar) + G w
Eigen::VectorXd closed_loop_step(const LinearSystem& sys, const FeedbackLaw& law,
                                 const Eigen::VectorXd& x, const Eigen::VectorXd& xbar,
                                 const Eigen::VectorXd& ubar, const Eigen::VectorXd& w);

double operator_norm(const Eigen::MatrixXd& M);

// Spectral norms of closed-loop powers, computed by iterated multiplication:
// acl_pow_norm[t] = |A_cl^t|  for t = 0..t_max,
// acl_pow_g_norm[t] = |A_cl^t G|  for t = 0..t_max-1.
struct NormSequences {
    std::vector<double> acl_pow_norm;
    std::vector<double> acl_pow_g_norm;
};

NormSequences norm_sequences(const LinearSystem& sys, const FeedbackLaw& law, int t_max);

// |A_cl^t| * diam_x0 + sum_{i<t} |A_cl^i G| * diam_w, an over-approximation
// of the diameter of the error support at time t.
double support_diameter_bound(const LinearSystem& sys, const FeedbackLaw& law,
                              const SupportSpec& spec, int t);

// Largest eigenvalue modulus of A_cl. Eigendecomposition for n <= 16,
// power iteration (tol 1e-10) above that; throws on non-convergence.
double stability_margin(const LinearSystem& sys, const FeedbackLaw& law);

double spectral_radius(const Eigen::MatrixXd& M);

// Infinite-horizon discrete LQR gain via Riccati iteration.
Eigen::MatrixXd dlqr_gain(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                          const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R);

}  // namespace wdr
