#include "fixtures.hpp"

namespace fixtures {

using namespace wdr;

SystemFile make_di4(double dt) {
    SystemFile sf;
    sf.dt = dt;
    sf.sys.A = Eigen::MatrixXd::Identity(4, 4);
    sf.sys.A(0, 2) = dt;
    sf.sys.A(1, 3) = dt;
    sf.sys.B = Eigen::MatrixXd::Zero(4, 2);
    sf.sys.B(0, 0) = 0.5 * dt * dt;
    sf.sys.B(1, 1) = 0.5 * dt * dt;
    sf.sys.B(2, 0) = dt;
    sf.sys.B(3, 1) = dt;
    sf.sys.G = Eigen::MatrixXd::Zero(4, 2);
    sf.sys.G(2, 0) = 1.0;
    sf.sys.G(3, 1) = 1.0;

    Eigen::MatrixXd q = Eigen::MatrixXd::Identity(4, 4);
    q(0, 0) = q(1, 1) = 10.0;
    sf.law.K = dlqr_gain(sf.sys.A, sf.sys.B, q, Eigen::MatrixXd::Identity(2, 2));
    return sf;
}

GroundTruth gaussian_gt(double scale) {
    GroundTruth gt;
    Eigen::MatrixXd cov0 = Eigen::MatrixXd::Zero(4, 4);
    cov0(0, 0) = cov0(1, 1) = scale;
    gt.p0 = TruncatedGaussian{Eigen::VectorXd::Zero(4), cov0, 4.0};
    Eigen::MatrixXd covw(2, 2);
    covw << 2.0 * scale, scale, scale, 2.0 * scale;
    gt.pw = TruncatedGaussian{Eigen::VectorXd::Zero(2), covw, 4.0};
    return gt;
}

GroundTruth pushforward_gt(double scale) {
    GroundTruth gt;
    Eigen::MatrixXd cov0 = Eigen::MatrixXd::Zero(4, 4);
    cov0(0, 0) = cov0(1, 1) = scale;
    gt.p0 = TruncatedGaussian{Eigen::VectorXd::Zero(4), cov0, 4.0};
    Eigen::MatrixXd sc(2, 2);
    sc << 2.0 * scale, scale, scale, 2.0 * scale;
    gt.pw = PushforwardUniform{sc, 4.0, 0.25};
    return gt;
}

Eigen::MatrixXd workspace_projection(int state_dim) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, state_dim);
    m(0, 0) = 1.0;
    m(1, 1) = 1.0;
    return m;
}

Stack build_di4_stack(const GroundTruth& gt, long long samples, double beta, int cluster_k,
                      double p_safe, std::uint64_t seed, const std::vector<int>& taus_in) {
    Stack stack;
    stack.sf = make_di4();
    stack.gt = gt;
    stack.taus = taus_in.empty()
                     ? std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 10, 12, 14, 17, 20, 26, 39}
                     : taus_in;

    stack.sf.support.diam_x0 = noise_support_diameter(gt.p0);
    stack.sf.support.diam_w = noise_support_diameter(gt.pw);

    const ErrorData data =
        generate_error_data(stack.sf.sys, stack.sf.law, gt, samples, stack.taus, seed);
    const MomentBounds moments = estimate_moments(data.e0, data.w, stack.sf.support, 1, beta);

    stack.spec.taus = stack.taus;
    stack.spec.beta = beta;
    stack.spec.moment_p0 = moments.p0;
    stack.spec.moment_pw = moments.pw;
    stack.spec.t_max = 200;
    stack.spec.cluster_k = cluster_k;
    stack.spec.seed = seed + 1;

    stack.tube = build_tube(data.anchors, stack.sf.sys, stack.sf.law, stack.spec, stack.sf.support,
                            workspace_projection(4));
    stack.conf = build_confidence_tube(stack.tube, lazy_mass_target(p_safe, 1));
    return stack;
}

SystemFile make_drone8(double dt) {
    SystemFile sf;
    sf.dt = dt;
    // planar drone with an inner-loop damped airframe: tilt drives the
    // velocity, the control drives the tilt, and each axis carries an
    // internal flex mode that soaks up most of the disturbance without
    // coupling into the planar motion; state order
    // (px, py, vx, vy, tx, ty, fx, fy)
    const double tilt_gain = 2.0;
    const double v_damp = 0.92, tilt_damp = 0.85, flex_damp = 0.6;
    sf.sys.A = Eigen::MatrixXd::Identity(8, 8);
    for (int axis = 0; axis < 2; ++axis) {
        const int p = axis, v = 2 + axis, tilt = 4 + axis, flex = 6 + axis;
        sf.sys.A(p, v) = dt;
        sf.sys.A(v, v) = v_damp;
        sf.sys.A(v, tilt) = dt * tilt_gain;
        sf.sys.A(tilt, tilt) = tilt_damp;
        sf.sys.A(flex, flex) = flex_damp;
    }
    sf.sys.B = Eigen::MatrixXd::Zero(8, 2);
    sf.sys.B(4, 0) = dt;
    sf.sys.B(5, 1) = dt;
    sf.sys.G = Eigen::MatrixXd::Zero(8, 2);
    sf.sys.G(2, 0) = 1.0;
    sf.sys.G(3, 1) = 1.0;
    sf.sys.G(6, 0) = 20.0;
    sf.sys.G(7, 1) = 20.0;

    Eigen::MatrixXd q = Eigen::MatrixXd::Identity(8, 8);
    q(0, 0) = q(1, 1) = 0.1;
    const Eigen::MatrixXd r = 2000.0 * Eigen::MatrixXd::Identity(2, 2);
    sf.law.K = dlqr_gain(sf.sys.A, sf.sys.B, q, r);
    return sf;
}

GroundTruth drone_gt(double scale) {
    GroundTruth gt;
    Eigen::MatrixXd cov0 = Eigen::MatrixXd::Zero(8, 8);
    cov0(0, 0) = cov0(1, 1) = scale;
    gt.p0 = TruncatedGaussian{Eigen::VectorXd::Zero(8), cov0, 4.0};
    Eigen::MatrixXd covw(2, 2);
    covw << 2.0 * scale, scale, scale, 2.0 * scale;
    gt.pw = TruncatedGaussian{Eigen::VectorXd::Zero(2), covw, 4.0};
    return gt;
}

PlannerConfig base_config(const SystemFile& sf, std::uint64_t seed) {
    PlannerConfig cfg;
    cfg.seed = seed;
    cfg.max_iterations = 60000;
    cfg.x_init.resize(4);
    cfg.x_init << 1.0, 1.0, 0.0, 0.0;
    cfg.control_lo = Eigen::Vector2d(-1.0, -1.0);
    cfg.control_hi = Eigen::Vector2d(1.0, 1.0);
    cfg.durations = {1, 2, 3, 4, 5};
    cfg.goal_bias = 0.05;
    (void)sf;
    return cfg;
}

}  // namespace fixtures
