#include <cstdio>

#include "../tests/fixtures.hpp"
#include "wdr/data_archive.hpp"
#include "wdr/validity.hpp"

using namespace wdr;

int main() {
    const double p_safe = 0.8;
    SystemFile sf = fixtures::make_drone8();
    const GroundTruth gt = fixtures::drone_gt(1e-6);
    sf.support.diam_x0 = noise_support_diameter(gt.p0);
    sf.support.diam_w = noise_support_diameter(gt.pw);

    const std::vector<int> taus{0, 1, 2, 3, 4, 5, 8, 12, 16, 20, 26, 32, 39};
    const ErrorData data = generate_error_data(sf.sys, sf.law, gt, 100000, taus, 808);
    const MomentBounds moments = estimate_moments(data.e0, data.w, sf.support, 1, 0.05);

    TubeSpec spec;
    spec.taus = taus;
    spec.beta = 0.05;
    spec.moment_p0 = moments.p0;
    spec.moment_pw = moments.pw;
    spec.t_max = 200;
    spec.cluster_k = 60;
    spec.seed = 809;

    const Eigen::MatrixXd m_ws = fixtures::workspace_projection(8);
    const Eigen::MatrixXd m_ctrl = -sf.law.K;
    LowDimFamily family =
        build_family(data.anchors, sf.sys, sf.law, spec, sf.support, {m_ws, m_ctrl});
    const ConfidenceTube conf_ws = build_confidence_tube(family.tubes[0], lazy_mass_target(p_safe, 2));
    const ConfidenceTube conf_ctrl =
        build_confidence_tube(family.tubes[1], lazy_mass_target(p_safe, 2));

    const double width = 0.473;
    Environment env = make_environment(EnvFamily::Narrow, width, 7, 8);
    env.control = ControlConstraint{make_ball(Eigen::VectorXd::Zero(2), 0.025)};
    env.state_lo.resize(8);
    env.state_hi.resize(8);
    env.state_lo << 0, 0, -0.25, -0.25, -0.05, -0.05, -0.2, -0.2;
    env.state_hi << 10, 10, 0.25, 0.25, 0.05, 0.05, 0.2, 0.2;

    AmbiguityTube tube_ws = family.tubes[0];
    AmbiguityTube tube_ctrl = family.tubes[1];
    CheckerContext ctx =
        make_context({&tube_ws, &tube_ctrl}, {&conf_ws, &conf_ctrl}, env, sf.law.K, p_safe);

    for (int t : {36, 40, 45, 50, 60, 80, 100}) {
        double band = -1.0;
        for (double dy = 0.0; dy < width; dy += 0.005) {
            NodeQuery node;
            node.xbar = Eigen::VectorXd::Zero(8);
            node.xbar(0) = 5.0;
            node.xbar(1) = 5.0 + dy;
            node.ubar = Eigen::Vector2d::Constant(0.004);
            node.t = t;
            if (!check_exact(node, ctx)) break;
            band = dy;
        }
        std::printf("t=%3d lowdim band +-%.3f\n", t, band);
    }
    return 0;
}
