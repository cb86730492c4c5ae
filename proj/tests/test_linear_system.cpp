#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "wdr/linear_system.hpp"
#include "wdr/rng.hpp"

using namespace wdr;

namespace {

LinearSystem scalar_system(double a, double b, double g) {
    LinearSystem sys;
    sys.A = Eigen::MatrixXd::Constant(1, 1, a);
    sys.B = Eigen::MatrixXd::Constant(1, 1, b);
    sys.G = Eigen::MatrixXd::Constant(1, 1, g);
    return sys;
}

Eigen::VectorXd vec1(double v) { return Eigen::VectorXd::Constant(1, v); }

}  // namespace

TEST_SUITE("linsys") {

TEST_CASE("reference step fixed point and identity dynamics") {
    LinearSystem sys;
    sys.A = Eigen::MatrixXd::Identity(2, 2);
    sys.B = Eigen::MatrixXd::Identity(2, 2);
    sys.G = Eigen::MatrixXd::Identity(2, 2);
    CHECK(reference_step(sys, Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero()).norm() == 0.0);
    const Eigen::VectorXd next = reference_step(sys, Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 2));
    CHECK(next.isApprox(Eigen::Vector2d(1, 2)));
}

TEST_CASE("reference step double integrator") {
    LinearSystem sys;
    sys.A.resize(2, 2);
    sys.A << 1, 0.1, 0, 1;
    sys.B.resize(2, 1);
    sys.B << 0, 0.1;
    sys.G = Eigen::MatrixXd::Identity(2, 2);
    const Eigen::VectorXd next = reference_step(sys, Eigen::Vector2d(1, 1), vec1(1));
    CHECK(next(0) == doctest::Approx(1.1).epsilon(1e-12));
    CHECK(next(1) == doctest::Approx(1.1).epsilon(1e-12));
}

TEST_CASE("reference step rejects dimension mismatch") {
    LinearSystem sys = scalar_system(1, 1, 1);
    CHECK_THROWS_AS(reference_step(sys, Eigen::Vector2d(0, 0), vec1(0)), std::invalid_argument);
}

TEST_CASE("error step scalar and origin invariance") {
    LinearSystem sys = scalar_system(1.0, 1.0, 1.0);
    FeedbackLaw law{Eigen::MatrixXd::Constant(1, 1, 0.5)};  // A_cl = 0.5
    CHECK(error_step(sys, law, vec1(0), vec1(0)).norm() == 0.0);
    CHECK(error_step(sys, law, vec1(2), vec1(1))(0) == doctest::Approx(2.0));
}

TEST_CASE("closed loop superposition holds to machine precision") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        LinearSystem sys;
        sys.A = Eigen::MatrixXd::NullaryExpr(3, 3, [&](Eigen::Index, Eigen::Index) { return rng.normal(); });
        sys.B = Eigen::MatrixXd::NullaryExpr(3, 2, [&](Eigen::Index, Eigen::Index) { return rng.normal(); });
        sys.G = Eigen::MatrixXd::NullaryExpr(3, 2, [&](Eigen::Index, Eigen::Index) { return rng.normal(); });
        FeedbackLaw law{Eigen::MatrixXd::NullaryExpr(2, 3, [&](Eigen::Index, Eigen::Index) { return rng.normal(); })};
        const Eigen::VectorXd x = Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal());
        const Eigen::VectorXd xbar = Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal());
        const Eigen::VectorXd ubar = Eigen::Vector2d(rng.normal(), rng.normal());
        const Eigen::VectorXd w = Eigen::Vector2d(rng.normal(), rng.normal());

        const Eigen::VectorXd whole = closed_loop_step(sys, law, x, xbar, ubar, w);
        const Eigen::VectorXd parts =
            reference_step(sys, xbar, ubar) + error_step(sys, law, x - xbar, w);
        CHECK((whole - parts).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("closed loop with zero error reproduces the reference") {
    LinearSystem sys = scalar_system(1.0, 1.0, 1.0);
    FeedbackLaw law{Eigen::MatrixXd::Constant(1, 1, 0.5)};
    const Eigen::VectorXd ref = reference_step(sys, vec1(3), vec1(1));
    const Eigen::VectorXd cl = closed_loop_step(sys, law, vec1(3), vec1(3), vec1(1), vec1(0));
    CHECK(cl.isApprox(ref));
    // scalar A=1, B=1, K=0.5, x=2, xbar=0, u=0, w=0 -> A_cl x = 1
    CHECK(closed_loop_step(sys, law, vec1(2), vec1(0), vec1(0), vec1(0))(0) == doctest::Approx(1.0));
}

TEST_CASE("norm sequences: identity, geometric decay, submultiplicative") {
    LinearSystem sys = scalar_system(1.0, 1.0, 1.0);
    FeedbackLaw law{Eigen::MatrixXd::Constant(1, 1, 0.5)};  // A_cl = 0.5
    const NormSequences seq = norm_sequences(sys, law, 6);
    CHECK(seq.acl_pow_norm[0] == doctest::Approx(1.0));
    for (int t = 0; t <= 6; ++t)
        CHECK(seq.acl_pow_norm[static_cast<std::size_t>(t)] == doctest::Approx(std::pow(0.5, t)));
    for (int t = 0; t < 6; ++t)
        CHECK(seq.acl_pow_g_norm[static_cast<std::size_t>(t)] == doctest::Approx(std::pow(0.5, t)));

    // random stable 3x3: submultiplicative and vanishing
    Rng rng(3);
    Eigen::MatrixXd m = Eigen::MatrixXd::NullaryExpr(3, 3, [&](Eigen::Index, Eigen::Index) { return rng.normal(); });
    m *= 0.8 / spectral_radius(m);
    LinearSystem sys3;
    sys3.A = m;
    sys3.B = Eigen::MatrixXd::Zero(3, 1);
    sys3.G = Eigen::MatrixXd::Identity(3, 3);
    FeedbackLaw law3{Eigen::MatrixXd::Zero(1, 3)};
    const NormSequences seq3 = norm_sequences(sys3, law3, 40);
    for (int s = 1; s < 20; ++s)
        for (int t = 1; s + t <= 40; t += 3)
            CHECK(seq3.acl_pow_norm[static_cast<std::size_t>(s + t)] <=
                  seq3.acl_pow_norm[static_cast<std::size_t>(s)] *
                          seq3.acl_pow_norm[static_cast<std::size_t>(t)] +
                      1e-12);
    CHECK(seq3.acl_pow_norm[40] < 1e-2);
    // eigenvalue oracle agrees that the matrix is stable
    CHECK(spectral_radius(m) == doctest::Approx(0.8).epsilon(1e-9));
}

TEST_CASE("power accumulation matches repeated squaring") {
    Rng rng(11);
    Eigen::MatrixXd m = Eigen::MatrixXd::NullaryExpr(4, 4, [&](Eigen::Index, Eigen::Index) { return rng.normal(); });
    m *= 0.9 / spectral_radius(m);
    Eigen::MatrixXd iterated = Eigen::MatrixXd::Identity(4, 4);
    for (int t = 0; t < 64; ++t) iterated = m * iterated;
    Eigen::MatrixXd squared = Eigen::MatrixXd::Identity(4, 4);
    Eigen::MatrixXd base = m;
    int e = 64;
    while (e > 0) {
        if (e & 1) squared = squared * base;
        base = base * base;
        e >>= 1;
    }
    CHECK((iterated - squared).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("support diameter bound") {
    LinearSystem sys = scalar_system(1.0, 1.0, 1.0);
    FeedbackLaw law{Eigen::MatrixXd::Constant(1, 1, 0.5)};
    SUBCASE("t=0 returns the initial diameter") {
        CHECK(support_diameter_bound(sys, law, SupportSpec{3.0, 1.0}, 0) == doctest::Approx(3.0));
    }
    SUBCASE("noise-free decay") {
        CHECK(support_diameter_bound(sys, law, SupportSpec{1.0, 0.0}, 2) == doctest::Approx(0.25));
    }
    SUBCASE("pure noise accumulation") {
        CHECK(support_diameter_bound(sys, law, SupportSpec{0.0, 1.0}, 2) == doctest::Approx(1.5));
    }
    SUBCASE("monotone in both diameters") {
        const double base = support_diameter_bound(sys, law, SupportSpec{1.0, 1.0}, 5);
        CHECK(support_diameter_bound(sys, law, SupportSpec{2.0, 1.0}, 5) >= base);
        CHECK(support_diameter_bound(sys, law, SupportSpec{1.0, 2.0}, 5) >= base);
    }
}

TEST_CASE("stability margin") {
    LinearSystem sys;
    sys.A = 0.5 * Eigen::MatrixXd::Identity(3, 3);
    sys.B = Eigen::MatrixXd::Zero(3, 1);
    sys.G = Eigen::MatrixXd::Identity(3, 3);
    FeedbackLaw law{Eigen::MatrixXd::Zero(1, 3)};
    CHECK(stability_margin(sys, law) == doctest::Approx(0.5));

    sys.A = Eigen::MatrixXd::Identity(3, 3);
    CHECK(stability_margin(sys, law) == doctest::Approx(1.0));

    // rotation scaled by 0.9 has eigenvalues 0.9 e^{+-i theta}
    const double theta = 0.7;
    LinearSystem rot;
    rot.A.resize(2, 2);
    rot.A << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    rot.A *= 0.9;
    rot.B = Eigen::MatrixXd::Zero(2, 1);
    rot.G = Eigen::MatrixXd::Identity(2, 2);
    FeedbackLaw law2{Eigen::MatrixXd::Zero(1, 2)};
    CHECK(stability_margin(rot, law2) == doctest::Approx(0.9).epsilon(1e-9));
}

TEST_CASE("motion plan replay consistency") {
    LinearSystem sys;
    sys.A.resize(2, 2);
    sys.A << 1, 0.1, 0, 1;
    sys.B.resize(2, 1);
    sys.B << 0.005, 0.1;
    sys.G = Eigen::MatrixXd::Identity(2, 2);

    MotionPlan plan;
    Eigen::VectorXd x = Eigen::Vector2d(0, 0);
    Rng rng(5);
    for (int t = 0; t < 20; ++t) {
        const Eigen::VectorXd u = vec1(rng.uniform(-1, 1));
        plan.steps.push_back(MotionPlanStep{u, x});
        x = reference_step(sys, x, u);
    }
    plan.steps.push_back(MotionPlanStep{vec1(0), x});
    CHECK(plan.replay_defect(sys) < 1e-9);
    CHECK(plan.horizon() == 20);
}

TEST_CASE("dlqr stabilizes a double integrator") {
    LinearSystem sys;
    sys.A.resize(2, 2);
    sys.A << 1, 0.1, 0, 1;
    sys.B.resize(2, 1);
    sys.B << 0.005, 0.1;
    sys.G = Eigen::MatrixXd::Identity(2, 2);
    FeedbackLaw law{dlqr_gain(sys.A, sys.B, Eigen::MatrixXd::Identity(2, 2),
                              Eigen::MatrixXd::Identity(1, 1))};
    CHECK(stability_margin(sys, law) < 1.0);
}

TEST_CASE("validate rejects malformed systems") {
    LinearSystem sys = scalar_system(1, 1, 1);
    sys.B.resize(2, 1);
    sys.B << 1, 1;
    CHECK_THROWS_AS(sys.validate(), std::invalid_argument);
}

}  // TEST_SUITE
