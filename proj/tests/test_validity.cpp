#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "wdr/validity.hpp"

using namespace wdr;

namespace {

WeightedAtoms atoms_1d(std::initializer_list<double> points, std::initializer_list<double> weights) {
    WeightedAtoms p;
    p.points.resize(static_cast<Eigen::Index>(points.size()), 1);
    p.weights.resize(static_cast<Eigen::Index>(weights.size()));
    Eigen::Index i = 0;
    for (double x : points) p.points(i++, 0) = x;
    i = 0;
    for (double w : weights) p.weights(i++) = w;
    return p;
}

WeightedAtoms delta2(double x, double y) {
    WeightedAtoms p;
    p.points.resize(1, 2);
    p.points << x, y;
    p.weights = Eigen::VectorXd::Ones(1);
    return p;
}

SetExpr random_obstacle(Rng& rng, int dim) {
    const int kind = dim == 2 ? static_cast<int>(rng.uniform_index(3)) : static_cast<int>(rng.uniform_index(2));
    if (kind == 0) {
        Eigen::VectorXd lo(dim), hi(dim);
        for (int i = 0; i < dim; ++i) {
            lo(i) = rng.uniform(-3.0, 1.0);
            hi(i) = lo(i) + rng.uniform(0.3, 2.5);
        }
        return make_box(lo, hi);
    }
    if (kind == 1) {
        Eigen::VectorXd c(dim);
        for (int i = 0; i < dim; ++i) c(i) = rng.uniform(-2.0, 2.0);
        return make_ball(c, rng.uniform(0.3, 1.5));
    }
    // vertices on a common circle with jittered angles stay convex and CCW
    std::vector<Eigen::Vector2d> verts;
    const double cx = rng.uniform(-2.0, 2.0), cy = rng.uniform(-2.0, 2.0);
    const double radius = rng.uniform(0.4, 1.4);
    const int sides = 3 + static_cast<int>(rng.uniform_index(4));
    for (int k = 0; k < sides; ++k) {
        const double angle = 6.2831853 * (k + 0.4 * rng.uniform()) / sides;
        verts.emplace_back(cx + radius * std::cos(angle), cy + radius * std::sin(angle));
    }
    return make_polygon(verts);
}

WeightedAtoms random_center(Rng& rng, int dim, int max_atoms) {
    WeightedAtoms p;
    const int count = 1 + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(max_atoms)));
    p.points = Eigen::MatrixXd::NullaryExpr(
        count, dim, [&](Eigen::Index, Eigen::Index) { return rng.uniform(-3.0, 3.0); });
    p.weights.resize(count);
    for (int i = 0; i < count; ++i) p.weights(i) = rng.uniform(0.05, 1.0);
    p.weights /= p.weights.sum();
    return p;
}

}  // namespace

TEST_SUITE("validity") {

TEST_CASE("worst case outside: hand instance") {
    // weights .5/.3/.2 at distances 1/2/4 with budget 0.8
    WeightedAtoms p;
    p.points.resize(3, 1);
    p.points << 1.0, 2.0, 4.0;
    p.weights.resize(3);
    p.weights << 0.5, 0.3, 0.2;
    const SetExpr obstacle = make_halfspace(Eigen::VectorXd::Constant(1, 1.0), 0.0);  // x <= 0
    CHECK(worst_case_prob_outside(AmbiguitySet{p, 0.8}, obstacle) == doctest::Approx(0.35));
}

TEST_CASE("worst case outside: budget edge cases") {
    WeightedAtoms p = atoms_1d({1.0, 2.0}, {0.6, 0.4});
    const SetExpr obstacle = make_halfspace(Eigen::VectorXd::Constant(1, 1.0), 0.0);
    CHECK(worst_case_prob_outside(AmbiguitySet{p, 0.0}, obstacle) == doctest::Approx(1.0));
    // full transport: 0.6*1 + 0.4*2 = 1.4
    CHECK(worst_case_prob_outside(AmbiguitySet{p, 1.4}, obstacle) == doctest::Approx(0.0));
    CHECK(worst_case_prob_outside(AmbiguitySet{p, 10.0}, obstacle) == doctest::Approx(0.0));
}

TEST_CASE("atoms already inside cost nothing and count as unsafe") {
    WeightedAtoms p = atoms_1d({-0.5, 1.0}, {0.3, 0.7});
    const SetExpr obstacle = make_halfspace(Eigen::VectorXd::Constant(1, 1.0), 0.0);
    // inside atom contributes 0 safe mass even with zero budget
    CHECK(worst_case_prob_outside(AmbiguitySet{p, 0.0}, obstacle) == doctest::Approx(0.7));
}

TEST_CASE("worst case outside matches the LP oracle on random instances") {
    Rng rng(51);
    for (int trial = 0; trial < 300; ++trial) {
        const int dim = 1 + static_cast<int>(rng.uniform_index(3));
        const WeightedAtoms center = random_center(rng, dim, 8);
        const SetExpr obstacle = random_obstacle(rng, dim);
        const double eps = rng.uniform(0.0, 2.0);
        const AmbiguitySet amb{center, eps};
        const double fast = worst_case_prob_outside(amb, obstacle);
        const double lp = oracle::worst_case_outside_lp(amb, obstacle);
        CHECK(fast == doctest::Approx(lp).epsilon(1e-9));
    }
}

TEST_CASE("worst case inside: single-atom closed form") {
    const SetExpr ball = make_ball(Eigen::VectorXd::Zero(2), 1.0);
    CHECK(worst_case_prob_inside(AmbiguitySet{delta2(0, 0), 0.0}, ball) == doctest::Approx(1.0));
    CHECK(worst_case_prob_inside(AmbiguitySet{delta2(0, 0), 0.05}, ball) == doctest::Approx(0.95));
    // atom outside the set contributes nothing regardless of budget
    CHECK(worst_case_prob_inside(AmbiguitySet{delta2(5, 0), 3.0}, ball) == doctest::Approx(0.0));
}

TEST_CASE("worst case probabilities are monotone in the radius") {
    Rng rng(52);
    for (int trial = 0; trial < 50; ++trial) {
        const WeightedAtoms center = random_center(rng, 2, 6);
        const SetExpr obstacle = random_obstacle(rng, 2);
        const SetExpr goal = make_ball(Eigen::Vector2d(0.5, 0.5), 2.0);
        double prev_out = 1.0, prev_in = 1.0;
        for (double eps : {0.0, 0.1, 0.4, 1.0, 3.0}) {
            const double out = worst_case_prob_outside(AmbiguitySet{center, eps}, obstacle);
            const double in = worst_case_prob_inside(AmbiguitySet{center, eps}, goal);
            CHECK(out <= prev_out + 1e-12);
            CHECK(in <= prev_in + 1e-12);
            prev_out = out;
            prev_in = in;
        }
    }
}

TEST_CASE("confidence tube radius: single-atom closed form") {
    std::vector<AmbiguityTube::Anchor> anchors(1);
    anchors[0].tau = 0;
    anchors[0].center.points = Eigen::MatrixXd::Zero(1, 2);
    anchors[0].center.weights = Eigen::VectorXd::Ones(1);
    anchors[0].radius = 0.05;
    AmbiguityTube tube(0.0 * Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(2, 2),
                       Eigen::MatrixXd::Identity(2, 2), std::move(anchors), 0.0, 0.0, 0.05, 10);
    // sup radius equals the anchor radius (A_cl = 0, no growth)
    const ConfidenceTube conf = build_confidence_tube(tube, 0.9);
    // min mass inside ball(0,r) is 1 - 0.05/r: the 0.9 threshold sits at r = 0.5
    CHECK(conf.ball_radius[0] == doctest::Approx(0.5).epsilon(1e-3));

    // re-check the strict inequality at the returned radius
    const SetExpr ball = make_ball(Eigen::VectorXd::Zero(2), conf.ball_radius[0]);
    CHECK(worst_case_prob_inside(AmbiguitySet{tube.anchor(0).center, 0.05}, ball) > 0.9);
}

TEST_CASE("confidence tube with zero radius collapses") {
    std::vector<AmbiguityTube::Anchor> anchors(1);
    anchors[0].tau = 0;
    anchors[0].center.points = Eigen::MatrixXd::Zero(1, 1);
    anchors[0].center.weights = Eigen::VectorXd::Ones(1);
    anchors[0].radius = 0.0;
    AmbiguityTube tube(Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Zero(1, 1),
                       Eigen::MatrixXd::Identity(1, 1), std::move(anchors), 0.0, 0.0, 0.05, 5);
    const ConfidenceTube conf = build_confidence_tube(tube, 0.99);
    CHECK(conf.ball_radius[0] < 1e-3);
}

TEST_CASE("bandit bins clamp") {
    BanditState state(10);
    CHECK(state.bin_for(-0.1) == 0);
    CHECK(state.bin_for(0.0) == 0);
    CHECK(state.bin_for(0.55) == 5);
    CHECK(state.bin_for(1.0) == 9);
    CHECK(state.bin_for(2.0) == 9);
}

TEST_CASE("fresh bandit invokes the exact checker about half the time") {
    // Beta(1,1) is uniform: P(u < p) = 1/2
    Rng rng(4242);
    int invoked = 0;
    const int trials = 20000;
    for (int i = 0; i < trials; ++i) {
        const double u = rng.uniform();
        const double p = rng.beta(1.0, 1.0);
        if (u < p) ++invoked;
    }
    CHECK(std::abs(invoked / static_cast<double>(trials) - 0.5) < 0.02);

    // a bin with 9 successes and 1 failure invokes at the Beta mean 0.9
    invoked = 0;
    for (int i = 0; i < trials; ++i) {
        const double u = rng.uniform();
        const double p = rng.beta(9.0, 1.0);
        if (u < p) ++invoked;
    }
    CHECK(std::abs(invoked / static_cast<double>(trials) - 0.9) < 0.03);
}

}  // TEST_SUITE
