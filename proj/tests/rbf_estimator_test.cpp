#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rbf_formation/rbf_estimator.hpp"

namespace rf = rbf_formation;
using rf::Vec3;

TEST(RbfEstimator, CentersSpanRangeOnDiagonal) {
    const rf::RbfEstimator est(rf::RbfConfig{});
    const auto& c = est.position_centers();
    ASSERT_EQ(c.cols(), 50);
    EXPECT_DOUBLE_EQ(c(0, 0), -15.0);
    EXPECT_DOUBLE_EQ(c(2, 49), 15.0);
    EXPECT_NEAR(c(1, 1) - c(1, 0), 30.0 / 49.0, 1e-12);
    EXPECT_EQ(est.velocity_centers(), c);
}

TEST(RbfEstimator, SingleNeuronSitsAtOrigin) {
    rf::RbfConfig cfg;
    cfg.neurons = 1;
    const rf::RbfEstimator est(cfg);
    EXPECT_EQ(est.position_centers().col(0), Vec3::Zero());
}

TEST(RbfEstimator, GaussianActivationAtOneAndTwoWidths) {
    rf::RbfConfig cfg;
    cfg.neurons = 1;
    const rf::RbfEstimator est(cfg);
    // |p|^2 + |v|^2 = b^2 = 100
    const auto h1 = est.hidden(Vec3(6, 0, 0), Vec3(0, 8, 0));
    EXPECT_NEAR(h1[0], std::exp(-1.0), 1e-12);
    EXPECT_NEAR(h1[0], oracle::gaussian(100.0, 10.0), 1e-15);
    // 4 b^2 = 400
    const auto h2 = est.hidden(Vec3(0, 0, 20), Vec3::Zero());
    EXPECT_NEAR(h2[0], std::exp(-4.0), 1e-12);
    EXPECT_NEAR(h2[0], 0.018315638888734, 1e-12);
}

TEST(RbfEstimator, HiddenMatchesBruteForce) {
    const rf::RbfEstimator est(rf::RbfConfig{});
    const Vec3 p(1.5, -2.0, 7.0), v(0.3, 0.2, -0.4);
    const auto h = est.hidden(p, v);
    for (int j = 0; j < 50; ++j) {
        const double cj = -15.0 + 30.0 * j / 49.0;
        const Vec3 c = Vec3::Constant(cj);
        EXPECT_NEAR(h[j], oracle::gaussian((p - c).squaredNorm() + (v - c).squaredNorm(), 10.0), 1e-15);
    }
}

TEST(RbfEstimator, ScalarUpdateExample) {
    rf::RbfConfig cfg;
    cfg.neurons = 1;
    rf::RbfEstimator est(cfg);
    rf::RbfEstimator::Weights w(1, 3);
    w << 0.5, 0.0, 0.0;
    est.set_weights(w);
    rf::RbfEstimator::Hidden h(1);
    h << 1.0;
    est.update(h, Vec3(2, 0, 0));
    // W_dot = 0.1 (2 - 0.2 * 2 * 0.5) = 0.18; momentum term is zero.
    EXPECT_NEAR(est.weights()(0, 0), 0.68, 1e-12);
    EXPECT_NEAR(est.previous_weights()(0, 0), 0.68, 1e-12);
    EXPECT_NEAR(est.before_previous_weights()(0, 0), 0.5, 1e-12);
    EXPECT_NEAR(est.estimate(h).x(), 0.68, 1e-12);
}

TEST(RbfEstimator, MomentumUsesTwoPreviousIterates) {
    rf::RbfConfig cfg;
    cfg.neurons = 1;
    rf::RbfEstimator est(cfg);
    rf::RbfEstimator::Weights w = rf::RbfEstimator::Weights::Zero(1, 3);
    est.set_weights(w);
    rf::RbfEstimator::Hidden h(1);
    h << 1.0;
    est.update(h, Vec3(1, 0, 0));  // 0 + 0.1 * 1 = 0.1
    est.update(h, Vec3::Zero());   // 0.1 + 0 + 0.5 * (0.1 - 0) = 0.15
    EXPECT_NEAR(est.weights()(0, 0), 0.15, 1e-12);
}

TEST(RbfEstimator, ZeroSlidingLeavesSteadyWeightsUnchanged) {
    rf::RbfEstimator est(rf::RbfConfig{});
    const auto w0 = est.weights();
    est.update(est.hidden(Vec3(1, 2, 3), Vec3::Zero()), Vec3::Zero());
    EXPECT_EQ(est.weights(), w0);
}

TEST(RbfEstimator, SeededInitialWeightsAreReproducible) {
    rf::RbfConfig cfg;
    cfg.seed = 42;
    const rf::RbfEstimator a(cfg), b(cfg);
    EXPECT_EQ(a.weights(), b.weights());
    EXPECT_LE(a.weights().cwiseAbs().maxCoeff(), 0.1);
    cfg.seed = 43;
    const rf::RbfEstimator c(cfg);
    EXPECT_NE(a.weights(), c.weights());
    cfg.init_weight_range = 0.0;
    EXPECT_EQ(rf::RbfEstimator(cfg).weights().cwiseAbs().maxCoeff(), 0.0);
}

TEST(RbfEstimator, ConfigValidation) {
    rf::RbfConfig cfg;
    cfg.neurons = 0;
    EXPECT_THROW(rf::RbfEstimator{cfg}, rf::ConfigError);
    cfg = {};
    cfg.momentum = 1.0;
    EXPECT_THROW(rf::RbfEstimator{cfg}, rf::ConfigError);
    cfg = {};
    cfg.width = 0.0;
    EXPECT_THROW(rf::RbfEstimator{cfg}, rf::ConfigError);
}

TEST(RbfEstimator, InputErrors) {
    rf::RbfEstimator est(rf::RbfConfig{});
    EXPECT_THROW(est.hidden(Vec3(NAN, 0, 0), Vec3::Zero()), rf::InvalidInputError);
    EXPECT_THROW(est.update(rf::RbfEstimator::Hidden::Ones(3), Vec3::Zero()), rf::InvalidInputError);
    EXPECT_THROW(est.set_weights(rf::RbfEstimator::Weights::Zero(2, 3)), rf::InvalidInputError);
}

TEST(RbfEstimator, OverflowRaisesDivergence) {
    rf::RbfConfig cfg;
    cfg.neurons = 1;
    rf::RbfEstimator est(cfg);
    rf::RbfEstimator::Weights w(1, 3);
    w << 1e307, 0, 0;
    est.set_weights(w);
    rf::RbfEstimator::Hidden h(1);
    h << 1.0;
    EXPECT_THROW(est.update(h, Vec3(1e300, 0, 0)), rf::EstimatorDivergenceError);
}
