#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rbf_formation/controllers.hpp"

namespace rf = rbf_formation;
using rf::Vec3;

namespace {
const rf::UavParams kParams{};
const rf::PositionGains kGains{};
}  // namespace

TEST(Sg, Branches) {
    EXPECT_EQ(rf::sg(2.0, 0.1), 1.0);
    EXPECT_EQ(rf::sg(-2.0, 0.1), -1.0);
    EXPECT_EQ(rf::sg(0.0, 0.1), 0.0);
    EXPECT_NEAR(rf::sg(0.05, 0.1), 0.5, 1e-15);
    EXPECT_EQ(rf::sg(Vec3(2, -2, 0.05), 0.1), Vec3(1, -1, rf::sg(0.05, 0.1)));
}

TEST(PositionControl, OnReferenceReturnsFeedforward) {
    rf::UavState s;
    rf::FollowerReference ref;
    ref.position = s.position = Vec3(1, 2, 3);
    ref.velocity = s.velocity = Vec3(0.1, -0.2, 0.3);
    ref.acceleration = Vec3(0.5, 0.6, -0.7);
    auto cmd = rf::position_control(s, ref, Vec3::Zero(), kGains);
    EXPECT_EQ(cmd.accel, ref.acceleration);
    EXPECT_EQ(cmd.sliding, Vec3::Zero());
    cmd = rf::position_control(s, ref, Vec3(1, 0, 0), kGains);
    EXPECT_EQ(cmd.accel, ref.acceleration - Vec3(1, 0, 0));
}

TEST(PositionControl, ScalarHandExample) {
    rf::UavState s;
    s.position.x() = 1.0;
    const auto cmd = rf::position_control(s, rf::FollowerReference{}, Vec3::Zero(), kGains);
    // v = -3, s = 2 + 3 = 5, U = 0 - 0 - (2 * 1 + 2 * 5)
    EXPECT_NEAR(cmd.sliding.x(), 5.0, 1e-12);
    EXPECT_NEAR(cmd.accel.x(), -12.0, 1e-12);
    EXPECT_EQ(cmd.accel.y(), 0.0);
}

TEST(PositionControl, SwitchingOpposesLargeSliding) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    for (int i = 0; i < 500; ++i) {
        rf::UavState s;
        s.position = Vec3(u(rng), u(rng), u(rng));
        s.velocity = Vec3(u(rng), u(rng), u(rng));
        const auto cmd = rf::position_control(s, rf::FollowerReference{}, Vec3::Zero(), kGains);
        if (cmd.sliding.norm() < 1.0) continue;
        const Vec3 sw = -(kGains.c1 * rf::sg(cmd.sliding, kGains.epsilon) + kGains.c2 * cmd.sliding);
        EXPECT_LT(cmd.sliding.dot(sw), 0.0);
    }
}

TEST(SmcPositionControl, HandExampleAndOddSymmetry) {
    rf::UavState s;
    s.position.x() = 1.0;
    const auto cmd = rf::smc_position_control(s, rf::FollowerReference{}, kGains);
    EXPECT_NEAR(cmd.sliding.x(), 2.0, 1e-12);
    EXPECT_NEAR(cmd.accel.x(), -6.0, 1e-12);
    s.position.x() = -1.0;
    EXPECT_NEAR(rf::smc_position_control(s, rf::FollowerReference{}, kGains).accel.x(), 6.0, 1e-12);

    rf::UavState on;
    rf::FollowerReference ref;
    ref.acceleration = Vec3(1, 2, 3);
    EXPECT_EQ(rf::smc_position_control(on, ref, kGains).accel, ref.acceleration);
}

TEST(AttitudeConverter, HandExamples) {
    const double mg = kParams.mass * kParams.gravity;
    auto r = rf::attitude_converter(Vec3::Zero(), 0.0, kParams);
    EXPECT_EQ(r.angles, Vec3::Zero());
    EXPECT_NEAR(r.thrust, 6.6708, 1e-12);

    r = rf::attitude_converter(Vec3(0, 0, 9.81), 0.0, kParams);
    EXPECT_NEAR(r.angles.head<2>().norm(), 0.0, 1e-15);
    EXPECT_NEAR(r.thrust, 2 * mg, 1e-12);

    r = rf::attitude_converter(Vec3(9.81, 0, 0), 0.0, kParams);
    EXPECT_NEAR(r.angles.y(), std::numbers::pi / 4, 1e-12);
    EXPECT_NEAR(r.angles.x(), 0.0, 1e-15);
    EXPECT_NEAR(r.thrust, mg * std::sqrt(2.0), 1e-12);
}

TEST(AttitudeConverter, RoundTripThroughForceModel) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-8.0, 8.0);
    std::uniform_real_distribution<double> yaw(-std::numbers::pi, std::numbers::pi);
    for (int i = 0; i < 2000; ++i) {
        const Vec3 accel(u(rng), u(rng), -9.71 + std::abs(u(rng)) * 2.0);
        const double psi = yaw(rng);
        const auto r = rf::attitude_converter(accel, psi, kParams);
        const Vec3 back = oracle::translational_accel(r.angles.x(), r.angles.y(), psi, r.thrust, kParams.mass,
                                                      kParams.gravity, Vec3::Zero());
        EXPECT_LT((back - accel).cwiseAbs().maxCoeff(), 1e-9);
        EXPECT_LT((rf::thrust_acceleration(r.angles, r.thrust, kParams) - accel).cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(AttitudeConverter, InfeasibleBelowFreeFall) {
    EXPECT_THROW(rf::attitude_converter(Vec3(0, 0, -9.81), 0.0, kParams), rf::InfeasibleCommandError);
    EXPECT_THROW(rf::attitude_converter(Vec3(0, 0, -20), 0.0, kParams), rf::InfeasibleCommandError);
}

TEST(LimitCommand, KeepsThrustPositiveAndTiltBounded) {
    const Vec3 out = rf::limit_command(Vec3(30, 40, -50), 9.81, 0.981, 0.6);
    EXPECT_NEAR(out.z() + 9.81, 0.981, 1e-12);
    EXPECT_NEAR(std::hypot(out.x(), out.y()), 0.981 * std::tan(0.6), 1e-12);
    EXPECT_NEAR(out.y() / out.x(), 4.0 / 3.0, 1e-12);
    const Vec3 small(0.1, 0.1, 0.1);
    EXPECT_EQ(rf::limit_command(small, 9.81, 0.981, 0.6), small);
}

TEST(ReferenceDifferentiator, BackwardDifferences) {
    rf::ReferenceDifferentiator diff(0.1);
    rf::AttitudeReference r;
    r.angles = Vec3(0.0, 0.0, 0.0);
    diff.apply(r);
    EXPECT_EQ(r.rates, Vec3::Zero());
    r.angles = Vec3(0.1, -0.2, 0.0);
    diff.apply(r);
    EXPECT_NEAR(r.rates.x(), 1.0, 1e-12);
    EXPECT_NEAR(r.rates.y(), -2.0, 1e-12);
    EXPECT_EQ(r.accelerations.x(), 0.0);
    r.angles = Vec3(0.3, -0.2, 0.0);
    diff.apply(r);
    EXPECT_NEAR(r.rates.x(), 2.0, 1e-12);
    EXPECT_NEAR(r.accelerations.x(), 10.0, 1e-9);
    EXPECT_NEAR(r.accelerations.y(), 20.0, 1e-9);
    EXPECT_THROW(rf::ReferenceDifferentiator(0.0), rf::ConfigError);
}

TEST(AttitudeControl, EquilibriumGivesZeroTorque) {
    const auto tau = rf::attitude_control(rf::UavState{}, rf::AttitudeReference{}, rf::AttitudeGains{}, kParams);
    EXPECT_EQ(tau, Vec3::Zero());
}

TEST(AttitudeControl, GyroscopicCancellation) {
    rf::UavState s;
    s.rates = Vec3(0, 1, 1);
    rf::AttitudeReference ref;
    ref.rates = s.rates;
    const auto tau = rf::attitude_control(s, ref, rf::AttitudeGains{}, kParams);
    EXPECT_NEAR(tau.x(), 0.005, 1e-12);
}

TEST(AttitudeControl, RollHandExample) {
    rf::UavState s;
    s.attitude.x() = 0.1;
    const auto tau = rf::attitude_control(s, rf::AttitudeReference{}, rf::AttitudeGains{}, kParams);
    // v = -0.5, s = 0.5 + 0.5 = 1, tau = I (0 - 0) - I (2 + 2)
    EXPECT_NEAR(tau.x(), -0.028, 1e-12);
    EXPECT_EQ(tau.y(), 0.0);
}

TEST(AttitudeControl, YawErrorWrapsShortWay) {
    rf::UavState s;
    s.attitude.z() = std::numbers::pi - 0.05;
    rf::AttitudeReference ref;
    ref.angles.z() = -std::numbers::pi + 0.05;
    const auto tau = rf::attitude_control(s, ref, rf::AttitudeGains{}, kParams);
    EXPECT_GT(tau.z(), 0.0);  // error is -0.1, so push positive
}

TEST(ControllerKind, ParseRoundTrip) {
    for (auto k : {rf::ControllerKind::RbfBsmc, rf::ControllerKind::Bsmc, rf::ControllerKind::Smc}) {
        EXPECT_EQ(rf::parse_controller(rf::to_string(k)), k);
    }
    EXPECT_THROW(rf::parse_controller("mpc"), rf::ConfigError);
}
