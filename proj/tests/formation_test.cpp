#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "rbf_formation/formation.hpp"

namespace rf = rbf_formation;
using rf::Vec3;
constexpr double kPi = std::numbers::pi;

TEST(FollowerReference, IdentityRotation) {
    rf::LeaderPose leader;
    const auto ref = rf::follower_reference(leader, {Vec3(2, 0, 0)});
    EXPECT_NEAR((ref.position - Vec3(2, 0, 0)).norm(), 0.0, 1e-15);
    EXPECT_EQ(ref.yaw, 0.0);
}

TEST(FollowerReference, QuarterTurn) {
    rf::LeaderPose leader;
    leader.position = Vec3(1, 1, 1);
    leader.heading = kPi / 2;
    const auto ref = rf::follower_reference(leader, {Vec3(2, 0, 0)});
    // Rot_z(pi/2) (2,0,0) = (0,2,0)
    EXPECT_NEAR((ref.position - Vec3(1, 3, 1)).norm(), 0.0, 1e-12);
    EXPECT_DOUBLE_EQ(ref.yaw, kPi / 2);
}

TEST(FollowerReference, VerticalOffsetIgnoresHeading) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int i = 0; i < 50; ++i) {
        rf::LeaderPose leader;
        leader.position = Vec3(u(rng), u(rng), u(rng));
        leader.heading = u(rng);
        const auto ref = rf::follower_reference(leader, {Vec3(0, 0, -2)});
        EXPECT_NEAR((ref.position - (leader.position + Vec3(0, 0, -2))).norm(), 0.0, 1e-14);
    }
}

TEST(FollowerReference, ZeroOffsetReturnsLeader) {
    const auto leader = rf::spiral_leader(3.7);
    const auto ref = rf::follower_reference(leader, {Vec3::Zero()});
    EXPECT_EQ(ref.position, leader.position);
    EXPECT_EQ(ref.velocity, leader.velocity);
    EXPECT_EQ(ref.acceleration, leader.acceleration);
    EXPECT_EQ(ref.yaw, leader.heading);
}

TEST(FollowerReference, DerivativesMatchCentralDifferences) {
    const rf::FormationOffset offset{Vec3(2, 1, -0.5)};
    const double h = 1e-4;
    for (double t : {0.0 + 1e-3, 3.3, 11.0, 27.5}) {
        const auto at = [&](double tau) { return rf::follower_reference(rf::spiral_leader(tau), offset); };
        const auto ref = at(t);
        const Vec3 vel_fd = (at(t + h).position - at(t - h).position) / (2 * h);
        const Vec3 acc_fd = (at(t + h).velocity - at(t - h).velocity) / (2 * h);
        EXPECT_NEAR((vel_fd - ref.velocity).norm(), 0.0, 1e-6);
        EXPECT_NEAR((acc_fd - ref.acceleration).norm(), 0.0, 1e-6);
    }
}

TEST(FollowerReference, RejectsNonFinite) {
    rf::LeaderPose leader;
    leader.heading = NAN;
    EXPECT_THROW(rf::follower_reference(leader, {Vec3(1, 0, 0)}), rf::InvalidInputError);
}

TEST(Spiral, PublishedInitialPose) {
    const auto p = rf::spiral_leader(0.0);
    EXPECT_NEAR((p.position - Vec3(5, 0, 5)).norm(), 0.0, 1e-15);
    EXPECT_DOUBLE_EQ(p.heading, kPi / 2);
}

TEST(Spiral, HalfAndFullRevolution) {
    const auto half = rf::spiral_leader(10.0);
    EXPECT_NEAR((half.position - Vec3(-5, 0, 10)).norm(), 0.0, 1e-12);
    EXPECT_NEAR(half.heading, 3 * kPi / 2, 1e-12);
    const auto full = rf::spiral_leader(20.0);
    EXPECT_NEAR((full.position - Vec3(5, 0, 15)).norm(), 0.0, 1e-12);
    EXPECT_NEAR(full.heading, 5 * kPi / 2, 1e-12);
}

TEST(Spiral, StaysOnCylinder) {
    for (double t = 0.0; t < 200.0; t += 0.37) {
        const auto p = rf::spiral_leader(t);
        EXPECT_NEAR(p.position.x() * p.position.x() + p.position.y() * p.position.y(), 25.0, 1e-9);
    }
}

TEST(Waypoints, LinearInterpolationAtConstantSpeed) {
    const std::vector<rf::Waypoint> path = {{Vec3(0, 0, 0), 0.0}, {Vec3(10, 0, 0), 0.0}};
    const auto p = rf::waypoint_leader(path, 1.0, 5.0);
    EXPECT_NEAR((p.position - Vec3(5, 0, 0)).norm(), 0.0, 1e-12);
    EXPECT_NEAR((p.velocity - Vec3(1, 0, 0)).norm(), 0.0, 1e-12);
    EXPECT_EQ(p.acceleration, Vec3::Zero());
}

TEST(Waypoints, HoldsFinalPose) {
    const std::vector<rf::Waypoint> path = {{Vec3(0, 0, 0), 0.0}, {Vec3(10, 0, 0), 1.0}};
    const auto p = rf::waypoint_leader(path, 1.0, 50.0);
    EXPECT_EQ(p.position, Vec3(10, 0, 0));
    EXPECT_EQ(p.velocity, Vec3::Zero());
    EXPECT_DOUBLE_EQ(p.heading, 1.0);
    EXPECT_EQ(p.heading_rate, 0.0);
}

TEST(Waypoints, ArcLengthAlongVerticalSegment) {
    const std::vector<rf::Waypoint> path = {{Vec3(0, 0, 0), 0.0}, {Vec3(0, 0, 10), 0.0}};
    const auto p = rf::waypoint_leader(path, 2.0, 2.5);
    EXPECT_NEAR((p.position - Vec3(0, 0, 5)).norm(), 0.0, 1e-12);
}

TEST(Waypoints, HeadingTakesShortestWay) {
    // 170 deg -> -170 deg is a 20 deg turn through pi, not 340 deg back.
    const double a = 170.0 * kPi / 180.0;
    const std::vector<rf::Waypoint> path = {{Vec3(0, 0, 0), a}, {Vec3(10, 0, 0), -a}};
    const rf::WaypointTrajectory traj(path, 1.0);
    const auto mid = traj.pose(5.0);
    EXPECT_NEAR(mid.heading, kPi, 1e-12);
    EXPECT_NEAR(mid.heading_rate, (20.0 * kPi / 180.0) / 10.0, 1e-12);
}

TEST(Waypoints, CrossesIntermediateCorner) {
    const std::vector<rf::Waypoint> path = {{Vec3(0, 0, 0), 0.0}, {Vec3(3, 0, 0), 0.0}, {Vec3(3, 4, 0), 0.0}};
    const auto p = rf::waypoint_leader(path, 1.0, 5.0);
    EXPECT_NEAR((p.position - Vec3(3, 2, 0)).norm(), 0.0, 1e-12);
    EXPECT_NEAR((p.velocity - Vec3(0, 1, 0)).norm(), 0.0, 1e-12);
}

TEST(Waypoints, ConfigErrors) {
    EXPECT_THROW(rf::WaypointTrajectory({{Vec3(0, 0, 0), 0.0}}, 1.0), rf::ConfigError);
    EXPECT_THROW(rf::WaypointTrajectory({{Vec3(0, 0, 0), 0.0}, {Vec3(0, 0, 0), 1.0}}, 1.0), rf::ConfigError);
    EXPECT_THROW(rf::WaypointTrajectory({{Vec3(0, 0, 0), 0.0}, {Vec3(1, 0, 0), 0.0}}, 0.0), rf::ConfigError);
}

TEST(Waypoints, ParsesPlainTextTable) {
    std::istringstream in("# header\n0 0 8 0\n\n12 0 8 1.5  # trailing comment\n");
    const auto path = rf::parse_waypoints(in);
    ASSERT_EQ(path.size(), 2u);
    EXPECT_EQ(path[1].position, Vec3(12, 0, 8));
    EXPECT_DOUBLE_EQ(path[1].heading, 1.5);

    std::istringstream bad("1 2 3\n");
    EXPECT_THROW(rf::parse_waypoints(bad), rf::ConfigError);
}
