#pragma once

// Virtual-leader trajectories and the rigid offset map that turns a leader
// pose into each follower's reference.

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "rbf_formation/dynamics.hpp"
#include "rbf_formation/error.hpp"

namespace rbf_formation {

struct LeaderPose {
    Vec3 position = Vec3::Zero();
    Vec3 velocity = Vec3::Zero();
    Vec3 acceleration = Vec3::Zero();
    double heading = 0.0;  // unwrapped
    double heading_rate = 0.0;
    double heading_acceleration = 0.0;
};

/// Desired offset of a follower from the leader, in the leader's heading frame.
struct FormationOffset {
    Vec3 delta = Vec3::Zero();
};

struct FollowerReference {
    Vec3 position = Vec3::Zero();
    Vec3 velocity = Vec3::Zero();
    Vec3 acceleration = Vec3::Zero();
    double yaw = 0.0;
    double yaw_rate = 0.0;
    double yaw_acceleration = 0.0;
};

inline Eigen::Matrix3d rot_z(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    Eigen::Matrix3d r;
    r << c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0;
    return r;
}

/// Rotates the offset by the leader heading and translates it to the leader
/// position. Velocity and acceleration follow from differentiating
/// Rot_z(psi(t)) analytically.
inline FollowerReference follower_reference(const LeaderPose& leader, const FormationOffset& offset) {
    if (!leader.position.allFinite() || !leader.velocity.allFinite() || !leader.acceleration.allFinite() ||
        !std::isfinite(leader.heading) || !std::isfinite(leader.heading_rate) ||
        !std::isfinite(leader.heading_acceleration) || !offset.delta.allFinite()) {
        throw InvalidInputError("follower_reference: non-finite leader pose or offset");
    }
    const Vec3 rotated = rot_z(leader.heading) * offset.delta;
    // e_z x v and e_z x (e_z x v)
    const Vec3 turn(-rotated.y(), rotated.x(), 0.0);
    const Vec3 turn2(-rotated.x(), -rotated.y(), 0.0);
    const double w = leader.heading_rate;

    FollowerReference ref;
    ref.position = rotated + leader.position;
    ref.velocity = w * turn + leader.velocity;
    ref.acceleration = leader.heading_acceleration * turn + w * w * turn2 + leader.acceleration;
    ref.yaw = leader.heading;
    ref.yaw_rate = leader.heading_rate;
    ref.yaw_acceleration = leader.heading_acceleration;
    return ref;
}

/// Climbing circle: radius r, period T, climb rate v_z, heading tangent to the circle.
struct SpiralTrajectory {
    double radius = 5.0;
    double period = 20.0;
    double climb_rate = 0.5;
    double initial_altitude = 5.0;
    double heading_offset = std::numbers::pi / 2.0;

    LeaderPose pose(double t) const {
        const double w = 2.0 * std::numbers::pi / period;
        const double c = std::cos(w * t), s = std::sin(w * t);
        LeaderPose p;
        p.position = Vec3(radius * c, radius * s, climb_rate * t + initial_altitude);
        p.velocity = Vec3(-radius * w * s, radius * w * c, climb_rate);
        p.acceleration = Vec3(-radius * w * w * c, -radius * w * w * s, 0.0);
        p.heading = w * t + heading_offset;
        p.heading_rate = w;
        p.heading_acceleration = 0.0;
        return p;
    }
};

/// Spiral with the default geometry used by the shipped scenarios.
inline LeaderPose spiral_leader(double t) { return SpiralTrajectory{}.pose(t); }

struct Waypoint {
    Vec3 position = Vec3::Zero();
    double heading = 0.0;
};

/// Constant-speed piecewise-linear path. Heading is interpolated linearly in
/// arc length along the shortest angular direction between waypoints.
class WaypointTrajectory {
public:
    WaypointTrajectory(std::vector<Waypoint> waypoints, double speed) : waypoints_(std::move(waypoints)), speed_(speed) {
        if (waypoints_.size() < 2) throw ConfigError("waypoint path needs at least two waypoints");
        if (!(speed_ > 0.0) || !std::isfinite(speed_)) throw ConfigError("waypoint speed must be positive");
        unwrapped_.reserve(waypoints_.size());
        cumulative_.reserve(waypoints_.size());
        unwrapped_.push_back(waypoints_.front().heading);
        cumulative_.push_back(0.0);
        for (std::size_t i = 1; i < waypoints_.size(); ++i) {
            const Waypoint& a = waypoints_[i - 1];
            const Waypoint& b = waypoints_[i];
            if (!b.position.allFinite() || !std::isfinite(b.heading)) throw ConfigError("non-finite waypoint");
            const double len = (b.position - a.position).norm();
            if (len == 0.0) throw ConfigError("duplicate consecutive waypoints at index " + std::to_string(i));
            cumulative_.push_back(cumulative_.back() + len);
            unwrapped_.push_back(unwrapped_.back() + angle_diff(b.heading, unwrapped_.back()));
        }
    }

    const std::vector<Waypoint>& waypoints() const { return waypoints_; }
    double speed() const { return speed_; }
    double length() const { return cumulative_.back(); }

    LeaderPose pose(double t) const {
        const double s = speed_ * std::max(t, 0.0);
        LeaderPose p;
        if (s >= length()) {
            p.position = waypoints_.back().position;
            p.heading = unwrapped_.back();
            return p;
        }
        // Segment k spans [cumulative_[k], cumulative_[k+1]).
        std::size_t k = 0;
        while (k + 2 < cumulative_.size() && s >= cumulative_[k + 1]) ++k;
        const double seg = cumulative_[k + 1] - cumulative_[k];
        const double frac = (s - cumulative_[k]) / seg;
        const Vec3 dir = (waypoints_[k + 1].position - waypoints_[k].position) / seg;
        p.position = waypoints_[k].position + (s - cumulative_[k]) * dir;
        p.velocity = speed_ * dir;
        const double dh = unwrapped_[k + 1] - unwrapped_[k];
        p.heading = unwrapped_[k] + frac * dh;
        p.heading_rate = speed_ * dh / seg;
        return p;
    }

private:
    std::vector<Waypoint> waypoints_;
    double speed_;
    std::vector<double> cumulative_;
    std::vector<double> unwrapped_;
};

inline LeaderPose waypoint_leader(const std::vector<Waypoint>& path, double speed, double t) {
    return WaypointTrajectory(path, speed).pose(t);
}

/// Parses "x y z psi" lines; blank lines and '#' comments are skipped.
inline std::vector<Waypoint> parse_waypoints(std::istream& in, const std::string& source = "<stream>") {
    std::vector<Waypoint> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        double x, y, z, psi;
        if (!(fields >> x)) continue;
        if (!(fields >> y >> z >> psi)) {
            throw ConfigError(source + ":" + std::to_string(lineno) + ": expected four numbers 'x y z psi'");
        }
        std::string extra;
        if (fields >> extra) throw ConfigError(source + ":" + std::to_string(lineno) + ": trailing token '" + extra + "'");
        out.push_back({Vec3(x, y, z), psi});
    }
    return out;
}

inline std::vector<Waypoint> load_waypoints(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open waypoint file " + path);
    return parse_waypoints(in, path);
}

using LeaderTrajectory = std::variant<SpiralTrajectory, WaypointTrajectory>;

inline LeaderPose leader_pose(const LeaderTrajectory& trajectory, double t) {
    return std::visit([t](const auto& traj) { return traj.pose(t); }, trajectory);
}

}  // namespace rbf_formation
