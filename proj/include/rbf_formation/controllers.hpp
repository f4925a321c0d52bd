#pragma once

/**
 * @file controllers.hpp
 * @brief Cascaded backstepping sliding-mode position and attitude control.
 *
 * The outer loop produces per-unit-mass translational accelerations U, the
 * converter maps U and the desired yaw to roll/pitch references plus thrust,
 * and the inner loop computes body torques. A plain SMC position law without
 * backstepping or disturbance feedforward is provided as a baseline.
 */

#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "rbf_formation/dynamics.hpp"
#include "rbf_formation/error.hpp"
#include "rbf_formation/formation.hpp"

namespace rbf_formation {

/// Boundary-layer saturation: sign(x) outside [-eps, eps], linear inside.
inline double sg(double x, double eps) {
    if (x > eps) return 1.0;
    if (x < -eps) return -1.0;
    return x / eps;
}

inline Vec3 sg(const Vec3& x, double eps) { return Vec3(sg(x.x(), eps), sg(x.y(), eps), sg(x.z(), eps)); }

struct PositionGains {
    double lambda = 3.0;
    double gamma = 2.0;
    double c1 = 2.0;
    double c2 = 2.0;
    double epsilon = 0.1;

    void validate() const {
        if (!(lambda > 0.0 && gamma > 0.0 && c1 > 0.0 && c2 > 0.0)) throw ConfigError("position gains must be positive");
        if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("sg width epsilon must lie in (0, 1)");
    }
};

struct AxisGains {
    double lambda = 5.0;
    double gamma = 5.0;
    double c1 = 2.0;
    double c2 = 2.0;
};

struct AttitudeGains {
    AxisGains roll;
    AxisGains pitch;
    AxisGains yaw;
    double epsilon = 0.1;

    void validate() const {
        for (const AxisGains* g : {&roll, &pitch, &yaw}) {
            if (!(g->lambda > 0.0 && g->gamma > 0.0 && g->c1 > 0.0 && g->c2 > 0.0)) {
                throw ConfigError("attitude gains must be positive");
            }
        }
        if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("sg width epsilon must lie in (0, 1)");
    }
};

struct PositionCommand {
    Vec3 accel = Vec3::Zero();    // U, m/s^2
    Vec3 sliding = Vec3::Zero();  // s_xi
};

/// Backstepping SMC on the translational double integrator xi'' = U + D.
inline PositionCommand position_control(const UavState& state, const FollowerReference& ref,
                                        const Vec3& disturbance_estimate, const PositionGains& g) {
    const Vec3 error = state.position - ref.position;
    const Vec3 error_rate = state.velocity - ref.velocity;
    const Vec3 virtual_velocity = ref.velocity - g.lambda * error;
    const Vec3 virtual_accel = ref.acceleration - g.lambda * error_rate;

    PositionCommand cmd;
    cmd.sliding = g.gamma * error + (state.velocity - virtual_velocity);
    const Vec3 equivalent = virtual_accel - g.gamma * error_rate - disturbance_estimate;
    const Vec3 switching = -(g.c1 * sg(cmd.sliding, g.epsilon) + g.c2 * cmd.sliding);
    cmd.accel = equivalent + switching;
    if (!cmd.accel.allFinite()) throw InvalidInputError("position_control: non-finite command");
    return cmd;
}

/// Classical SMC baseline: s = e' + gamma e, no backstepping and no disturbance feedforward.
inline PositionCommand smc_position_control(const UavState& state, const FollowerReference& ref,
                                            const PositionGains& g) {
    const Vec3 error = state.position - ref.position;
    const Vec3 error_rate = state.velocity - ref.velocity;
    PositionCommand cmd;
    cmd.sliding = error_rate + g.gamma * error;
    cmd.accel = ref.acceleration - g.gamma * error_rate - (g.c1 * sg(cmd.sliding, g.epsilon) + g.c2 * cmd.sliding);
    if (!cmd.accel.allFinite()) throw InvalidInputError("smc_position_control: non-finite command");
    return cmd;
}

/// Reference for the inner loop. Angles are (roll, pitch, yaw).
struct AttitudeReference {
    Vec3 angles = Vec3::Zero();
    Vec3 rates = Vec3::Zero();
    Vec3 accelerations = Vec3::Zero();
    double thrust = 0.0;
};

/// Inverts the translational force model for the desired yaw: returns the
/// roll/pitch and thrust that realise U. Rates are left at zero.
inline AttitudeReference attitude_converter(const Vec3& accel, double desired_yaw, const UavParams& p) {
    if (!accel.allFinite() || !std::isfinite(desired_yaw)) throw InvalidInputError("attitude_converter: non-finite input");
    const double vertical = accel.z() + p.gravity;
    if (!(vertical > 0.0)) throw InfeasibleCommandError("attitude_converter: u_z <= -g needs negative thrust");
    const double c = std::cos(desired_yaw), s = std::sin(desired_yaw);
    AttitudeReference ref;
    const double pitch = std::atan((accel.x() * c + accel.y() * s) / vertical);
    const double roll = std::atan(std::cos(pitch) * (accel.x() * s - accel.y() * c) / vertical);
    ref.angles = Vec3(roll, pitch, desired_yaw);
    ref.thrust = p.mass * vertical / (std::cos(roll) * std::cos(pitch));
    return ref;
}

/// Clamps a position command to what the airframe may request: u_z + g is
/// kept at or above `min_vertical` and the horizontal part is scaled down so
/// the implied tilt does not exceed `max_tilt`.
inline Vec3 limit_command(const Vec3& accel, double gravity, double min_vertical, double max_tilt) {
    Vec3 out = accel;
    out.z() = std::max(out.z(), min_vertical - gravity);
    const double horizontal = std::hypot(out.x(), out.y());
    const double allowed = (out.z() + gravity) * std::tan(max_tilt);
    if (horizontal > allowed) {
        out.x() *= allowed / horizontal;
        out.y() *= allowed / horizontal;
    }
    return out;
}

/// Translational acceleration produced by thrust at the given attitude, gravity included.
inline Vec3 thrust_acceleration(const Vec3& attitude, double thrust, const UavParams& p) {
    const double cphi = std::cos(attitude.x()), sphi = std::sin(attitude.x());
    const double cth = std::cos(attitude.y()), sth = std::sin(attitude.y());
    const double cpsi = std::cos(attitude.z()), spsi = std::sin(attitude.z());
    const double a = thrust / p.mass;
    return Vec3((cphi * sth * cpsi + sphi * spsi) * a, (cphi * sth * spsi - sphi * cpsi) * a, cphi * cth * a - p.gravity);
}

/// Supplies roll/pitch reference rates and accelerations by backward
/// differences over the control period. Both start at zero on the first call.
class ReferenceDifferentiator {
public:
    explicit ReferenceDifferentiator(double period) : period_(period) {
        if (!(period > 0.0)) throw ConfigError("differentiator period must be positive");
    }

    /// Fills roll/pitch rates and accelerations of `ref` in place. Yaw
    /// derivatives are supplied by the caller.
    void apply(AttitudeReference& ref) {
        Eigen::Vector2d angles(ref.angles.x(), ref.angles.y());
        Eigen::Vector2d rates = Eigen::Vector2d::Zero();
        Eigen::Vector2d accels = Eigen::Vector2d::Zero();
        if (previous_angles_) {
            rates = (angles - *previous_angles_) / period_;
            if (previous_rates_) accels = (rates - *previous_rates_) / period_;
            previous_rates_ = rates;
        }
        previous_angles_ = angles;
        ref.rates.x() = rates.x();
        ref.rates.y() = rates.y();
        ref.accelerations.x() = accels.x();
        ref.accelerations.y() = accels.y();
    }

    void reset() {
        previous_angles_.reset();
        previous_rates_.reset();
    }

private:
    double period_;
    std::optional<Eigen::Vector2d> previous_angles_;
    std::optional<Eigen::Vector2d> previous_rates_;
};

namespace detail {

inline double axis_torque(double error, double rate, double ref_rate, double ref_accel, double inertia,
                          double gyroscopic, const AxisGains& g, double eps) {
    const double virtual_rate = ref_rate - g.lambda * error;
    const double virtual_accel = ref_accel - g.lambda * (rate - ref_rate);
    const double sliding = g.gamma * error + (rate - virtual_rate);
    const double equivalent = inertia * (virtual_accel - g.gamma * (rate - ref_rate)) - gyroscopic;
    const double switching = -inertia * (g.c1 * sg(sliding, eps) + g.c2 * sliding);
    return equivalent + switching;
}

}  // namespace detail

/// Backstepping SMC for roll, pitch and yaw, cancelling the gyroscopic coupling.
/// Yaw error uses the shortest angular difference.
inline Vec3 attitude_control(const UavState& state, const AttitudeReference& ref, const AttitudeGains& g,
                             const UavParams& p) {
    const Vec3& a = state.attitude;
    const Vec3& w = state.rates;
    const double e_roll = a.x() - ref.angles.x();
    const double e_pitch = a.y() - ref.angles.y();
    const double e_yaw = angle_diff(a.z(), ref.angles.z());

    Vec3 tau;
    tau.x() = detail::axis_torque(e_roll, w.x(), ref.rates.x(), ref.accelerations.x(), p.Ix, w.y() * w.z() * (p.Iy - p.Iz),
                                  g.roll, g.epsilon);
    tau.y() = detail::axis_torque(e_pitch, w.y(), ref.rates.y(), ref.accelerations.y(), p.Iy,
                                  w.x() * w.z() * (p.Iz - p.Ix), g.pitch, g.epsilon);
    tau.z() = detail::axis_torque(e_yaw, w.z(), ref.rates.z(), ref.accelerations.z(), p.Iz, w.x() * w.y() * (p.Ix - p.Iy),
                                  g.yaw, g.epsilon);
    if (!tau.allFinite()) throw InvalidInputError("attitude_control: non-finite torque");
    return tau;
}

enum class ControllerKind { RbfBsmc, Bsmc, Smc };

inline std::string_view to_string(ControllerKind kind) {
    switch (kind) {
        case ControllerKind::RbfBsmc: return "rbf-bsmc";
        case ControllerKind::Bsmc: return "bsmc";
        case ControllerKind::Smc: return "smc";
    }
    return "?";
}

inline ControllerKind parse_controller(std::string_view token) {
    if (token == "rbf-bsmc") return ControllerKind::RbfBsmc;
    if (token == "bsmc") return ControllerKind::Bsmc;
    if (token == "smc") return ControllerKind::Smc;
    throw ConfigError("unknown controller '" + std::string(token) + "' (expected rbf-bsmc, bsmc or smc)");
}

}  // namespace rbf_formation
