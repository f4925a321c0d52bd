#pragma once

/**
 * @file dynamics.hpp
 * @brief Euler-angle quadrotor rigid-body model, rotor mixer and RK4 stepping.
 *
 * State layout follows the usual world-frame convention: position and
 * velocity in the inertial frame, ZYX Euler angles (roll, pitch, yaw) and
 * their time derivatives. The translational disturbance enters as a force.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <Eigen/Core>

#include "rbf_formation/error.hpp"

namespace rbf_formation {

using Vec3 = Eigen::Vector3d;

/// Physical parameters. Defaults are the Hummingbird airframe.
struct UavParams {
    double mass = 0.68;          // kg
    double gravity = 9.81;       // m/s^2
    double Ix = 0.007;           // kg m^2
    double Iy = 0.007;
    double Iz = 0.012;
    double arm_length = 0.17;    // m
    double k_thrust = 29e-6;
    double k_drag = 1.1e-6;

    // Optional per-rotor clamp f_i in [0, rotor_force_max]. Off keeps ideal actuators.
    bool rotor_saturation = false;
    double rotor_force_max = 4.0;  // N

    double drag_to_thrust() const { return k_drag / k_thrust; }

    void validate() const {
        const std::array<double, 8> positive = {mass, gravity, Ix, Iy, Iz, arm_length, k_thrust, k_drag};
        for (double v : positive) {
            if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("UAV parameters must be finite and strictly positive");
        }
        if (rotor_saturation && !(rotor_force_max > 0.0)) throw ConfigError("rotor_force_max must be positive");
    }
};

struct UavState {
    Vec3 position = Vec3::Zero();
    Vec3 velocity = Vec3::Zero();
    Vec3 attitude = Vec3::Zero();  // roll, pitch, yaw
    Vec3 rates = Vec3::Zero();     // Euler angle rates

    bool finite() const {
        return position.allFinite() && velocity.allFinite() && attitude.allFinite() && rates.allFinite();
    }
};

/// Time derivative of UavState: (velocity, acceleration, rates, angular acceleration).
struct UavStateDerivative {
    Vec3 velocity = Vec3::Zero();
    Vec3 acceleration = Vec3::Zero();
    Vec3 rates = Vec3::Zero();
    Vec3 angular_acceleration = Vec3::Zero();
};

struct ControlInput {
    double thrust = 0.0;  // N
    Vec3 torque = Vec3::Zero();  // roll, pitch, yaw (N m)

    bool finite() const { return std::isfinite(thrust) && torque.allFinite(); }
};

using RotorForces = std::array<double, 4>;

/// Largest admissible |roll| or |pitch| before the Euler model is considered broken.
inline constexpr double kTiltLimit = std::numbers::pi / 2.0 - 0.01;

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(a + std::numbers::pi, two_pi);
    if (r <= 0.0) r += two_pi;
    return r - std::numbers::pi;
}

/// Shortest signed difference a - b, in (-pi, pi].
inline double angle_diff(double a, double b) { return wrap_angle(a - b); }

/// Rotor forces to total thrust and body torques. Rotor i produces a reaction
/// torque (kd/kt) f_i; rotors 1 and 3 spin opposite to 2 and 4.
inline ControlInput mix(const RotorForces& f, const UavParams& p) {
    for (double fi : f) {
        if (!std::isfinite(fi) || fi < 0.0) throw InvalidInputError("rotor forces must be finite and non-negative");
    }
    const double k = p.drag_to_thrust();
    ControlInput u;
    u.thrust = f[0] + f[1] + f[2] + f[3];
    u.torque.x() = p.arm_length * (f[3] - f[1]);
    u.torque.y() = p.arm_length * (f[2] - f[0]);
    u.torque.z() = k * (f[1] + f[3] - f[0] - f[2]);
    return u;
}

/// Inverse of mix. The result may contain negative entries when the input
/// is not realisable by non-negative rotor forces.
inline RotorForces allocate(const ControlInput& u, const UavParams& p) {
    const double sum = u.thrust;
    const double roll = u.torque.x() / p.arm_length;   // f4 - f2
    const double pitch = u.torque.y() / p.arm_length;  // f3 - f1
    const double yaw = u.torque.z() / p.drag_to_thrust();  // (f2 + f4) - (f1 + f3)
    const double even = 0.5 * (sum + yaw);  // f2 + f4
    const double odd = 0.5 * (sum - yaw);   // f1 + f3
    return {0.5 * (odd - pitch), 0.5 * (even - roll), 0.5 * (odd + pitch), 0.5 * (even + roll)};
}

/// Applies actuator limits. Without rotor saturation only f_t >= 0 is enforced.
inline ControlInput saturate(const ControlInput& u, const UavParams& p) {
    if (!p.rotor_saturation) {
        ControlInput out = u;
        out.thrust = std::max(0.0, u.thrust);
        return out;
    }
    RotorForces f = allocate(u, p);
    for (double& fi : f) fi = std::clamp(fi, 0.0, p.rotor_force_max);
    return mix(f, p);
}

namespace detail {

inline UavStateDerivative derivative(const UavState& s, const ControlInput& u, const Vec3& disturbance,
                                     const UavParams& p) {
    const double phi = s.attitude.x();
    const double theta = s.attitude.y();
    const double psi = s.attitude.z();
    const double cphi = std::cos(phi), sphi = std::sin(phi);
    const double cth = std::cos(theta), sth = std::sin(theta);
    const double cpsi = std::cos(psi), spsi = std::sin(psi);
    const double thrust_acc = u.thrust / p.mass;

    UavStateDerivative d;
    d.velocity = s.velocity;
    d.acceleration.x() = (cphi * sth * cpsi + sphi * spsi) * thrust_acc;
    d.acceleration.y() = (cphi * sth * spsi - sphi * cpsi) * thrust_acc;
    d.acceleration.z() = cphi * cth * thrust_acc - p.gravity;
    d.acceleration += disturbance / p.mass;

    const double dphi = s.rates.x(), dth = s.rates.y(), dpsi = s.rates.z();
    d.rates = s.rates;
    d.angular_acceleration.x() = (dth * dpsi * (p.Iy - p.Iz) + u.torque.x()) / p.Ix;
    d.angular_acceleration.y() = (dphi * dpsi * (p.Iz - p.Ix) + u.torque.y()) / p.Iy;
    d.angular_acceleration.z() = (dphi * dth * (p.Ix - p.Iy) + u.torque.z()) / p.Iz;
    return d;
}

}  // namespace detail

inline UavStateDerivative state_derivative(const UavState& s, const ControlInput& u, const Vec3& disturbance,
                                           const UavParams& p) {
    if (!s.finite() || !u.finite() || !disturbance.allFinite()) {
        throw InvalidInputError("state_derivative: non-finite argument");
    }
    return detail::derivative(s, u, disturbance, p);
}

inline constexpr double kMaxStep = 0.05;

/// One classical RK4 step with input and disturbance held over the step.
/// `time` is only used to annotate a DivergenceError.
inline UavState step(const UavState& s, const ControlInput& u, const Vec3& disturbance, const UavParams& p, double dt,
                     double time = 0.0) {
    if (!(dt > 0.0) || dt > kMaxStep) throw ConfigError("integration step must satisfy 0 < dt <= 0.05 s");

    auto advance = [](const UavState& base, const UavStateDerivative& k, double h) {
        UavState out;
        out.position = base.position + h * k.velocity;
        out.velocity = base.velocity + h * k.acceleration;
        out.attitude = base.attitude + h * k.rates;
        out.rates = base.rates + h * k.angular_acceleration;
        return out;
    };

    const auto k1 = state_derivative(s, u, disturbance, p);
    const auto k2 = detail::derivative(advance(s, k1, dt / 2), u, disturbance, p);
    const auto k3 = detail::derivative(advance(s, k2, dt / 2), u, disturbance, p);
    const auto k4 = detail::derivative(advance(s, k3, dt), u, disturbance, p);

    UavState next;
    next.position = s.position + dt / 6.0 * (k1.velocity + 2.0 * k2.velocity + 2.0 * k3.velocity + k4.velocity);
    next.velocity =
        s.velocity + dt / 6.0 * (k1.acceleration + 2.0 * k2.acceleration + 2.0 * k3.acceleration + k4.acceleration);
    next.attitude = s.attitude + dt / 6.0 * (k1.rates + 2.0 * k2.rates + 2.0 * k3.rates + k4.rates);
    next.rates = s.rates + dt / 6.0 * (k1.angular_acceleration + 2.0 * k2.angular_acceleration +
                                       2.0 * k3.angular_acceleration + k4.angular_acceleration);

    if (!next.finite()) throw DivergenceError("non-finite state", time + dt);
    if (std::abs(next.attitude.x()) > kTiltLimit || std::abs(next.attitude.y()) > kTiltLimit) {
        throw DivergenceError("roll/pitch left the Euler-angle validity region", time + dt);
    }
    next.attitude.z() = wrap_angle(next.attitude.z());
    return next;
}

}  // namespace rbf_formation
