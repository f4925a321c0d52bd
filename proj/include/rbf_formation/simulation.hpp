#pragma once

/**
 * @file simulation.hpp
 * @brief Closed-loop formation simulation.
 *
 * Followers only interact through the shared leader trajectory and wind
 * field, so each one is simulated independently. Per control period:
 *
 *   leader pose -> follower reference -> position law (with RBF estimate)
 *   -> converter -> attitude law -> actuator limits -> RK4 plant step
 *
 * The RBF estimator is updated once per period, before the estimate is read.
 */

#include <cstdint>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include "rbf_formation/controllers.hpp"
#include "rbf_formation/dynamics.hpp"
#include "rbf_formation/formation.hpp"
#include "rbf_formation/rbf_estimator.hpp"
#include "rbf_formation/scenario.hpp"
#include "rbf_formation/wind.hpp"

namespace rbf_formation {

/// One logged control period of one follower.
struct TraceRow {
    double time = 0.0;
    UavState state;
    Vec3 ref_position = Vec3::Zero();
    double ref_yaw = 0.0;
    Vec3 error = Vec3::Zero();
    Vec3 command = Vec3::Zero();  // U
    ControlInput input;
    Vec3 estimate = Vec3::Zero();     // D-hat
    Vec3 true_per_mass = Vec3::Zero();  // d / m
    double sliding_norm = 0.0;
    double weight_norm = 0.0;
};

struct FollowerTrace {
    std::string name;
    std::vector<TraceRow> rows;
    std::optional<std::string> divergence;  // message when the run aborted
    double divergence_time = 0.0;
};

struct SimTrace {
    std::string scenario;
    ControllerKind controller = ControllerKind::RbfBsmc;
    double dt = 0.01;
    std::vector<FollowerTrace> followers;

    bool diverged() const {
        for (const auto& f : followers) {
            if (f.divergence) return true;
        }
        return false;
    }
};

/// Per-follower estimator seed: independent of follower order.
inline std::uint64_t follower_seed(std::uint64_t seed, const std::string& name) {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (unsigned char ch : name) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (h | 1);  // splitmix64 finaliser
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Simulates a single follower for the whole scenario.
inline FollowerTrace run_follower(const ScenarioConfig& config, const FollowerConfig& follower) {
    FollowerTrace trace;
    trace.name = follower.name;

    RbfConfig rbf_config = config.rbf;
    rbf_config.seed = follower_seed(config.seed, follower.name);
    RbfEstimator estimator(rbf_config);
    ReferenceDifferentiator differentiator(config.dt);
    const bool use_estimator = config.controller == ControllerKind::RbfBsmc;
    const double min_vertical = config.min_thrust_fraction * config.uav.gravity;

    const std::size_t steps = config.step_count();
    const std::size_t log_every = config.log_every();
    trace.rows.reserve(steps / log_every + 1);

    UavState state = follower.initial;
    state.attitude.z() = wrap_angle(state.attitude.z());
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * config.dt;
        try {
            const FollowerReference ref = follower_reference(leader_pose(config.leader, t), follower.offset);
            const WindSample wind = sample(config.wind, t, config.uav.mass);
            const Vec3 force = follower.wind_scale * wind.force;

            PositionCommand cmd;
            Vec3 estimate = Vec3::Zero();
            if (config.controller == ControllerKind::Smc) {
                cmd = smc_position_control(state, ref, config.position_gains);
            } else if (use_estimator) {
                // The sliding variable does not depend on the estimate.
                const Vec3 sliding = position_control(state, ref, Vec3::Zero(), config.position_gains).sliding;
                const auto hidden = config.estimator_input == EstimatorInput::State
                                        ? estimator.hidden(state.position, state.velocity)
                                        : estimator.hidden(state.position - ref.position, state.velocity - ref.velocity);
                if (!config.freeze_estimator) estimator.update(hidden, sliding, config.dt);
                estimate = estimator.estimate(hidden);
                cmd = position_control(state, ref, estimate, config.position_gains);
            } else {
                cmd = position_control(state, ref, Vec3::Zero(), config.position_gains);
            }

            const Vec3 accel = limit_command(cmd.accel, config.uav.gravity, min_vertical, config.max_tilt);
            AttitudeReference att_ref = attitude_converter(accel, ref.yaw, config.uav);
            differentiator.apply(att_ref);
            att_ref.rates.z() = ref.yaw_rate;
            att_ref.accelerations.z() = ref.yaw_acceleration;

            ControlInput input;
            input.thrust = att_ref.thrust;
            input.torque = attitude_control(state, att_ref, config.attitude_gains, config.uav);
            input = saturate(input, config.uav);

            if (k % log_every == 0) {
                TraceRow row;
                row.time = t;
                row.state = state;
                row.ref_position = ref.position;
                row.ref_yaw = wrap_angle(ref.yaw);
                row.error = state.position - ref.position;
                row.command = cmd.accel;
                row.input = input;
                row.estimate = estimate;
                row.true_per_mass = force / config.uav.mass;
                row.sliding_norm = cmd.sliding.norm();
                row.weight_norm = use_estimator ? estimator.weights().norm() : 0.0;
                trace.rows.push_back(row);
            }

            state = step(state, input, force, config.uav, config.dt, t);
        } catch (const DivergenceError& e) {
            trace.divergence = e.what();
            trace.divergence_time = e.time();
            break;
        } catch (const Error& e) {
            trace.divergence = e.what();
            trace.divergence_time = t;
            break;
        }
    }
    return trace;
}

/// Runs every follower. Configuration errors are thrown before stepping;
/// divergence is reported through the returned trace.
inline SimTrace run_scenario(const ScenarioConfig& config) {
    config.validate();
    SimTrace trace;
    trace.scenario = config.name;
    trace.controller = config.controller;
    trace.dt = config.log_period;
    if (config.parallel && config.followers.size() > 1) {
        std::vector<std::future<FollowerTrace>> jobs;
        for (const auto& f : config.followers) {
            jobs.push_back(std::async(std::launch::async, [&config, &f] { return run_follower(config, f); }));
        }
        for (auto& j : jobs) trace.followers.push_back(j.get());
    } else {
        for (const auto& f : config.followers) trace.followers.push_back(run_follower(config, f));
    }
    return trace;
}

}  // namespace rbf_formation
