#pragma once

/**
 * @file scenario.hpp
 * @brief Declarative description of one simulation run and its JSON form.
 *
 * Every key is optional; omitted keys take the defaults below, which are the
 * Hummingbird airframe and the published controller gains. Two presets,
 * scenario1 (spiral leader, gust + step wind) and scenario2 (waypoint leader,
 * step winds), reproduce the two tracking experiments.
 */

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rbf_formation/controllers.hpp"
#include "rbf_formation/dynamics.hpp"
#include "rbf_formation/error.hpp"
#include "rbf_formation/formation.hpp"
#include "rbf_formation/rbf_estimator.hpp"
#include "rbf_formation/wind.hpp"

namespace rbf_formation {

/// Signals fed to the estimator's two input slots.
enum class EstimatorInput {
    State,          // position and velocity
    TrackingError,  // position and velocity errors w.r.t. the follower reference
};

inline std::string_view to_string(EstimatorInput in) { return in == EstimatorInput::State ? "state" : "tracking-error"; }

inline EstimatorInput parse_estimator_input(std::string_view s) {
    if (s == "state") return EstimatorInput::State;
    if (s == "tracking-error") return EstimatorInput::TrackingError;
    throw ConfigError("unknown estimator input '" + std::string(s) + "' (expected state or tracking-error)");
}

struct FollowerConfig {
    std::string name;
    UavState initial;
    FormationOffset offset;
    double wind_scale = 1.0;
};

struct ScenarioConfig {
    std::string name = "scenario";
    double duration = 40.0;
    double dt = 0.01;
    double log_period = 0.01;
    ControllerKind controller = ControllerKind::RbfBsmc;
    LeaderTrajectory leader = SpiralTrajectory{};
    std::vector<FollowerConfig> followers;
    UavParams uav;
    PositionGains position_gains;
    AttitudeGains attitude_gains;
    RbfConfig rbf;
    EstimatorInput estimator_input = EstimatorInput::State;
    // Keep the estimator at its initial weights (ablation).
    bool freeze_estimator = false;
    WindProfile wind;
    std::uint64_t seed = 1;
    // Lower bound on u_z + g as a fraction of g, keeping the thrust request positive.
    double min_thrust_fraction = 0.1;
    // Horizontal command is scaled so the requested tilt stays below this (rad).
    double max_tilt = 0.6;
    std::string output_dir = "out";
    bool parallel = false;

    std::size_t step_count() const { return static_cast<std::size_t>(std::llround(duration / dt)); }
    std::size_t log_every() const { return static_cast<std::size_t>(std::llround(log_period / dt)); }

    void validate() const {
        if (!(duration >= 0.0) || !std::isfinite(duration)) throw ConfigError("duration must be finite and >= 0");
        if (!(dt > 0.0) || dt > kMaxStep) throw ConfigError("dt must satisfy 0 < dt <= 0.05 s");
        if (std::abs(static_cast<double>(step_count()) * dt - duration) > 1e-9 * std::max(1.0, duration)) {
            throw ConfigError("duration must be an integer multiple of dt");
        }
        const double ratio = log_period / dt;
        if (!(log_period > 0.0) || ratio < 1.0 - 1e-9 || std::abs(ratio - std::round(ratio)) > 1e-9) {
            throw ConfigError("log_period must be a positive integer multiple of dt");
        }
        if (!(min_thrust_fraction > 0.0 && min_thrust_fraction <= 1.0)) {
            throw ConfigError("min_thrust_fraction must lie in (0, 1]");
        }
        if (!(max_tilt > 0.0 && max_tilt < kTiltLimit)) throw ConfigError("max_tilt must lie in (0, pi/2 - 0.01)");
        uav.validate();
        position_gains.validate();
        attitude_gains.validate();
        rbf.validate();
        wind.validate();
        for (std::size_t i = 0; i < followers.size(); ++i) {
            const auto& f = followers[i];
            if (f.name.empty()) throw ConfigError("follower " + std::to_string(i) + " has no name");
            if (!f.initial.finite() || !f.offset.delta.allFinite() || !std::isfinite(f.wind_scale)) {
                throw ConfigError("follower '" + f.name + "' has non-finite initial state, offset or wind scale");
            }
            for (std::size_t j = 0; j < i; ++j) {
                if (followers[j].name == f.name) throw ConfigError("duplicate follower name '" + f.name + "'");
                if (followers[j].offset.delta == f.offset.delta) {
                    throw ConfigError("followers '" + followers[j].name + "' and '" + f.name + "' share an offset");
                }
            }
        }
    }
};

namespace detail {

inline FollowerConfig follower(std::string name, Vec3 position, Vec3 offset) {
    FollowerConfig f;
    f.name = std::move(name);
    f.initial.position = position;
    f.offset.delta = offset;
    return f;
}

inline std::vector<FollowerConfig> triangle(const Vec3& p1, const Vec3& p2, const Vec3& p3) {
    return {follower("uav1", p1, Vec3(2, 0, 0)), follower("uav2", p2, Vec3(0, 0, 2)), follower("uav3", p3, Vec3(0, 0, -2))};
}

inline WindSegment segment(GustKind kind, const char* axes, double amplitude, double start, double duration) {
    WindSegment s;
    s.kind = kind;
    const std::string a(axes);
    for (int k = 0; k < 3; ++k) s.axes[k] = a.find("xyz"[k]) != std::string::npos;
    s.amplitude = amplitude;
    s.start = start;
    s.duration = duration;
    return s;
}

}  // namespace detail

/// Spiral leader, triangular formation, staggered 1-cosine gusts on each axis
/// followed by a sustained step.
inline ScenarioConfig scenario1() {
    ScenarioConfig c;
    c.name = "scenario1";
    c.duration = 40.0;
    c.leader = SpiralTrajectory{};
    c.followers = detail::triangle(Vec3(3, 2, 4), Vec3(2, 1, 4), Vec3(0, 0, 4));
    c.wind.segments = {
        detail::segment(GustKind::OneCosine, "x", 0.5, 5.0, 10.0),
        detail::segment(GustKind::OneCosine, "y", 0.5, 10.0, 10.0),
        detail::segment(GustKind::OneCosine, "z", 0.5, 15.0, 10.0),
        detail::segment(GustKind::Rectangle, "xyz", 0.3, 20.0, 20.0),
    };
    c.output_dir = "out/scenario1";
    return c;
}

/// Default inspection-style path for scenario2: a rectangular sweep at two altitudes.
inline std::vector<Waypoint> scenario2_path() {
    constexpr double pi = std::numbers::pi;
    return {
        {Vec3(0, 0, 8), 0.0},       {Vec3(12, 0, 8), 0.0},      {Vec3(12, 6, 8), pi / 2},
        {Vec3(0, 6, 8), pi},        {Vec3(0, 6, 11), pi},       {Vec3(12, 6, 11), 0.0},
        {Vec3(12, 0, 11), -pi / 2}, {Vec3(0, 0, 11), pi},
    };
}

/// Waypoint leader and rectangular wind steps.
inline ScenarioConfig scenario2() {
    ScenarioConfig c;
    c.name = "scenario2";
    c.duration = 60.0;
    c.leader = WaypointTrajectory(scenario2_path(), 1.0);
    c.followers = detail::triangle(Vec3(2, 0, 9), Vec3(5, 2, 7), Vec3(-3, -2, 8));
    c.wind.segments = {
        detail::segment(GustKind::Rectangle, "x", 0.4, 5.0, 20.0),
        detail::segment(GustKind::Rectangle, "y", 0.4, 15.0, 20.0),
        detail::segment(GustKind::Rectangle, "z", 0.4, 30.0, 20.0),
        detail::segment(GustKind::Rectangle, "xy", -0.4, 45.0, 10.0),
    };
    c.output_dir = "out/scenario2";
    return c;
}

inline ScenarioConfig preset(const std::string& name) {
    if (name == "scenario1") return scenario1();
    if (name == "scenario2") return scenario2();
    throw ConfigError("unknown preset '" + name + "'");
}

// ---------------------------------------------------------------------------
// JSON

namespace detail {

using nlohmann::json;

inline Vec3 read_vec3(const json& j, const std::string& key) {
    if (!j.is_array() || j.size() != 3) throw ConfigError("'" + key + "' must be an array of three numbers");
    return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

inline json write_vec3(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

template <class T>
void read_opt(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

inline void read_opt_vec3(const json& j, const char* key, Vec3& out) {
    if (j.contains(key)) out = read_vec3(j.at(key), key);
}

inline void read_axis(const json& j, AxisGains& g) {
    read_opt(j, "lambda", g.lambda);
    read_opt(j, "gamma", g.gamma);
    read_opt(j, "c1", g.c1);
    read_opt(j, "c2", g.c2);
}

inline json write_axis(const AxisGains& g) { return {{"lambda", g.lambda}, {"gamma", g.gamma}, {"c1", g.c1}, {"c2", g.c2}}; }

inline std::string axes_string(const WindSegment& s) {
    std::string out;
    for (int k = 0; k < 3; ++k) {
        if (s.axes[k]) out += "xyz"[k];
    }
    return out;
}

}  // namespace detail

/// Builds a config from JSON. `base_dir` resolves relative waypoint files.
inline ScenarioConfig scenario_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = ".") {
    using namespace detail;
    try {
        ScenarioConfig c = j.contains("preset") ? preset(j.at("preset").get<std::string>()) : ScenarioConfig{};
        read_opt(j, "name", c.name);
        read_opt(j, "duration", c.duration);
        read_opt(j, "dt", c.dt);
        c.log_period = c.dt;
        read_opt(j, "log_period", c.log_period);
        if (j.contains("controller")) c.controller = parse_controller(j.at("controller").get<std::string>());
        read_opt(j, "seed", c.seed);
        read_opt(j, "output_dir", c.output_dir);
        read_opt(j, "parallel", c.parallel);
        read_opt(j, "min_thrust_fraction", c.min_thrust_fraction);
        read_opt(j, "max_tilt", c.max_tilt);
        read_opt(j, "freeze_estimator", c.freeze_estimator);

        if (j.contains("leader")) {
            const json& l = j.at("leader");
            const std::string type = l.value("type", "spiral");
            if (type == "spiral") {
                SpiralTrajectory s;
                read_opt(l, "radius", s.radius);
                read_opt(l, "period", s.period);
                read_opt(l, "climb_rate", s.climb_rate);
                read_opt(l, "initial_altitude", s.initial_altitude);
                read_opt(l, "heading_offset", s.heading_offset);
                if (!(s.period > 0.0)) throw ConfigError("spiral period must be positive");
                c.leader = s;
            } else if (type == "waypoints") {
                std::vector<Waypoint> path;
                if (l.contains("file")) {
                    std::filesystem::path file = l.at("file").get<std::string>();
                    if (file.is_relative()) file = base_dir / file;
                    path = load_waypoints(file.string());
                } else if (l.contains("points")) {
                    for (const json& p : l.at("points")) {
                        if (!p.is_array() || p.size() != 4) throw ConfigError("waypoint must be [x, y, z, psi]");
                        path.push_back({Vec3(p[0].get<double>(), p[1].get<double>(), p[2].get<double>()),
                                        p[3].get<double>()});
                    }
                } else {
                    path = scenario2_path();
                }
                c.leader = WaypointTrajectory(std::move(path), l.value("speed", 1.0));
            } else {
                throw ConfigError("unknown leader type '" + type + "'");
            }
        }

        if (j.contains("followers")) {
            c.followers.clear();
            for (const json& f : j.at("followers")) {
                FollowerConfig fc;
                fc.name = f.at("name").get<std::string>();
                read_opt_vec3(f, "position", fc.initial.position);
                read_opt_vec3(f, "velocity", fc.initial.velocity);
                read_opt_vec3(f, "attitude", fc.initial.attitude);
                read_opt_vec3(f, "rates", fc.initial.rates);
                read_opt_vec3(f, "offset", fc.offset.delta);
                read_opt(f, "wind_scale", fc.wind_scale);
                c.followers.push_back(std::move(fc));
            }
        }

        if (j.contains("uav")) {
            const json& u = j.at("uav");
            read_opt(u, "mass", c.uav.mass);
            read_opt(u, "gravity", c.uav.gravity);
            read_opt(u, "Ix", c.uav.Ix);
            read_opt(u, "Iy", c.uav.Iy);
            read_opt(u, "Iz", c.uav.Iz);
            read_opt(u, "arm_length", c.uav.arm_length);
            read_opt(u, "k_thrust", c.uav.k_thrust);
            read_opt(u, "k_drag", c.uav.k_drag);
            read_opt(u, "rotor_saturation", c.uav.rotor_saturation);
            read_opt(u, "rotor_force_max", c.uav.rotor_force_max);
        }

        if (j.contains("position_gains")) {
            const json& g = j.at("position_gains");
            read_opt(g, "lambda", c.position_gains.lambda);
            read_opt(g, "gamma", c.position_gains.gamma);
            read_opt(g, "c1", c.position_gains.c1);
            read_opt(g, "c2", c.position_gains.c2);
            read_opt(g, "epsilon", c.position_gains.epsilon);
        }

        if (j.contains("attitude_gains")) {
            const json& g = j.at("attitude_gains");
            if (g.contains("all")) {
                read_axis(g.at("all"), c.attitude_gains.roll);
                read_axis(g.at("all"), c.attitude_gains.pitch);
                read_axis(g.at("all"), c.attitude_gains.yaw);
            }
            if (g.contains("roll")) read_axis(g.at("roll"), c.attitude_gains.roll);
            if (g.contains("pitch")) read_axis(g.at("pitch"), c.attitude_gains.pitch);
            if (g.contains("yaw")) read_axis(g.at("yaw"), c.attitude_gains.yaw);
            read_opt(g, "epsilon", c.attitude_gains.epsilon);
        }

        if (j.contains("rbf")) {
            const json& r = j.at("rbf");
            read_opt(r, "neurons", c.rbf.neurons);
            read_opt(r, "learning_gain", c.rbf.learning_gain);
            read_opt(r, "width", c.rbf.width);
            read_opt(r, "leakage", c.rbf.leakage);
            read_opt(r, "momentum", c.rbf.momentum);
            read_opt_vec3(r, "center_range", c.rbf.center_range);
            read_opt(r, "init_weight_range", c.rbf.init_weight_range);
            read_opt(r, "scale_by_dt", c.rbf.scale_by_dt);
            if (r.contains("input")) c.estimator_input = parse_estimator_input(r.at("input").get<std::string>());
        }

        if (j.contains("wind")) {
            c.wind.segments.clear();
            for (const json& w : j.at("wind")) {
                WindSegment s;
                s.kind = parse_gust_kind(w.at("kind").get<std::string>());
                const std::string axes = w.value("axes", "xyz");
                for (int k = 0; k < 3; ++k) s.axes[k] = axes.find("xyz"[k]) != std::string::npos;
                s.amplitude = w.at("amplitude").get<double>();
                s.start = w.value("start", 0.0);
                s.duration = w.at("duration").get<double>();
                c.wind.segments.push_back(s);
            }
        }

        c.validate();
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed scenario config: ") + e.what());
    }
}

inline ScenarioConfig load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario config " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return scenario_from_json(j, path.parent_path());
}

/// Full JSON form of a config; waypoint paths are written inline.
inline nlohmann::json scenario_to_json(const ScenarioConfig& c) {
    using namespace detail;
    json j;
    j["name"] = c.name;
    j["duration"] = c.duration;
    j["dt"] = c.dt;
    j["log_period"] = c.log_period;
    j["controller"] = std::string(to_string(c.controller));
    j["seed"] = c.seed;
    j["output_dir"] = c.output_dir;
    j["parallel"] = c.parallel;
    j["min_thrust_fraction"] = c.min_thrust_fraction;
    j["max_tilt"] = c.max_tilt;
    j["freeze_estimator"] = c.freeze_estimator;
    if (const auto* s = std::get_if<SpiralTrajectory>(&c.leader)) {
        j["leader"] = {{"type", "spiral"},
                       {"radius", s->radius},
                       {"period", s->period},
                       {"climb_rate", s->climb_rate},
                       {"initial_altitude", s->initial_altitude},
                       {"heading_offset", s->heading_offset}};
    } else {
        const auto& w = std::get<WaypointTrajectory>(c.leader);
        json points = json::array();
        for (const auto& p : w.waypoints()) points.push_back({p.position.x(), p.position.y(), p.position.z(), p.heading});
        j["leader"] = {{"type", "waypoints"}, {"speed", w.speed()}, {"points", points}};
    }
    json followers = json::array();
    for (const auto& f : c.followers) {
        followers.push_back({{"name", f.name},
                             {"position", write_vec3(f.initial.position)},
                             {"velocity", write_vec3(f.initial.velocity)},
                             {"attitude", write_vec3(f.initial.attitude)},
                             {"rates", write_vec3(f.initial.rates)},
                             {"offset", write_vec3(f.offset.delta)},
                             {"wind_scale", f.wind_scale}});
    }
    j["followers"] = followers;
    j["uav"] = {{"mass", c.uav.mass},         {"gravity", c.uav.gravity},     {"Ix", c.uav.Ix},
                {"Iy", c.uav.Iy},             {"Iz", c.uav.Iz},               {"arm_length", c.uav.arm_length},
                {"k_thrust", c.uav.k_thrust}, {"k_drag", c.uav.k_drag},       {"rotor_saturation", c.uav.rotor_saturation},
                {"rotor_force_max", c.uav.rotor_force_max}};
    const auto& pg = c.position_gains;
    j["position_gains"] = {{"lambda", pg.lambda}, {"gamma", pg.gamma}, {"c1", pg.c1}, {"c2", pg.c2}, {"epsilon", pg.epsilon}};
    const auto& ag = c.attitude_gains;
    j["attitude_gains"] = {{"roll", write_axis(ag.roll)},
                           {"pitch", write_axis(ag.pitch)},
                           {"yaw", write_axis(ag.yaw)},
                           {"epsilon", ag.epsilon}};
    const auto& r = c.rbf;
    j["rbf"] = {{"neurons", r.neurons},   {"learning_gain", r.learning_gain},
                {"width", r.width},       {"leakage", r.leakage},
                {"momentum", r.momentum}, {"center_range", write_vec3(r.center_range)},
                {"init_weight_range", r.init_weight_range}, {"scale_by_dt", r.scale_by_dt},
                {"input", std::string(to_string(c.estimator_input))}};
    json wind = json::array();
    for (const auto& s : c.wind.segments) {
        wind.push_back({{"kind", std::string(to_string(s.kind))},
                        {"axes", axes_string(s)},
                        {"amplitude", s.amplitude},
                        {"start", s.start},
                        {"duration", s.duration}});
    }
    j["wind"] = wind;
    return j;
}

}  // namespace rbf_formation
