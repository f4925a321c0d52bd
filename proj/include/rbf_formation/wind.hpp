#pragma once

// Deterministic gust shapes: rectangular steps and full-wavelength 1-cosine pulses.

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "rbf_formation/dynamics.hpp"
#include "rbf_formation/error.hpp"

namespace rbf_formation {

/// A on [t0, t0 + T), zero elsewhere.
inline double rectangle_wind(double t, double amplitude, double start, double duration) {
    return (t >= start && t < start + duration) ? amplitude : 0.0;
}

/// (A/2)(1 - cos(2 pi (t - t0) / T)) on [t0, t0 + T], zero elsewhere.
inline double one_cosine_wind(double t, double amplitude, double start, double duration) {
    if (t < start || t > start + duration) return 0.0;
    return 0.5 * amplitude * (1.0 - std::cos(2.0 * std::numbers::pi * (t - start) / duration));
}

enum class GustKind { Rectangle, OneCosine };

inline std::string_view to_string(GustKind kind) { return kind == GustKind::Rectangle ? "rectangle" : "one-cosine"; }

inline GustKind parse_gust_kind(std::string_view s) {
    if (s == "rectangle") return GustKind::Rectangle;
    if (s == "one-cosine" || s == "1-cosine") return GustKind::OneCosine;
    throw ConfigError("unknown wind segment kind '" + std::string(s) + "'");
}

struct WindSegment {
    GustKind kind = GustKind::Rectangle;
    bool axes[3] = {true, true, true};
    double amplitude = 0.0;  // N
    double start = 0.0;      // s
    double duration = 1.0;   // s

    double value(double t) const {
        return kind == GustKind::Rectangle ? rectangle_wind(t, amplitude, start, duration)
                                           : one_cosine_wind(t, amplitude, start, duration);
    }
};

/// Superposition of segments; overlapping segments add.
struct WindProfile {
    std::vector<WindSegment> segments;

    void validate() const {
        for (const auto& s : segments) {
            if (!(s.duration > 0.0)) throw ConfigError("wind segment duration must be positive");
            if (!std::isfinite(s.amplitude) || !std::isfinite(s.start)) throw ConfigError("non-finite wind segment");
        }
    }
};

struct WindSample {
    Vec3 force = Vec3::Zero();     // N
    Vec3 per_mass = Vec3::Zero();  // m/s^2, comparable to the estimator output
};

inline WindSample sample(const WindProfile& profile, double t, double mass = 1.0) {
    WindSample out;
    for (const auto& seg : profile.segments) {
        const double v = seg.value(t);
        for (int k = 0; k < 3; ++k) {
            if (seg.axes[k]) out.force[k] += v;
        }
    }
    out.per_mass = out.force / mass;
    return out;
}

}  // namespace rbf_formation
