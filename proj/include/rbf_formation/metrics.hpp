#pragma once

// Tracking, estimation and effort statistics over a simulation trace.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "rbf_formation/error.hpp"
#include "rbf_formation/simulation.hpp"

namespace rbf_formation {

struct Summary {
    double mean = 0.0;
    double max = 0.0;
    double min = 0.0;
};

/// Mean/max/min of a non-empty sequence.
inline Summary summarize(const std::vector<double>& values) {
    if (values.empty()) throw InvalidInputError("summarize: empty sequence");
    Summary s;
    s.max = -std::numeric_limits<double>::infinity();
    s.min = std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (double v : values) {
        sum += v;
        s.max = std::max(s.max, v);
        s.min = std::min(s.min, v);
    }
    s.mean = sum / static_cast<double>(values.size());
    // Rounding can push the mean an ulp outside [min, max].
    s.mean = std::clamp(s.mean, s.min, s.max);
    return s;
}

struct FollowerMetrics {
    std::string name;
    std::size_t samples = 0;
    Summary error;         // |e_xi| over the full run
    Summary error_tail;    // |e_xi| over the final 25% of samples
    Summary estimator_error;  // |D-hat - d/m|
    double sliding_tail_mean = 0.0;
    double control_effort = 0.0;  // integral of |U|^2 dt
    bool diverged = false;
};

struct MetricsReport {
    std::vector<FollowerMetrics> followers;
    // Unweighted across followers: mean of means, max of maxima, min of minima.
    Summary error;
    Summary error_tail;
    Summary estimator_error;
    double sliding_tail_mean = 0.0;
    double control_effort = 0.0;
    bool diverged = false;
};

/// First index of the final-quarter window of n samples.
inline std::size_t tail_start(std::size_t n) { return n - (n + 3) / 4; }

inline FollowerMetrics follower_metrics(const FollowerTrace& f, double dt) {
    if (f.rows.empty()) throw InvalidInputError("compute_metrics: follower '" + f.name + "' has an empty trace");
    FollowerMetrics m;
    m.name = f.name;
    m.samples = f.rows.size();
    m.diverged = f.divergence.has_value();
    std::vector<double> err, est;
    err.reserve(f.rows.size());
    est.reserve(f.rows.size());
    for (const auto& r : f.rows) {
        err.push_back(r.error.norm());
        est.push_back((r.estimate - r.true_per_mass).norm());
        m.control_effort += r.command.squaredNorm() * dt;
    }
    const std::size_t start = tail_start(err.size());
    m.error = summarize(err);
    m.error_tail = summarize(std::vector<double>(err.begin() + static_cast<std::ptrdiff_t>(start), err.end()));
    m.estimator_error = summarize(est);
    double s = 0.0;
    for (std::size_t i = start; i < f.rows.size(); ++i) s += f.rows[i].sliding_norm;
    m.sliding_tail_mean = s / static_cast<double>(f.rows.size() - start);
    return m;
}

inline MetricsReport compute_metrics(const SimTrace& trace) {
    if (trace.followers.empty()) throw InvalidInputError("compute_metrics: trace has no followers");
    MetricsReport r;
    for (const auto& f : trace.followers) r.followers.push_back(follower_metrics(f, trace.dt));

    auto aggregate = [&](Summary FollowerMetrics::*field) {
        Summary s{0.0, -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
        for (const auto& f : r.followers) {
            const Summary& v = f.*field;
            s.mean += v.mean;
            s.max = std::max(s.max, v.max);
            s.min = std::min(s.min, v.min);
        }
        s.mean /= static_cast<double>(r.followers.size());
        return s;
    };
    r.error = aggregate(&FollowerMetrics::error);
    r.error_tail = aggregate(&FollowerMetrics::error_tail);
    r.estimator_error = aggregate(&FollowerMetrics::estimator_error);
    for (const auto& f : r.followers) {
        r.sliding_tail_mean += f.sliding_tail_mean / static_cast<double>(r.followers.size());
        r.control_effort += f.control_effort / static_cast<double>(r.followers.size());
        r.diverged = r.diverged || f.diverged;
    }
    return r;
}

namespace detail {

inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_summary(std::ostream& out, const char* key, const Summary& s) {
    out << key << "_mean = " << num(s.mean) << '\n';
    out << key << "_max = " << num(s.max) << '\n';
    out << key << "_min = " << num(s.min) << '\n';
}

}  // namespace detail

/// Writes the report as INI-style sections, one per follower plus [formation].
inline void write_metrics(std::ostream& out, const MetricsReport& r) {
    using detail::num;
    for (const auto& f : r.followers) {
        out << '[' << f.name << "]\n";
        out << "samples = " << f.samples << '\n';
        detail::write_summary(out, "tracking_error", f.error);
        detail::write_summary(out, "tracking_error_final25", f.error_tail);
        detail::write_summary(out, "estimator_error", f.estimator_error);
        out << "sliding_norm_final25_mean = " << num(f.sliding_tail_mean) << '\n';
        out << "control_effort = " << num(f.control_effort) << '\n';
        out << "diverged = " << (f.diverged ? "true" : "false") << "\n\n";
    }
    out << "[formation]\n";
    out << "followers = " << r.followers.size() << '\n';
    detail::write_summary(out, "tracking_error", r.error);
    detail::write_summary(out, "tracking_error_final25", r.error_tail);
    detail::write_summary(out, "estimator_error", r.estimator_error);
    out << "sliding_norm_final25_mean = " << num(r.sliding_tail_mean) << '\n';
    out << "control_effort = " << num(r.control_effort) << '\n';
    out << "diverged = " << (r.diverged ? "true" : "false") << '\n';
}

}  // namespace rbf_formation
