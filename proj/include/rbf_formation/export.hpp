#pragma once

/**
 * @file export.hpp
 * @brief CSV traces, metrics summaries and SVG plots for a finished run.
 *
 * CSV: one file per follower, comma separated, header row, LF line endings,
 * every value printed with 17 significant digits so it round-trips exactly.
 * The dx/dy/dz columns hold the true disturbance per unit mass (m/s^2) and
 * are directly comparable with dhat_x/dhat_y/dhat_z.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "rbf_formation/error.hpp"
#include "rbf_formation/metrics.hpp"
#include "rbf_formation/simulation.hpp"

namespace rbf_formation {

inline constexpr std::array<const char*, 35> kCsvColumns = {
    "time",  "x",         "y",         "z",       "vx",       "vy",     "vz",     "roll",   "pitch",
    "yaw",   "roll_rate", "pitch_rate", "yaw_rate", "ref_x",  "ref_y",  "ref_z",  "ref_yaw", "ex",
    "ey",    "ez",        "ux",        "uy",      "uz",       "thrust", "tau_roll", "tau_pitch", "tau_yaw",
    "dhat_x", "dhat_y",   "dhat_z",    "dx",      "dy",       "dz",     "s_norm", "w_norm",
};

inline std::string csv_header() {
    std::string h;
    for (std::size_t i = 0; i < kCsvColumns.size(); ++i) {
        if (i) h += ',';
        h += kCsvColumns[i];
    }
    return h;
}

inline std::array<double, kCsvColumns.size()> csv_values(const TraceRow& r) {
    const UavState& s = r.state;
    return {r.time,
            s.position.x(), s.position.y(), s.position.z(),
            s.velocity.x(), s.velocity.y(), s.velocity.z(),
            s.attitude.x(), s.attitude.y(), s.attitude.z(),
            s.rates.x(), s.rates.y(), s.rates.z(),
            r.ref_position.x(), r.ref_position.y(), r.ref_position.z(), r.ref_yaw,
            r.error.x(), r.error.y(), r.error.z(),
            r.command.x(), r.command.y(), r.command.z(),
            r.input.thrust, r.input.torque.x(), r.input.torque.y(), r.input.torque.z(),
            r.estimate.x(), r.estimate.y(), r.estimate.z(),
            r.true_per_mass.x(), r.true_per_mass.y(), r.true_per_mass.z(),
            r.sliding_norm, r.weight_norm};
}

inline void write_csv(std::ostream& out, const FollowerTrace& f) {
    out << csv_header() << '\n';
    char buf[40];
    for (const auto& row : f.rows) {
        const auto values = csv_values(row);
        for (std::size_t i = 0; i < values.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", values[i]);
            if (i) out << ',';
            out << buf;
        }
        out << '\n';
    }
}

/// Reads a trace written by write_csv. Columns are located by header name.
inline FollowerTrace read_csv(std::istream& in, const std::string& name) {
    std::string line;
    if (!std::getline(in, line)) throw InvalidInputError(name + ": empty CSV");
    std::map<std::string, std::size_t> index;
    {
        std::istringstream hs(line);
        std::string col;
        std::size_t i = 0;
        while (std::getline(hs, col, ',')) index[col] = i++;
    }
    for (const char* c : kCsvColumns) {
        if (!index.contains(c)) throw InvalidInputError(name + ": missing column '" + c + "'");
    }

    FollowerTrace f;
    f.name = name;
    std::vector<double> v;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        v.clear();
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            try {
                v.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw InvalidInputError(name + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
            }
        }
        if (v.size() != index.size()) throw InvalidInputError(name + ":" + std::to_string(lineno) + ": wrong field count");
        auto at = [&](const char* c) { return v[index.at(c)]; };
        auto vec = [&](const char* a, const char* b, const char* c) { return Vec3(at(a), at(b), at(c)); };
        TraceRow r;
        r.time = at("time");
        r.state.position = vec("x", "y", "z");
        r.state.velocity = vec("vx", "vy", "vz");
        r.state.attitude = vec("roll", "pitch", "yaw");
        r.state.rates = vec("roll_rate", "pitch_rate", "yaw_rate");
        r.ref_position = vec("ref_x", "ref_y", "ref_z");
        r.ref_yaw = at("ref_yaw");
        r.error = vec("ex", "ey", "ez");
        r.command = vec("ux", "uy", "uz");
        r.input.thrust = at("thrust");
        r.input.torque = vec("tau_roll", "tau_pitch", "tau_yaw");
        r.estimate = vec("dhat_x", "dhat_y", "dhat_z");
        r.true_per_mass = vec("dx", "dy", "dz");
        r.sliding_norm = at("s_norm");
        r.weight_norm = at("w_norm");
        f.rows.push_back(r);
    }
    return f;
}

inline FollowerTrace load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open trace " + path.string());
    return read_csv(in, path.stem().string());
}

/// Logging period of a trace read back from CSV (0.01 s if it has fewer than two rows).
inline double infer_period(const FollowerTrace& f) {
    return f.rows.size() >= 2 ? f.rows[1].time - f.rows[0].time : 0.01;
}

// ---------------------------------------------------------------------------
// SVG

namespace svg {

struct Series {
    std::string label;
    std::string color;
    std::vector<double> x;
    std::vector<double> y;
    bool dashed = false;
};

struct Panel {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    std::vector<Series> series;
    bool equal_aspect = false;
};

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

inline const char* palette(std::size_t i) {
    static constexpr std::array<const char*, 6> colors = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};
    return colors[i % colors.size()];
}

inline void draw_panel(std::ostream& out, const Panel& p, double ox, double oy, double w, double h) {
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (const auto& s : p.series) {
        for (double v : s.x) xmin = std::min(xmin, v), xmax = std::max(xmax, v);
        for (double v : s.y) ymin = std::min(ymin, v), ymax = std::max(ymax, v);
    }
    if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    if (xmax - xmin < 1e-9) xmin -= 0.5, xmax += 0.5;
    if (ymax - ymin < 1e-9) ymin -= 0.5, ymax += 0.5;
    const double pad_y = 0.05 * (ymax - ymin);
    ymin -= pad_y;
    ymax += pad_y;

    const double left = ox + 60, top = oy + 30, pw = w - 80, ph = h - 70;
    double sx = pw / (xmax - xmin), sy = ph / (ymax - ymin);
    if (p.equal_aspect) sx = sy = std::min(sx, sy);
    auto X = [&](double v) { return left + (v - xmin) * sx; };
    auto Y = [&](double v) { return top + ph - (v - ymin) * sy; };

    out << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(pw) << "\" height=\"" << fmt(ph)
        << "\" fill=\"none\" stroke=\"#444\"/>\n";
    out << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"" << fmt(oy + 18)
        << "\" text-anchor=\"middle\" font-size=\"14\">" << p.title << "</text>\n";
    out << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"" << fmt(top + ph + 34)
        << "\" text-anchor=\"middle\" font-size=\"12\">" << p.xlabel << "</text>\n";
    out << "<text x=\"" << fmt(ox + 14) << "\" y=\"" << fmt(top + ph / 2) << "\" text-anchor=\"middle\" font-size=\"12\" "
        << "transform=\"rotate(-90 " << fmt(ox + 14) << ' ' << fmt(top + ph / 2) << ")\">" << p.ylabel << "</text>\n";
    for (int i = 0; i <= 4; ++i) {
        const double xv = xmin + (xmax - xmin) * i / 4.0;
        const double yv = ymin + (ymax - ymin) * i / 4.0;
        out << "<text x=\"" << fmt(left + pw * i / 4.0) << "\" y=\"" << fmt(top + ph + 16)
            << "\" text-anchor=\"middle\" font-size=\"10\">" << tick(xv) << "</text>\n";
        out << "<text x=\"" << fmt(left - 6) << "\" y=\"" << fmt(top + ph - ph * i / 4.0 + 4)
            << "\" text-anchor=\"end\" font-size=\"10\">" << tick(yv) << "</text>\n";
    }
    double legend_y = top + 14;
    for (const auto& s : p.series) {
        // Decimate long series to at most ~2000 vertices.
        const std::size_t stride = std::max<std::size_t>(1, s.x.size() / 2000);
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\"";
        if (s.dashed) out << " stroke-dasharray=\"5,3\"";
        out << " points=\"";
        for (std::size_t i = 0; i < s.x.size(); i += stride) out << fmt(X(s.x[i])) << ',' << fmt(Y(s.y[i])) << ' ';
        if (!s.x.empty()) out << fmt(X(s.x.back())) << ',' << fmt(Y(s.y.back()));
        out << "\"/>\n";
        out << "<text x=\"" << fmt(left + pw - 6) << "\" y=\"" << fmt(legend_y) << "\" text-anchor=\"end\" font-size=\"10\" fill=\""
            << s.color << "\">" << s.label << "</text>\n";
        legend_y += 13;
    }
}

/// Lays panels out in a single row.
inline void write(std::ostream& out, const std::vector<Panel>& panels, double panel_w = 420, double panel_h = 320) {
    const double width = panel_w * static_cast<double>(panels.size());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width) << "\" height=\"" << fmt(panel_h)
        << "\" viewBox=\"0 0 " << fmt(width) << ' ' << fmt(panel_h) << "\" font-family=\"sans-serif\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (std::size_t i = 0; i < panels.size(); ++i) draw_panel(out, panels[i], panel_w * static_cast<double>(i), 0, panel_w, panel_h);
    out << "</svg>\n";
}

}  // namespace svg

/// Three orthographic views of actual (solid) and reference (dashed) paths.
inline std::vector<svg::Panel> trajectory_panels(const SimTrace& trace) {
    const std::array<std::array<int, 2>, 3> views = {{{0, 1}, {0, 2}, {1, 2}}};
    const char* names = "xyz";
    std::vector<svg::Panel> panels;
    for (const auto& v : views) {
        svg::Panel p;
        p.title = std::string("view ") + names[v[0]] + names[v[1]];
        p.xlabel = std::string(1, names[v[0]]) + " (m)";
        p.ylabel = std::string(1, names[v[1]]) + " (m)";
        p.equal_aspect = true;
        for (std::size_t i = 0; i < trace.followers.size(); ++i) {
            const auto& f = trace.followers[i];
            svg::Series actual{f.name, svg::palette(i), {}, {}, false};
            svg::Series ref{f.name + " ref", svg::palette(i), {}, {}, true};
            for (const auto& r : f.rows) {
                actual.x.push_back(r.state.position[v[0]]);
                actual.y.push_back(r.state.position[v[1]]);
                ref.x.push_back(r.ref_position[v[0]]);
                ref.y.push_back(r.ref_position[v[1]]);
            }
            p.series.push_back(std::move(actual));
            p.series.push_back(std::move(ref));
        }
        panels.push_back(std::move(p));
    }
    return panels;
}

inline std::vector<svg::Panel> tracking_error_panels(const SimTrace& trace) {
    svg::Panel p{"tracking error", "t (s)", "|e| (m)", {}, false};
    for (std::size_t i = 0; i < trace.followers.size(); ++i) {
        svg::Series s{trace.followers[i].name, svg::palette(i), {}, {}, false};
        for (const auto& r : trace.followers[i].rows) {
            s.x.push_back(r.time);
            s.y.push_back(r.error.norm());
        }
        p.series.push_back(std::move(s));
    }
    return {p};
}

inline std::vector<svg::Panel> disturbance_panels(const FollowerTrace& f) {
    std::vector<svg::Panel> panels;
    const char* names = "xyz";
    for (int k = 0; k < 3; ++k) {
        svg::Panel p{f.name + " disturbance " + names[k], "t (s)", "m/s^2", {}, false};
        svg::Series est{"estimated", svg::palette(0), {}, {}, false};
        svg::Series truth{"true", svg::palette(1), {}, {}, true};
        for (const auto& r : f.rows) {
            est.x.push_back(r.time);
            est.y.push_back(r.estimate[k]);
            truth.x.push_back(r.time);
            truth.y.push_back(r.true_per_mass[k]);
        }
        p.series.push_back(std::move(est));
        p.series.push_back(std::move(truth));
        panels.push_back(std::move(p));
    }
    return panels;
}

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

inline void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace detail

struct ExportOptions {
    bool plots = true;
};

/// Writes <follower>.csv for every follower, metrics.txt (when a report is
/// given) and, optionally, trajectory.svg, tracking_error.svg and
/// disturbance_<follower>.svg. Returns the written paths.
inline std::vector<std::filesystem::path> export_run(const SimTrace& trace, const MetricsReport* report,
                                                      const std::filesystem::path& outdir,
                                                      const ExportOptions& options = {}) {
    std::error_code ec;
    std::filesystem::create_directories(outdir, ec);
    if (ec) throw IoError("cannot create output directory " + outdir.string() + ": " + ec.message());

    std::vector<std::filesystem::path> written;
    auto emit = [&](const std::filesystem::path& name, auto&& body) {
        const auto path = outdir / name;
        auto out = detail::open_output(path);
        body(out);
        detail::finish(out, path);
        written.push_back(path);
    };

    for (const auto& f : trace.followers) emit(f.name + ".csv", [&](std::ostream& o) { write_csv(o, f); });
    if (report) emit("metrics.txt", [&](std::ostream& o) { write_metrics(o, *report); });
    if (options.plots) {
        emit("trajectory.svg", [&](std::ostream& o) { svg::write(o, trajectory_panels(trace)); });
        emit("tracking_error.svg", [&](std::ostream& o) { svg::write(o, tracking_error_panels(trace), 900, 360); });
        for (const auto& f : trace.followers) {
            emit("disturbance_" + f.name + ".svg", [&](std::ostream& o) { svg::write(o, disturbance_panels(f)); });
        }
    }
    return written;
}

}  // namespace rbf_formation
