// Command-line front end: simulate a scenario, summarise traces, compare controllers.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rbf_formation/rbf_formation.hpp"

namespace rf = rbf_formation;

namespace {

enum ExitCode { kOk = 0, kDiverged = 1, kConfig = 2, kIo = 3 };

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string fixed(double v, int precision = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    return buf;
}

int simulate(const std::string& config_path, const std::string& controller, std::optional<std::uint64_t> seed,
             const std::string& out, bool quiet, bool plots) {
    rf::ScenarioConfig config = rf::load_scenario(config_path);
    if (!controller.empty()) config.controller = rf::parse_controller(controller);
    if (seed) config.seed = *seed;
    if (!out.empty()) config.output_dir = out;

    const rf::SimTrace trace = rf::run_scenario(config);
    bool has_rows = true;
    for (const auto& f : trace.followers) has_rows = has_rows && !f.rows.empty();
    std::optional<rf::MetricsReport> report;
    if (has_rows && !trace.followers.empty()) report = rf::compute_metrics(trace);
    const auto files = rf::export_run(trace, report ? &*report : nullptr, config.output_dir, {.plots = plots});

    if (!quiet) {
        std::cout << "scenario " << config.name << " (" << rf::to_string(config.controller) << "), "
                  << config.followers.size() << " followers, " << config.duration << " s at dt=" << config.dt << '\n';
        if (report) {
            for (const auto& f : report->followers) {
                std::cout << "  " << f.name << ": mean |e| " << fixed(f.error.mean) << " m, final-25% mean |e| "
                          << fixed(f.error_tail.mean) << " m" << (f.diverged ? "  DIVERGED" : "") << '\n';
            }
        }
        for (const auto& p : files) std::cout << "  wrote " << p.string() << '\n';
    }
    for (const auto& f : trace.followers) {
        if (f.divergence) std::cerr << "error: " << f.name << " diverged: " << *f.divergence << '\n';
    }
    return trace.diverged() ? kDiverged : kOk;
}

int metrics(const std::vector<std::string>& traces) {
    rf::SimTrace trace;
    for (const auto& path : traces) trace.followers.push_back(rf::load_csv(path));
    trace.dt = rf::infer_period(trace.followers.front());
    rf::write_metrics(std::cout, rf::compute_metrics(trace));
    return kOk;
}

int compare(const std::string& config_path, const std::string& controllers, std::optional<std::uint64_t> seed) {
    const rf::ScenarioConfig base = rf::load_scenario(config_path);
    std::vector<std::pair<std::string, rf::MetricsReport>> rows;
    int code = kOk;
    for (const auto& token : split(controllers, ',')) {
        rf::ScenarioConfig c = base;
        c.controller = rf::parse_controller(token);
        if (seed) c.seed = *seed;
        const auto trace = rf::run_scenario(c);
        if (trace.diverged()) code = kDiverged;
        rows.emplace_back(token, rf::compute_metrics(trace));
    }
    std::printf("%-10s %14s %14s %14s %16s %14s %14s %9s\n", "controller", "mean|e| (m)", "max|e| (m)", "min|e| (m)",
                "final25 mean|e|", "est err", "effort", "diverged");
    for (const auto& [name, r] : rows) {
        std::printf("%-10s %14.6f %14.6f %14.6f %16.6f %14.6f %14.4f %9s\n", name.c_str(), r.error.mean, r.error.max,
                    r.error.min, r.error_tail.mean, r.estimator_error.mean, r.control_effort, r.diverged ? "yes" : "no");
    }
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Leader-follower quadrotor formation simulator (RBF-augmented backstepping SMC)"};
    app.require_subcommand(1);

    std::string config_path, controller, out;
    std::optional<std::uint64_t> seed;
    bool quiet = false, no_plots = false;
    auto* sim = app.add_subcommand("simulate", "Run a scenario and export traces, metrics and plots");
    sim->add_option("--config", config_path, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    sim->add_option("--controller", controller, "rbf-bsmc | bsmc | smc (overrides the config)");
    sim->add_option("--seed", seed, "Estimator seed (overrides the config)");
    sim->add_option("--out", out, "Output directory (overrides the config)");
    sim->add_flag("--quiet", quiet, "Suppress the run summary");
    sim->add_flag("--no-plots", no_plots, "Skip SVG plots");

    std::vector<std::string> traces;
    auto* met = app.add_subcommand("metrics", "Summarise one or more per-UAV trace CSVs");
    met->add_option("--trace", traces, "Trace CSV files")->required()->check(CLI::ExistingFile);

    std::string cmp_config, cmp_controllers = "rbf-bsmc,bsmc,smc";
    std::optional<std::uint64_t> cmp_seed;
    auto* cmp = app.add_subcommand("compare", "Run a scenario under several controllers");
    cmp->add_option("--config", cmp_config, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    cmp->add_option("--controllers", cmp_controllers, "Comma-separated controller list");
    cmp->add_option("--seed", cmp_seed, "Estimator seed (overrides the config)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) return simulate(config_path, controller, seed, out, quiet, !no_plots);
        if (*met) return metrics(traces);
        if (*cmp) return compare(cmp_config, cmp_controllers, cmp_seed);
    } catch (const rf::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const rf::IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kIo;
    } catch (const rf::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfig;
    }
    return kOk;
}
