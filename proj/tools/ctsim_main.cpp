#include <cstdio>
#include <exception>
#include <fstream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ctsim/errors.hpp"
#include "ctsim/sim_harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNoRoute = 2;
constexpr int kExitNotCompleted = 3;

cts::Vec2 parse_point(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) {
        throw cts::ConfigError("expected 'x,y', got '" + text + "'");
    }
    try {
        const std::string xs = text.substr(0, comma);
        const std::string ys = text.substr(comma + 1);
        std::size_t used_x = 0;
        std::size_t used_y = 0;
        const cts::Vec2 p{std::stod(xs, &used_x), std::stod(ys, &used_y)};
        if (used_x != xs.size() || used_y != ys.size()) {
            throw cts::ConfigError("expected 'x,y', got '" + text + "'");
        }
        return p;
    } catch (const cts::ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw cts::ConfigError("expected 'x,y', got '" + text + "'");
    }
}

int cmd_validate(const std::string& map_path) {
    try {
        const cts::MapFile map = cts::load_map(map_path);
        std::printf("ok: %zu nodes, %zu edges, %zu stops, %zu obstacles\n",
                    map.graph.nodes().size(), map.graph.edges().size(), map.stops.size(),
                    map.obstacles.size());
        return kExitOk;
    } catch (const cts::Error& e) {
        std::fprintf(stderr, "invalid map: %s\n", e.what());
        return kExitUsage;
    }
}

struct RunOptions {
    std::string map_path;
    std::string start;
    std::string goal;
    std::string comfort = "normal";
    double v_cruise = 2.0;
    double dt = 0.02;
    double horizon = 50.0;
    double max_time = 300.0;
    double corner_offset = 3.0;
    double curvature_rate = 0.6;
    std::optional<std::string> trace_path;
    std::optional<std::string> plot_path;
    std::optional<std::string> metrics_path;
};

int cmd_run(const RunOptions& opts) {
    cts::Scenario scenario;
    scenario.map = cts::load_map(opts.map_path);
    scenario.start = parse_point(opts.start);
    scenario.goal = parse_point(opts.goal);
    scenario.comfort = cts::ComfortLevel::from_name(opts.comfort);
    scenario.v_cruise = opts.v_cruise;
    scenario.dt = opts.dt;
    scenario.horizon = opts.horizon;
    scenario.max_sim_time = opts.max_time;
    scenario.corner_offset = opts.corner_offset;
    scenario.params.curvature_rate_max = opts.curvature_rate;

    const cts::RunResult result = cts::run(scenario);

    if (opts.trace_path) {
        cts::write_trace_csv(result.trace, std::filesystem::path(*opts.trace_path));
    }
    if (opts.plot_path) {
        cts::write_trace_svg(result.trace, std::filesystem::path(*opts.plot_path));
    }
    if (opts.metrics_path) {
        std::ofstream out(*opts.metrics_path);
        if (!out) {
            throw cts::IoError("cannot open '" + *opts.metrics_path + "' for writing");
        }
        out << cts::metrics_json(result.metrics);
    }

    const cts::MetricsReport& m = result.metrics;
    std::printf("route_completed: %s\n", m.route_completed ? "true" : "false");
    std::printf("sim_time: %.2f s  (%zu records)\n",
                result.trace.empty() ? 0.0 : result.trace.back().time, result.trace.size());
    std::printf("lateral_error_mean_curves: %.4f m\n", m.lateral_error_mean_curves);
    std::printf("lateral_error_max: %.4f m\n", m.lateral_error_max);
    std::printf("heading_error: [%.4f, %.4f] rad\n", m.heading_error_min, m.heading_error_max);
    std::printf("curvature_max: %.4f 1/m\n", m.curvature_max);
    if (m.u_turn_extent > 0.0) {
        std::printf("u_turn_extent: %.2f m\n", m.u_turn_extent);
    }
    for (const cts::StopMetrics& s : m.stops) {
        std::printf("stop %s: arrival %.2f s, hold %.2f s, position error %.3f m\n",
                    s.id.c_str(), s.arrival_time, s.hold_duration, s.position_error);
    }
    return m.route_completed ? kExitOk : kExitNotCompleted;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cybernetic transport system simulator: route planning, Bezier local "
                 "trajectories, scheduled stops, lateral control and a kinematic plant"};
    app.require_subcommand(1);

    RunOptions opts;
    CLI::App* run_cmd = app.add_subcommand("run", "simulate a scenario on a map");
    run_cmd->add_option("--map", opts.map_path, "map file")->required();
    run_cmd->add_option("--start", opts.start, "start point 'x,y'")->required();
    run_cmd->add_option("--goal", opts.goal, "goal point 'x,y'")->required();
    run_cmd->add_option("--comfort", opts.comfort, "comfortable|normal|aggressive");
    run_cmd->add_option("--v-cruise", opts.v_cruise, "cruise speed [m/s]");
    run_cmd->add_option("--dt", opts.dt, "control period [s]");
    run_cmd->add_option("--horizon", opts.horizon, "horizon of view [m]");
    run_cmd->add_option("--max-time", opts.max_time, "simulation time budget [s]");
    run_cmd->add_option("--corner-offset", opts.corner_offset, "blend offset at corners [m]");
    run_cmd->add_option("--curvature-rate", opts.curvature_rate, "steering slew [(1/m)/s]");
    std::string trace_path, plot_path, metrics_path;
    run_cmd->add_option("--trace", trace_path, "write trace CSV here");
    run_cmd->add_option("--plot", plot_path, "write SVG plot here");
    run_cmd->add_option("--metrics", metrics_path, "write metrics JSON here");

    std::string validate_map;
    CLI::App* validate_cmd = app.add_subcommand("validate", "parse and check a map file");
    validate_cmd->add_option("--map", validate_map, "map file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (validate_cmd->parsed()) {
            return cmd_validate(validate_map);
        }
        if (!trace_path.empty()) opts.trace_path = trace_path;
        if (!plot_path.empty()) opts.plot_path = plot_path;
        if (!metrics_path.empty()) opts.metrics_path = metrics_path;
        return cmd_run(opts);
    } catch (const cts::NoRoute& e) {
        std::fprintf(stderr, "no route: %s\n", e.what());
        return kExitNoRoute;
    } catch (const cts::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }
}
