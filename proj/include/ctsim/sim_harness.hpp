#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ctsim/controller.hpp"
#include "ctsim/local_planner.hpp"
#include "ctsim/map_model.hpp"
#include "ctsim/stop_scheduler.hpp"
#include "ctsim/vehicle_sim.hpp"

namespace cts {

struct Scenario {
    MapFile map;
    Vec2 start;
    Vec2 goal;
    ComfortLevel comfort = ComfortLevel::normal();
    double v_cruise = 2.0;        // m/s
    ControllerGains gains;
    double k_v = 0.8;             // 1/s, longitudinal gain
    VehicleParams params;
    double dt = 0.02;             // s, control period
    double horizon = 50.0;        // m, sensing range
    double max_sim_time = 300.0;  // s
    double sample_spacing = kDefaultSampleSpacing;
    double corner_offset = kDefaultCornerOffset;
    double corridor_halfwidth = 1.0;  // m, obstacle corridor around the path
    double resume_delay = 1.0;        // s after the corridor clears
    ArrivalTolerance arrival;

    void validate() const;  // throws ConfigError
};

struct TraceRecord {
    double time = 0.0;
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;
    double speed = 0.0;
    double target_speed = 0.0;
    double lateral_error = 0.0;
    double heading_error = 0.0;
    double curvature_cmd = 0.0;
    double applied_curvature = 0.0;
    std::string stop_state;  // id of the stop being held, else empty
    bool emergency = false;
};

struct StopMetrics {
    std::string id;
    double arrival_time = 0.0;
    double hold_duration = 0.0;
    double position_error = 0.0;  // m, hold position vs stop spec position
};

struct MetricsReport {
    double lateral_error_mean_curves = 0.0;  // mean |lat err| where |k_ref| > 0.01
    double lateral_error_max = 0.0;
    double heading_error_min = 0.0;
    double heading_error_max = 0.0;
    double curvature_max = 0.0;  // max |curvature_cmd|
    std::vector<StopMetrics> stops;  // ordered by arrival time
    bool route_completed = false;
    double u_turn_extent = 0.0;  // m, lateral span of the tightest heading reversal
};

struct RunResult {
    std::vector<TraceRecord> trace;
    MetricsReport metrics;
    LocalTrajectory planned;  // the full profiled plan (pre-release)
};

/// Runs the closed loop at the scenario's fixed timestep. Per cycle, in
/// order: horizon clip, global stop conditions, local stop conditions and
/// insertion, buffer release, error computation, control, plant step. Ends
/// when the final trajectory point is reached within the arrival tolerance
/// with everything released (route_completed) or when max_sim_time elapses.
/// Throws NoRoute or ConfigError.
RunResult run(const Scenario& scenario);

/// Aggregates trace statistics. Records are classified as curve records when
/// the planned curvature at their nearest trajectory point exceeds 0.01 1/m
/// in magnitude. Stop metrics are reconstructed from the hold markers in the
/// trace and the given specs. route_completed is not derivable from a trace
/// and is left false (run() fills it). Throws EmptyTrajectory on an empty
/// trace.
MetricsReport compute_metrics(std::span<const TraceRecord> trace, const LocalTrajectory& traj,
                              std::span<const StopPointSpec> stops = {});

void write_trace_csv(std::span<const TraceRecord> trace, std::ostream& out);
void write_trace_csv(std::span<const TraceRecord> trace, const std::filesystem::path& path);
std::string trace_csv_string(std::span<const TraceRecord> trace);

/// x-y path plot plus time-series panels (speed, lateral error, heading
/// error, curvature), one polyline per panel.
void write_trace_svg(std::span<const TraceRecord> trace, std::ostream& out);
void write_trace_svg(std::span<const TraceRecord> trace, const std::filesystem::path& path);

std::string metrics_json(const MetricsReport& metrics);

}  // namespace cts
