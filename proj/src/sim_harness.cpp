#include "ctsim/sim_harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "ctsim/errors.hpp"
#include "ctsim/global_planner.hpp"
#include "ctsim/kernels/kernels.hpp"

namespace cts {

void Scenario::validate() const {
    if (!(dt > 0.0) || dt > 0.1) {
        throw ConfigError("dt must be in (0, 0.1] s");
    }
    if (!(horizon > 0.0)) {
        throw ConfigError("horizon must be > 0");
    }
    if (!(max_sim_time > 0.0)) {
        throw ConfigError("max_sim_time must be > 0");
    }
    if (!(v_cruise > 0.0)) {
        throw ConfigError("v_cruise must be > 0");
    }
    if (!(sample_spacing > 0.0) || !(corner_offset > 0.0)) {
        throw ConfigError("sample_spacing and corner_offset must be > 0");
    }
    if (!(params.k_max > 0.0) || !(params.v_max > 0.0) || !(params.a_long_max > 0.0) ||
        !(params.a_brake_max > 0.0) || !(params.curvature_rate_max > 0.0)) {
        throw ConfigError("vehicle parameters must be positive");
    }
    if (!(comfort.a_lat_max > 0.0) || !(comfort.a_long_max > 0.0)) {
        throw ConfigError("comfort accelerations must be positive");
    }
    if (!(k_v > 0.0)) {
        throw ConfigError("k_v must be > 0");
    }
}

namespace {

// A little beyond one sample, so the target pulls the vehicle off a point it
// is resting on.
constexpr double kMinLookahead = 0.15;  // m

// Target speed for the controller: the profile envelope evaluated a
// lag-compensating lookahead ahead of the vehicle. v^2 interpolates linearly
// in arc length (exact along the constant-acceleration ramps) and pinned
// zeros inside the lookahead window dominate, so the vehicle settles just
// short of a stop point instead of creeping across it.
double target_speed_at(const LocalTrajectory& traj, std::size_t released_count,
                       std::size_t nearest, Vec2 pos, double lookahead) {
    const auto& pts = traj.points();
    const std::size_t n = std::min(released_count, pts.size());
    if (n == 1) {
        return pts[nearest].target_speed;
    }

    // Arc position of the vehicle, projected on the neighboring segments.
    std::optional<SegmentProjection> best;
    std::size_t seg_first = nearest;
    const auto consider = [&](std::size_t i) {
        if (i + 1 >= n) {
            return;
        }
        const SegmentProjection proj =
            project_on_segment(pts[i].position, pts[i + 1].position, pos);
        if (!best || proj.dist2 < best->dist2) {
            best = proj;
            seg_first = i;
        }
    };
    if (nearest > 0) {
        consider(nearest - 1);
    }
    consider(nearest);
    if (!best) {
        return pts[nearest].target_speed;
    }
    const double s_vehicle = pts[seg_first].arc_length +
                             (pts[seg_first + 1].arc_length - pts[seg_first].arc_length) *
                                 best->t;
    const double s_query = std::min(s_vehicle + lookahead, pts[n - 1].arc_length);

    // Interpolate the envelope at the query arc.
    std::size_t hi = seg_first;
    while (hi + 1 < n && pts[hi + 1].arc_length < s_query) {
        ++hi;
    }
    double v_target;
    if (hi + 1 >= n) {
        v_target = pts[n - 1].target_speed;
    } else {
        const double s0 = pts[hi].arc_length;
        const double s1 = pts[hi + 1].arc_length;
        const double frac = s1 > s0 ? (s_query - s0) / (s1 - s0) : 0.0;
        const double v0 = pts[hi].target_speed;
        const double v1 = pts[hi + 1].target_speed;
        v_target = std::sqrt(std::max(v0 * v0 + (v1 * v1 - v0 * v0) * frac, 0.0));
    }

    // Pinned minima between the vehicle and the query must not be skipped.
    for (std::size_t j = seg_first + 1; j < n && pts[j].arc_length <= s_query; ++j) {
        v_target = std::min(v_target, pts[j].target_speed);
    }
    return v_target;
}

struct HoldTracker {
    std::optional<StopBuffer::Holding> previous;
    std::vector<StopMetrics> stops;

    void observe(const std::optional<StopBuffer::Holding>& current, double now,
                 Vec2 vehicle_pos, std::span<const StopPointSpec> specs) {
        if (current && (!previous || previous->stop_id != current->stop_id)) {
            StopMetrics m;
            m.id = current->stop_id;
            m.arrival_time = now;
            m.hold_duration = 0.0;
            m.position_error = 0.0;
            for (const StopPointSpec& s : specs) {
                if (s.id == m.id) {
                    m.position_error = distance(vehicle_pos, s.position);
                    break;
                }
            }
            stops.push_back(std::move(m));
        }
        if (previous && (!current || current->stop_id != previous->stop_id)) {
            if (!stops.empty() && stops.back().id == previous->stop_id) {
                stops.back().hold_duration = now - stops.back().arrival_time;
            }
        }
        previous = current;
    }
};

}  // namespace

RunResult run(const Scenario& scenario) {
    scenario.validate();

    const GlobalPath route = plan_route(scenario.map.graph, scenario.start, scenario.goal);
    const auto primitives =
        build_geometry(route, scenario.map.graph, scenario.corner_offset);
    LocalTrajectory master = sample_trajectory(primitives, scenario.sample_spacing);

    RunResult result;
    if (master.empty()) {
        // Start and goal snapped to the same node; nothing to drive.
        result.metrics.route_completed = true;
        return result;
    }
    master = profile_velocity(std::move(master), scenario.comfort, scenario.v_cruise,
                              scenario.params.k_max);

    StopBuffer buffer(std::move(master));
    std::vector<StopPoint> stops;
    stops.reserve(scenario.map.stops.size());
    for (const StopPointSpec& spec : scenario.map.stops) {
        stops.emplace_back(spec);
    }

    VehicleState vehicle;
    vehicle.x = scenario.start.x;
    vehicle.y = scenario.start.y;
    {
        const auto xs = buffer.trajectory().xs();
        const auto ys = buffer.trajectory().ys();
        const auto near = kernels::argmin_dist2(xs.data(), ys.data(), buffer.trajectory().size(),
                                                vehicle.x, vehicle.y);
        vehicle.heading = buffer.trajectory().point(near.index).heading;
    }

    const LongitudinalLimits limits{scenario.comfort.a_long_max, scenario.params.a_brake_max};
    bool emergency_active = false;
    double last_blocked = -std::numeric_limits<double>::infinity();
    HoldTracker holds;
    bool completed = false;

    result.trace.reserve(static_cast<std::size_t>(scenario.max_sim_time / scenario.dt) + 1);

    while (vehicle.time <= scenario.max_sim_time + 0.5 * scenario.dt) {
        const double now = vehicle.time;

        // (1) clip to the horizon of view
        const LocalTrajectory clipped =
            clip_to_horizon(buffer.trajectory(), vehicle, scenario.horizon);

        // (2) first condition set, against the global path
        const std::size_t current_segment = nearest_segment(route, vehicle.position());
        for (StopPoint& stop : stops) {
            if (stop.state() == StopState::Pending &&
                check_global_conditions(stop, route, current_segment, vehicle.position(),
                                        scenario.horizon)) {
                stop.buffer();
            }
        }

        // (3) second condition set, then insertion into the trajectory
        for (StopPoint& stop : stops) {
            if (stop.state() != StopState::Buffered) {
                continue;
            }
            const auto local_index = check_local_conditions(stop, clipped);
            if (!local_index) {
                continue;  // rejected this cycle; re-evaluated on the next
            }
            const std::size_t master_index = clipped.start_offset() + *local_index;
            if (buffer.trajectory().point(master_index).stop.has_value()) {
                continue;  // point taken by another stop; retry later
            }
            insert_stop(buffer.trajectory(), stop, master_index, scenario.comfort,
                        scenario.v_cruise, now, scenario.params.k_max);
        }

        // (4) buffer release, frozen while an emergency hold is active
        std::size_t window_end = clipped.start_offset() + clipped.size();
        if (emergency_active) {
            window_end = buffer.release_index();
        }
        const auto held_before = buffer.holding();
        release(buffer, vehicle, now, stops, window_end, scenario.arrival);
        holds.observe(buffer.holding(), now, vehicle.position(), scenario.map.stops);
        if (held_before &&
            (!buffer.holding() || buffer.holding()->stop_id != held_before->stop_id)) {
            // Dwell served: unpin the stop so the profile lets the vehicle
            // return to the planned itinerary.
            buffer.trajectory().clear_stop(held_before->point_index);
            buffer.trajectory() =
                profile_velocity(std::move(buffer.trajectory()), scenario.comfort,
                                 scenario.v_cruise, scenario.params.k_max);
        }

        // (5) tracking errors against the released points
        const ControlErrors errors =
            compute_errors(vehicle, buffer.trajectory(), buffer.release_index());

        // (6) control
        const bool blocked =
            emergency_check(vehicle, buffer.trajectory(), buffer.release_index(),
                            scenario.map.obstacles, now, scenario.horizon,
                            scenario.corridor_halfwidth);
        if (blocked) {
            emergency_active = true;
            last_blocked = now;
        } else if (emergency_active && now - last_blocked >= scenario.resume_delay) {
            emergency_active = false;
        }

        ControlCommand cmd;
        cmd.curvature_cmd = lateral_control(errors, scenario.gains, scenario.params.k_max);
        const double lookahead = kMinLookahead + vehicle.speed / scenario.k_v;
        const double v_target =
            target_speed_at(buffer.trajectory(), buffer.release_index(), errors.nearest_index,
                            vehicle.position(), lookahead);
        cmd.accel_cmd = emergency_active
                            ? -scenario.params.a_brake_max
                            : longitudinal_control(vehicle.speed, v_target, scenario.k_v,
                                                   limits);
        cmd.emergency = emergency_active;

        TraceRecord rec;
        rec.time = now;
        rec.x = vehicle.x;
        rec.y = vehicle.y;
        rec.heading = vehicle.heading;
        rec.speed = vehicle.speed;
        rec.target_speed = v_target;
        rec.lateral_error = errors.lateral_error;
        rec.heading_error = errors.heading_error;
        rec.curvature_cmd = cmd.curvature_cmd;
        rec.applied_curvature = vehicle.curvature;
        if (buffer.holding()) {
            rec.stop_state = buffer.holding()->stop_id;
        }
        rec.emergency = emergency_active;
        result.trace.push_back(std::move(rec));

        // (7) plant step
        vehicle = step(vehicle, cmd, scenario.params, scenario.dt);

        if (buffer.fully_released() && !buffer.holding() &&
            distance(vehicle.position(), buffer.trajectory().points().back().position) <=
                scenario.arrival.distance &&
            vehicle.speed < scenario.arrival.speed) {
            completed = true;
            break;
        }
    }

    result.metrics =
        compute_metrics(result.trace, buffer.trajectory(), scenario.map.stops);
    result.metrics.stops = std::move(holds.stops);
    result.metrics.route_completed = completed;
    result.planned = buffer.trajectory();
    return result;
}

MetricsReport compute_metrics(std::span<const TraceRecord> trace, const LocalTrajectory& traj,
                              std::span<const StopPointSpec> stops) {
    if (trace.empty()) {
        throw EmptyTrajectory("compute_metrics on empty trace");
    }
    MetricsReport report;

    double curve_sum = 0.0;
    std::size_t curve_count = 0;
    report.heading_error_min = std::numeric_limits<double>::infinity();
    report.heading_error_max = -std::numeric_limits<double>::infinity();

    std::vector<double> commands;
    commands.reserve(trace.size());
    for (const TraceRecord& rec : trace) {
        report.lateral_error_max = std::max(report.lateral_error_max,
                                            std::fabs(rec.lateral_error));
        report.heading_error_min = std::min(report.heading_error_min, rec.heading_error);
        report.heading_error_max = std::max(report.heading_error_max, rec.heading_error);
        commands.push_back(rec.curvature_cmd);

        if (!traj.empty()) {
            const auto near = kernels::argmin_dist2(traj.xs().data(), traj.ys().data(),
                                                    traj.size(), rec.x, rec.y);
            if (std::fabs(traj.point(near.index).curvature) > 0.01) {
                curve_sum += std::fabs(rec.lateral_error);
                ++curve_count;
            }
        }
    }
    report.curvature_max = kernels::max_abs(commands.data(), commands.size());
    report.lateral_error_mean_curves =
        curve_count > 0 ? curve_sum / static_cast<double>(curve_count) : 0.0;

    // Holds, reconstructed from the stop markers.
    std::string active;
    double arrival = 0.0;
    for (const TraceRecord& rec : trace) {
        if (rec.stop_state != active) {
            if (!active.empty()) {
                report.stops.push_back({active, arrival, rec.time - arrival, 0.0});
            }
            active = rec.stop_state;
            arrival = rec.time;
        }
    }
    if (!active.empty()) {
        report.stops.push_back({active, arrival, trace.back().time - arrival, 0.0});
    }
    for (StopMetrics& m : report.stops) {
        for (const StopPointSpec& s : stops) {
            if (s.id == m.id) {
                // Position error at the first record of the hold.
                for (const TraceRecord& rec : trace) {
                    if (rec.stop_state == m.id && rec.time >= m.arrival_time) {
                        m.position_error = distance({rec.x, rec.y}, s.position);
                        break;
                    }
                }
                break;
            }
        }
    }

    report.u_turn_extent = 0.0;
    {
        // Subsampled scan for the tightest window that reverses the heading
        // within a U-turn-sized stretch of travel; extent is the position
        // span perpendicular to the entry heading. Slow winding across a
        // whole route does not count as a U-turn.
        constexpr double kMaxReversalTravel = 25.0;  // m of path per reversal
        const std::size_t stride = std::max<std::size_t>(1, trace.size() / 3000);
        std::vector<double> w;
        std::vector<Vec2> p;
        std::vector<double> h;
        std::vector<double> travelled;
        for (std::size_t i = 0; i < trace.size(); i += stride) {
            h.push_back(trace[i].heading);
            p.push_back({trace[i].x, trace[i].y});
        }
        w.resize(h.size());
        travelled.resize(p.size());
        if (!h.empty()) {
            w[0] = h[0];
            travelled[0] = 0.0;
            for (std::size_t i = 1; i < h.size(); ++i) {
                w[i] = w[i - 1] + wrap_angle(h[i] - h[i - 1]);
                travelled[i] = travelled[i - 1] + distance(p[i - 1], p[i]);
            }
        }
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < w.size(); ++i) {
            const Vec2 n_hat{-std::sin(h[i]), std::cos(h[i])};
            double lo = 0.0;
            double hi = 0.0;
            for (std::size_t j = i + 1;
                 j < w.size() && travelled[j] - travelled[i] <= kMaxReversalTravel; ++j) {
                const double proj = dot(p[j] - p[i], n_hat);
                lo = std::min(lo, proj);
                hi = std::max(hi, proj);
                if (std::fabs(w[j] - w[i]) >= kPi - 0.1) {
                    best = std::min(best, hi - lo);
                    break;
                }
            }
        }
        if (std::isfinite(best)) {
            report.u_turn_extent = best;
        }
    }

    return report;
}

}  // namespace cts
