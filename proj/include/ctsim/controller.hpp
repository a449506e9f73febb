#pragma once

#include <cstddef>
#include <span>

#include "ctsim/local_planner.hpp"
#include "ctsim/map_model.hpp"
#include "ctsim/vehicle_sim.hpp"

namespace cts {

/// Gains of the lateral law U = alpha1*k + alpha2*L_err + alpha3*H_err.
/// Conventions: lateral error is positive with the vehicle left of the path,
/// heading error is path heading minus vehicle heading. Under these signs
/// alpha2 < 0 and alpha3 > 0 are the stabilizing choices.
struct ControllerGains {
    double alpha1 = 1.0;    // feed-forward on reference curvature
    double alpha2 = -0.35;  // 1/m per meter of lateral error
    double alpha3 = 1.2;    // 1/m per radian of heading error
};

struct ControlErrors {
    double lateral_error = 0.0;        // m, signed, left of path positive
    double heading_error = 0.0;        // rad, (-pi, pi]
    double reference_curvature = 0.0;  // 1/m at the nearest released point
    std::size_t nearest_index = 0;     // into the released points
};

struct ControlCommand {
    double curvature_cmd = 0.0;  // 1/m, |value| <= k_max
    double accel_cmd = 0.0;      // m/s^2
    bool emergency = false;
};

struct LongitudinalLimits {
    double a_long_max = 1.0;
    double a_brake_max = 3.0;
};

/// Tracking errors against the first `released_count` points of traj
/// (the whole trajectory by default). Nearest point by euclidean distance,
/// ties to the smallest index. Throws EmptyTrajectory.
ControlErrors compute_errors(const VehicleState& vehicle, const LocalTrajectory& traj,
                             std::size_t released_count = static_cast<std::size_t>(-1));

/// Eq-style lateral law: clamp(a1*k + a2*L + a3*H, -k_max, +k_max).
double lateral_control(const ControlErrors& errors, const ControllerGains& gains, double k_max);

/// Proportional speed tracking clamped to the actuator limits.
double longitudinal_control(double v, double v_target, double k_v, LongitudinalLimits limits);

/// True when an active obstacle blocks the released path: some obstacle with
/// appears_at <= now < disappears_at lies within corridor_halfwidth + radius
/// of a released point ahead of the vehicle and within sense_range of path
/// arc length.
bool emergency_check(const VehicleState& vehicle, const LocalTrajectory& traj,
                     std::size_t released_count, std::span<const ObstacleSpec> obstacles,
                     double now, double sense_range, double corridor_halfwidth);

}  // namespace cts
