#include "ctsim/vehicle_sim.hpp"

#include <algorithm>
#include <cmath>

#include "ctsim/controller.hpp"
#include "ctsim/errors.hpp"

namespace cts {

namespace {

constexpr double kStraightCurvature = 1e-9;

// Distance covered in dt under constant acceleration with the speed held
// inside [0, v_max]; exact through the saturation instant.
double integrate_distance(double v0, double accel, double v_max, double dt, double* v_out) {
    if (accel == 0.0) {
        *v_out = v0;
        return v0 * dt;
    }
    const double bound = accel > 0.0 ? v_max : 0.0;
    double t_hit = (bound - v0) / accel;
    if (t_hit >= dt) {
        *v_out = v0 + accel * dt;
        return v0 * dt + 0.5 * accel * dt * dt;
    }
    t_hit = std::max(t_hit, 0.0);
    *v_out = bound;
    return v0 * t_hit + 0.5 * accel * t_hit * t_hit + bound * (dt - t_hit);
}

}  // namespace

VehicleState step(const VehicleState& state, const ControlCommand& cmd,
                  const VehicleParams& params, double dt) {
    if (!(dt > 0.0) || dt > 1.0) {
        throw InvalidTimestep("dt must be in (0, 1] s");
    }

    VehicleState next = state;

    // Steering slew toward the command, saturated at the physical limit.
    const double dk = std::clamp(cmd.curvature_cmd - state.curvature,
                                 -params.curvature_rate_max * dt,
                                 params.curvature_rate_max * dt);
    next.curvature = std::clamp(state.curvature + dk, -params.k_max, params.k_max);

    const double accel = std::clamp(cmd.accel_cmd, -params.a_brake_max, params.a_long_max);
    const double v0 = std::clamp(state.speed, 0.0, params.v_max);
    double v1 = v0;
    const double s = integrate_distance(v0, accel, params.v_max, dt, &v1);
    next.speed = v1;

    // Exact arc for the travelled distance: independent of dt subdivision.
    const double k = next.curvature;
    if (std::fabs(k) > kStraightCurvature) {
        const double theta0 = state.heading;
        const double theta1 = theta0 + k * s;
        next.x = state.x + (std::sin(theta1) - std::sin(theta0)) / k;
        next.y = state.y - (std::cos(theta1) - std::cos(theta0)) / k;
        next.heading = wrap_angle(theta1);
    } else {
        next.x = state.x + s * std::cos(state.heading);
        next.y = state.y + s * std::sin(state.heading);
    }

    next.time = state.time + dt;
    return next;
}

}  // namespace cts
