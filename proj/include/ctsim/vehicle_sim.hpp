#pragma once

#include "ctsim/geometry.hpp"

namespace cts {

struct ControlCommand;

/// Planar kinematic state of the vehicle. `curvature` is the curvature the
/// steering actuator is currently applying (it slews toward the command).
struct VehicleState {
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;  // rad, wrapped to (-pi, pi]
    double speed = 0.0;    // m/s, >= 0
    double curvature = 0.0;
    double time = 0.0;

    Vec2 position() const { return {x, y}; }
};

struct VehicleParams {
    double k_max = 0.48;              // 1/m, steering limit
    double v_max = 3.0;               // m/s
    double a_long_max = 1.5;          // m/s^2, drive limit
    double a_brake_max = 3.0;         // m/s^2
    double curvature_rate_max = 0.6;  // (1/m)/s, steering slew
};

/// Advances the unicycle plant by dt. The applied curvature slews toward the
/// command at most curvature_rate_max; speed integrates the clamped
/// acceleration (floored at 0, capped at v_max) with exact handling of the
/// saturation instants; the pose follows the exact circular arc for the
/// travelled distance, so the integrator is step-size independent.
/// Throws InvalidTimestep for dt <= 0 or dt > 1.
VehicleState step(const VehicleState& state, const ControlCommand& cmd,
                  const VehicleParams& params, double dt);

}  // namespace cts
