#include "ctsim/controller.hpp"

#include <algorithm>
#include <cmath>

#include "ctsim/errors.hpp"
#include "ctsim/kernels/kernels.hpp"

namespace cts {

ControlErrors compute_errors(const VehicleState& vehicle, const LocalTrajectory& traj,
                             std::size_t released_count) {
    const std::size_t n = std::min(released_count, traj.size());
    if (n == 0) {
        throw EmptyTrajectory("compute_errors with no released points");
    }
    const kernels::ArgMin near =
        kernels::argmin_dist2(traj.xs().data(), traj.ys().data(), n, vehicle.x, vehicle.y);

    const TrajectoryPoint& ref = traj.point(near.index);
    const Vec2 tangent = heading_vector(ref.heading);
    const Vec2 offset = vehicle.position() - ref.position;

    ControlErrors errors;
    errors.nearest_index = near.index;
    // Positive when the vehicle sits left of the path tangent.
    errors.lateral_error = cross(tangent, offset);
    errors.heading_error = wrap_angle(ref.heading - vehicle.heading);
    errors.reference_curvature = ref.curvature;
    return errors;
}

double lateral_control(const ControlErrors& errors, const ControllerGains& gains, double k_max) {
    const double u = gains.alpha1 * errors.reference_curvature +
                     gains.alpha2 * errors.lateral_error + gains.alpha3 * errors.heading_error;
    return std::clamp(u, -k_max, k_max);
}

double longitudinal_control(double v, double v_target, double k_v, LongitudinalLimits limits) {
    return std::clamp(k_v * (v_target - v), -limits.a_brake_max, limits.a_long_max);
}

bool emergency_check(const VehicleState& vehicle, const LocalTrajectory& traj,
                     std::size_t released_count, std::span<const ObstacleSpec> obstacles,
                     double now, double sense_range, double corridor_halfwidth) {
    const std::size_t n = std::min(released_count, traj.size());
    if (n == 0 || obstacles.empty()) {
        return false;
    }
    const kernels::ArgMin near =
        kernels::argmin_dist2(traj.xs().data(), traj.ys().data(), n, vehicle.x, vehicle.y);

    // Window of released points ahead of the vehicle, within sense range of
    // path arc length.
    const double s_limit = traj.point(near.index).arc_length + sense_range;
    std::size_t end = near.index;
    while (end + 1 < n && traj.point(end + 1).arc_length <= s_limit) {
        ++end;
    }
    const std::size_t count = end - near.index + 1;
    const double* xs = traj.xs().data() + near.index;
    const double* ys = traj.ys().data() + near.index;

    for (const ObstacleSpec& obs : obstacles) {
        if (now < obs.appears_at || now >= obs.disappears_at) {
            continue;
        }
        const kernels::ArgMin hit =
            kernels::argmin_dist2(xs, ys, count, obs.position.x, obs.position.y);
        const double block = corridor_halfwidth + obs.radius;
        if (hit.dist2 < block * block) {
            return true;
        }
    }
    return false;
}

}  // namespace cts
