#include "ctsim/stop_scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ctsim/errors.hpp"
#include "ctsim/kernels/kernels.hpp"

namespace cts {

std::string_view stop_state_name(StopState s) {
    switch (s) {
        case StopState::Pending: return "Pending";
        case StopState::Buffered: return "Buffered";
        case StopState::Dispatched: return "Dispatched";
        case StopState::Completed: return "Completed";
    }
    return "Pending";
}

void StopPoint::buffer() {
    if (state_ != StopState::Pending) {
        throw IllegalState("stop '" + spec_.id + "' cannot buffer from state " +
                           std::string(stop_state_name(state_)));
    }
    state_ = StopState::Buffered;
}

void StopPoint::dispatch(double now) {
    if (state_ != StopState::Buffered) {
        throw IllegalState("stop '" + spec_.id + "' cannot dispatch from state " +
                           std::string(stop_state_name(state_)));
    }
    state_ = StopState::Dispatched;
    dispatched_at_ = now;
}

void StopPoint::begin_hold(double now) {
    if (state_ != StopState::Dispatched) {
        throw IllegalState("stop '" + spec_.id + "' cannot hold from state " +
                           std::string(stop_state_name(state_)));
    }
    resume_at_ = now + spec_.stop_duration;
}

void StopPoint::complete() {
    if (state_ != StopState::Dispatched) {
        throw IllegalState("stop '" + spec_.id + "' cannot complete from state " +
                           std::string(stop_state_name(state_)));
    }
    state_ = StopState::Completed;
}

bool check_global_conditions(const StopPoint& stop, const GlobalPath& path,
                             std::size_t current_segment, Vec2 vehicle_pos, double horizon) {
    if (path.segment_count() == 0) {
        return false;
    }
    if (stop.state() != StopState::Pending) {
        return false;  // already sent through the buffer once
    }
    const std::size_t stop_segment = nearest_segment(path, stop.spec().position);
    if (stop_segment != current_segment && stop_segment != current_segment + 1) {
        return false;
    }
    return distance(vehicle_pos, stop.spec().position) < horizon;
}

std::optional<std::size_t> check_local_conditions(const StopPoint& stop,
                                                  const LocalTrajectory& traj) {
    if (traj.empty()) {
        throw EmptyTrajectory("check_local_conditions on empty trajectory");
    }
    const Vec2 p = stop.spec().position;

    double min_dist2 = std::numeric_limits<double>::infinity();
    if (traj.size() == 1) {
        min_dist2 = distance2(traj.point(0).position, p);
    }
    for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
        min_dist2 = std::min(
            min_dist2,
            project_on_segment(traj.point(i).position, traj.point(i + 1).position, p).dist2);
    }
    if (!(min_dist2 < kStopAcceptDistance * kStopAcceptDistance)) {
        return std::nullopt;
    }

    const kernels::ArgMin near =
        kernels::argmin_dist2(traj.xs().data(), traj.ys().data(), traj.size(), p.x, p.y);
    if (traj.point(near.index).segment_index == traj.points().back().segment_index) {
        return std::nullopt;  // would land on the last local segment
    }
    return near.index;
}

void insert_stop(LocalTrajectory& traj, StopPoint& stop, std::size_t index,
                 const ComfortLevel& comfort, double v_cruise, double now, double k_max) {
    if (index >= traj.size()) {
        throw IndexOutOfRange("stop insertion index " + std::to_string(index) +
                              " out of range");
    }
    if (stop.state() != StopState::Buffered) {
        throw IllegalState("stop '" + stop.spec().id + "' must be Buffered to insert, is " +
                           std::string(stop_state_name(stop.state())));
    }
    if (traj.point(index).stop.has_value()) {
        throw IllegalState("trajectory point " + std::to_string(index) +
                           " already carries stop '" + traj.point(index).stop->stop_id + "'");
    }
    traj.annotate_stop(index, {stop.spec().id, stop.spec().stop_duration});
    traj = profile_velocity(std::move(traj), comfort, v_cruise, k_max);
    stop.dispatch(now);
}

namespace {

StopPoint* find_stop(std::span<StopPoint> stops, std::string_view id) {
    for (StopPoint& s : stops) {
        if (s.spec().id == id) {
            return &s;
        }
    }
    return nullptr;
}

}  // namespace

std::span<const TrajectoryPoint> release(StopBuffer& buffer, const VehicleState& vehicle,
                                         double now, std::span<StopPoint> stops,
                                         std::size_t window_end, ArrivalTolerance tol) {
    const LocalTrajectory& traj = buffer.trajectory_;
    if (traj.empty()) {
        throw EmptyTrajectory("release on empty trajectory");
    }
    const auto& points = traj.points();

    if (buffer.holding_) {
        if (now < buffer.holding_->resume_at) {
            return {};  // dwell time has not passed; nothing flows
        }
        buffer.completed_ids_.insert(buffer.holding_->stop_id);
        if (StopPoint* s = find_stop(stops, buffer.holding_->stop_id)) {
            s->complete();
        }
        buffer.holding_.reset();
    }

    // Next annotated point whose dwell has not been served yet.
    std::optional<std::size_t> gate;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].stop && !buffer.completed_ids_.contains(points[i].stop->stop_id)) {
            gate = i;
            break;
        }
    }

    std::size_t bound = std::min(window_end, points.size());
    if (gate) {
        bound = std::min(bound, *gate + 1);  // release up to and including the stop
    }

    const std::size_t old_index = buffer.release_index_;
    buffer.release_index_ = std::max(buffer.release_index_, bound);

    // Begin holding once the released stop point is physically reached.
    if (gate && *gate < buffer.release_index_) {
        const TrajectoryPoint& sp = points[*gate];
        if (distance(vehicle.position(), sp.position) <= tol.distance &&
            vehicle.speed < tol.speed) {
            buffer.holding_ = StopBuffer::Holding{sp.stop->stop_id,
                                                  now + sp.stop->stop_duration, *gate};
            if (StopPoint* s = find_stop(stops, sp.stop->stop_id)) {
                s->begin_hold(now);
            }
        }
    }

    return std::span<const TrajectoryPoint>(points).subspan(old_index,
                                                            buffer.release_index_ - old_index);
}

}  // namespace cts
