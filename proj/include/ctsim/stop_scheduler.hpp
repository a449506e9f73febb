#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "ctsim/global_planner.hpp"
#include "ctsim/local_planner.hpp"
#include "ctsim/map_model.hpp"
#include "ctsim/vehicle_sim.hpp"

namespace cts {

/// Local-plan acceptance threshold: a stop must lie within this distance of
/// some local segment to be inserted.
inline constexpr double kStopAcceptDistance = 5.0;  // m

/// Arrival detection thresholds for beginning a dwell.
struct ArrivalTolerance {
    double distance = 0.5;  // m
    double speed = 0.05;    // m/s
};

enum class StopState { Pending, Buffered, Dispatched, Completed };

std::string_view stop_state_name(StopState s);

/// Scheduled stop with its dispatch lifecycle. Transitions are one-way:
/// Pending -> Buffered -> Dispatched -> Completed (IllegalState otherwise).
class StopPoint {
public:
    explicit StopPoint(StopPointSpec spec) : spec_(std::move(spec)) {}

    const StopPointSpec& spec() const { return spec_; }
    StopState state() const { return state_; }
    std::optional<double> dispatched_at() const { return dispatched_at_; }
    std::optional<double> resume_at() const { return resume_at_; }

    void buffer();                 // Pending -> Buffered
    void dispatch(double now);     // Buffered -> Dispatched
    void begin_hold(double now);   // Dispatched, sets resume_at = now + duration
    void complete();               // Dispatched -> Completed

private:
    StopPointSpec spec_;
    StopState state_ = StopState::Pending;
    std::optional<double> dispatched_at_;
    std::optional<double> resume_at_;
};

/// First condition set, against the global path: the stop's nearest global
/// segment is the current or the following one, its distance to the vehicle
/// is below the horizon of view, and it has not been sent before (Pending).
bool check_global_conditions(const StopPoint& stop, const GlobalPath& path,
                             std::size_t current_segment, Vec2 vehicle_pos, double horizon);

/// Second condition set, against the clipped local trajectory: the stop lies
/// within kStopAcceptDistance of the closest local segment and the nearest
/// point's segment is not the last segment of the local plan. Returns the
/// nearest point index (ties: smallest) when both hold.
/// Throws EmptyTrajectory.
std::optional<std::size_t> check_local_conditions(const StopPoint& stop,
                                                  const LocalTrajectory& traj);

/// Saves the stop into the trajectory: the point at `index` gets the stop
/// annotation and target speed 0, the profile is rebuilt so approach speeds
/// stay feasible, and the stop becomes Dispatched.
/// Throws IndexOutOfRange or IllegalState.
void insert_stop(LocalTrajectory& traj, StopPoint& stop, std::size_t index,
                 const ComfortLevel& comfort, double v_cruise, double now,
                 double k_max = kDefaultCurvatureLimit);

/// Gate between planner and controller: releases trajectory points to the
/// control stage and withholds everything past an active stop until its
/// dwell time has passed.
class StopBuffer {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    StopBuffer() = default;
    explicit StopBuffer(LocalTrajectory trajectory) : trajectory_(std::move(trajectory)) {}

    const LocalTrajectory& trajectory() const { return trajectory_; }
    LocalTrajectory& trajectory() { return trajectory_; }

    std::size_t release_index() const { return release_index_; }
    bool fully_released() const { return release_index_ >= trajectory_.size(); }

    struct Holding {
        std::string stop_id;
        double resume_at = 0.0;
        std::size_t point_index = 0;
    };
    const std::optional<Holding>& holding() const { return holding_; }

    /// Points released so far (a prefix of the trajectory).
    std::span<const TrajectoryPoint> released() const {
        return std::span<const TrajectoryPoint>(trajectory_.points()).first(release_index_);
    }

    friend std::span<const TrajectoryPoint> release(StopBuffer& buffer,
                                                    const VehicleState& vehicle, double now,
                                                    std::span<StopPoint> stops,
                                                    std::size_t window_end, ArrivalTolerance tol);

private:
    LocalTrajectory trajectory_;
    std::size_t release_index_ = 0;
    std::optional<Holding> holding_;
    std::unordered_set<std::string> completed_ids_;  // dwell served, gate open
};

/// Advances the buffer: releases points up to (and including) the next
/// stop-annotated point that is not yet Completed, bounded by `window_end`
/// (one past the last point inside the horizon; npos for no bound). When the
/// vehicle has reached a released stop point within tol.distance at a speed
/// below tol.speed, holding begins and resume_at is set to arrival time +
/// stop duration; once now >= resume_at the stop completes and release
/// resumes. Returns the newly released points. Throws EmptyTrajectory.
std::span<const TrajectoryPoint> release(StopBuffer& buffer, const VehicleState& vehicle,
                                         double now, std::span<StopPoint> stops,
                                         std::size_t window_end = StopBuffer::npos,
                                         ArrivalTolerance tol = {});

}  // namespace cts
