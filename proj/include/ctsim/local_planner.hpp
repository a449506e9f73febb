#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ctsim/geometry.hpp"
#include "ctsim/global_planner.hpp"
#include "ctsim/map_model.hpp"
#include "ctsim/vehicle_sim.hpp"

namespace cts {

inline constexpr double kDefaultSampleSpacing = 0.25;  // m
inline constexpr double kDefaultCornerOffset = 3.0;    // m
inline constexpr double kDefaultCurvatureLimit = 0.48; // 1/m

struct StraightSegment {
    Vec2 start;
    Vec2 end;
};

/// Cubic Bezier blend, control points P0..P3.
struct BezierSegment {
    std::array<Vec2, 4> control;
};

struct SegmentPrimitive {
    std::variant<StraightSegment, BezierSegment> shape;
    std::size_t segment_index = 0;
    double speed_limit = std::numeric_limits<double>::infinity();  // min over covered edges

    bool is_straight() const { return std::holds_alternative<StraightSegment>(shape); }
};

struct StopAnnotation {
    std::string stop_id;
    double stop_duration = 0.0;
};

struct TrajectoryPoint {
    Vec2 position;
    double heading = 0.0;    // rad, (-pi, pi]
    double curvature = 0.0;  // 1/m, left-turn positive
    double arc_length = 0.0; // m from trajectory start
    double target_speed = 0.0;
    std::size_t segment_index = 0;
    double speed_limit = std::numeric_limits<double>::infinity();
    std::optional<StopAnnotation> stop;
};

/// Sampled, speed-annotated path. Keeps coordinate arrays alongside the
/// points so the per-cycle nearest-point kernels can run over contiguous
/// data; the mutators preserve that layout.
class LocalTrajectory {
public:
    LocalTrajectory() = default;
    explicit LocalTrajectory(std::vector<TrajectoryPoint> points, double horizon = 0.0,
                             std::size_t start_offset = 0);

    const std::vector<TrajectoryPoint>& points() const { return points_; }
    const TrajectoryPoint& point(std::size_t i) const { return points_[i]; }
    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }

    std::span<const double> xs() const { return xs_; }
    std::span<const double> ys() const { return ys_; }
    std::span<const double> curvatures() const { return curvatures_; }

    double horizon() const { return horizon_; }

    /// Index of this trajectory's first point within the trajectory it was
    /// clipped from (0 for a freshly sampled plan).
    std::size_t start_offset() const { return start_offset_; }

    void annotate_stop(std::size_t i, StopAnnotation annotation);
    void clear_stop(std::size_t i);
    void set_target_speed(std::size_t i, double v);
    void set_curvature(std::size_t i, double k);

private:
    std::vector<TrajectoryPoint> points_;
    std::vector<double> xs_;
    std::vector<double> ys_;
    std::vector<double> curvatures_;
    double horizon_ = 0.0;
    std::size_t start_offset_ = 0;
};

/// Rider comfort setting; bounds both the lateral acceleration used for the
/// curve-speed caps and the longitudinal acceleration used by the profile
/// ramps.
struct ComfortLevel {
    enum class Level { comfortable, normal, aggressive };

    Level level = Level::normal;
    double a_lat_max = 1.0;   // m/s^2
    double a_long_max = 1.0;  // m/s^2

    static ComfortLevel comfortable() { return {Level::comfortable, 0.5, 0.5}; }
    static ComfortLevel normal() { return {Level::normal, 1.0, 1.0}; }
    static ComfortLevel aggressive() { return {Level::aggressive, 1.5, 1.5}; }
    static ComfortLevel from_name(const std::string& name);
    std::string_view name() const;
};

Vec2 bezier_point(const BezierSegment& b, double t);       // throws DomainError
Vec2 bezier_derivative(const BezierSegment& b, double t);  // dB/dt
double bezier_curvature(const BezierSegment& b, double t); // throws SingularDerivative

/// Converts the node route into straights bridged by cubic Bezier corner
/// blends. At each interior node the adjacent straights are shortened by
/// min(corner_offset, half the straight length) and the blend's inner control
/// points sit on the straight tangents at one third of the blend chord, so
/// every join is G1. Collinear interior nodes merge into a single straight.
/// Throws DegenerateGeometry for coincident consecutive nodes or an exact
/// heading reversal at a node.
std::vector<SegmentPrimitive> build_geometry(const GlobalPath& path, const MapGraph& graph,
                                             double corner_offset = kDefaultCornerOffset);

/// Samples the primitives at arc-length intervals <= spacing (boundaries
/// always emit a point) with tangent headings, analytic curvature and
/// cumulative arc length.
LocalTrajectory sample_trajectory(const std::vector<SegmentPrimitive>& primitives,
                                  double spacing = kDefaultSampleSpacing);

/// Sub-trajectory from the point nearest the vehicle (ties: smallest arc
/// length) to at most `horizon` meters of arc length ahead.
LocalTrajectory clip_to_horizon(const LocalTrajectory& traj, const VehicleState& pose,
                                double horizon);

/// Assigns target speeds: per-point caps min(v_cruise, speed limit,
/// sqrt(a_lat_max/|k|)), stop-annotated points and the final point pinned to
/// 0, then forward/backward passes bound acceleration and deceleration by
/// a_long_max. Stored curvature is saturated at k_max afterwards (the caps
/// use the raw value).
LocalTrajectory profile_velocity(LocalTrajectory traj, const ComfortLevel& comfort,
                                 double v_cruise, double k_max = kDefaultCurvatureLimit);

}  // namespace cts
