#include "ctsim/local_planner.hpp"

#include <algorithm>
#include <cmath>

#include "ctsim/errors.hpp"
#include "ctsim/kernels/kernels.hpp"

namespace cts {

namespace {

constexpr double kGeomEps = 1e-9;
constexpr double kCollinearTol = 1e-9;   // rad, turn below this merges straights
constexpr double kReversalTol = 1e-6;    // rad short of an exact 180 degree turn
constexpr double kSingularTangent = 1e-12;
constexpr std::size_t kArcTableSize = 512;

void check_unit_range(double t) {
    if (!(t >= 0.0 && t <= 1.0)) {
        throw DomainError("bezier parameter outside [0, 1]");
    }
}

Vec2 bezier_second_derivative(const BezierSegment& b, double t) {
    const auto& p = b.control;
    const Vec2 a = p[2] - p[1] * 2.0 + p[0];
    const Vec2 c = p[3] - p[2] * 2.0 + p[1];
    return (a * (1.0 - t) + c * t) * 6.0;
}

}  // namespace

LocalTrajectory::LocalTrajectory(std::vector<TrajectoryPoint> points, double horizon,
                                 std::size_t start_offset)
    : points_(std::move(points)), horizon_(horizon), start_offset_(start_offset) {
    xs_.reserve(points_.size());
    ys_.reserve(points_.size());
    curvatures_.reserve(points_.size());
    for (const TrajectoryPoint& p : points_) {
        xs_.push_back(p.position.x);
        ys_.push_back(p.position.y);
        curvatures_.push_back(p.curvature);
    }
}

void LocalTrajectory::annotate_stop(std::size_t i, StopAnnotation annotation) {
    points_.at(i).stop = std::move(annotation);
    points_[i].target_speed = 0.0;
}

void LocalTrajectory::clear_stop(std::size_t i) { points_.at(i).stop.reset(); }

void LocalTrajectory::set_target_speed(std::size_t i, double v) {
    points_.at(i).target_speed = v;
}

void LocalTrajectory::set_curvature(std::size_t i, double k) {
    points_.at(i).curvature = k;
    curvatures_.at(i) = k;
}

ComfortLevel ComfortLevel::from_name(const std::string& name) {
    if (name == "comfortable") return comfortable();
    if (name == "normal") return normal();
    if (name == "aggressive") return aggressive();
    throw DomainError("unknown comfort level '" + name + "'");
}

std::string_view ComfortLevel::name() const {
    switch (level) {
        case Level::comfortable: return "comfortable";
        case Level::normal: return "normal";
        case Level::aggressive: return "aggressive";
    }
    return "normal";
}

Vec2 bezier_point(const BezierSegment& b, double t) {
    check_unit_range(t);
    const auto& p = b.control;
    const double u = 1.0 - t;
    return p[0] * (u * u * u) + p[1] * (3.0 * u * u * t) + p[2] * (3.0 * u * t * t) +
           p[3] * (t * t * t);
}

Vec2 bezier_derivative(const BezierSegment& b, double t) {
    check_unit_range(t);
    const auto& p = b.control;
    const double u = 1.0 - t;
    return (p[1] - p[0]) * (3.0 * u * u) + (p[2] - p[1]) * (6.0 * u * t) +
           (p[3] - p[2]) * (3.0 * t * t);
}

double bezier_curvature(const BezierSegment& b, double t) {
    const Vec2 d1 = bezier_derivative(b, t);
    const double speed2 = d1.norm2();
    if (speed2 < kSingularTangent * kSingularTangent) {
        throw SingularDerivative("zero tangent on bezier segment");
    }
    const Vec2 d2 = bezier_second_derivative(b, t);
    return cross(d1, d2) / (speed2 * std::sqrt(speed2));
}

std::vector<SegmentPrimitive> build_geometry(const GlobalPath& path, const MapGraph& graph,
                                             double corner_offset) {
    if (!(corner_offset > 0.0)) {
        throw DomainError("corner_offset must be > 0");
    }
    const auto& pos = path.node_positions;
    if (pos.size() <= 1) {
        return {};
    }
    for (std::size_t i = 0; i + 1 < pos.size(); ++i) {
        if (distance(pos[i], pos[i + 1]) < kGeomEps) {
            throw DegenerateGeometry("coincident consecutive nodes '" + path.nodes[i] +
                                     "' and '" + path.nodes[i + 1] + "'");
        }
    }

    const auto edge_limit = [&](std::size_t i) {
        return graph.edges()[path.edge_indices[i]].speed_limit;
    };

    std::vector<SegmentPrimitive> prims;
    std::size_t seg_index = 0;
    const auto emit_straight = [&](Vec2 a, Vec2 b, double limit) {
        if (distance(a, b) > kGeomEps) {
            prims.push_back({StraightSegment{a, b}, seg_index++, limit});
        }
    };

    Vec2 cursor = pos[0];
    double pending_limit = edge_limit(0);

    for (std::size_t j = 1; j + 1 < pos.size(); ++j) {
        const Vec2 d_in = normalized(pos[j] - pos[j - 1]);
        const Vec2 d_out = normalized(pos[j + 1] - pos[j]);
        const double turn = std::atan2(std::fabs(cross(d_in, d_out)), dot(d_in, d_out));
        if (turn < kCollinearTol) {
            pending_limit = std::min(pending_limit, edge_limit(j));
            continue;
        }
        if (turn > kPi - kReversalTol) {
            throw DegenerateGeometry("heading reversal at node '" + path.nodes[j] + "'");
        }

        const double len_in = distance(pos[j - 1], pos[j]);
        const double len_out = distance(pos[j], pos[j + 1]);
        const double off_in = std::min(corner_offset, 0.5 * len_in);
        const double off_out = std::min(corner_offset, 0.5 * len_out);
        const Vec2 blend_start = pos[j] - d_in * off_in;
        const Vec2 blend_end = pos[j] + d_out * off_out;

        emit_straight(cursor, blend_start, pending_limit);

        const double ctrl = distance(blend_start, blend_end) / 3.0;
        BezierSegment blend{{blend_start, blend_start + d_in * ctrl, blend_end - d_out * ctrl,
                             blend_end}};
        prims.push_back(
            {blend, seg_index++, std::min(edge_limit(j - 1), edge_limit(j))});

        cursor = blend_end;
        pending_limit = edge_limit(j);
    }

    emit_straight(cursor, pos.back(), pending_limit);
    return prims;
}

namespace {

struct SampledPrimitive {
    double length = 0.0;
    // Arc-length table for beziers: cumulative length at uniform parameters.
    std::vector<double> cum_length;
};

SampledPrimitive measure(const SegmentPrimitive& prim) {
    SampledPrimitive out;
    if (prim.is_straight()) {
        const auto& s = std::get<StraightSegment>(prim.shape);
        out.length = distance(s.start, s.end);
        return out;
    }
    const auto& b = std::get<BezierSegment>(prim.shape);
    out.cum_length.resize(kArcTableSize + 1, 0.0);
    Vec2 prev = b.control[0];
    for (std::size_t i = 1; i <= kArcTableSize; ++i) {
        const Vec2 p = bezier_point(b, static_cast<double>(i) / kArcTableSize);
        out.cum_length[i] = out.cum_length[i - 1] + distance(prev, p);
        prev = p;
    }
    out.length = out.cum_length.back();
    return out;
}

// Inverts the cumulative table: parameter t at arc length s.
double param_at_length(const SampledPrimitive& m, double s) {
    const auto& cum = m.cum_length;
    const auto it = std::lower_bound(cum.begin(), cum.end(), s);
    if (it == cum.begin()) return 0.0;
    if (it == cum.end()) return 1.0;
    const std::size_t hi = static_cast<std::size_t>(it - cum.begin());
    const double s0 = cum[hi - 1];
    const double s1 = cum[hi];
    const double frac = s1 > s0 ? (s - s0) / (s1 - s0) : 0.0;
    return (static_cast<double>(hi - 1) + frac) / kArcTableSize;
}

}  // namespace

LocalTrajectory sample_trajectory(const std::vector<SegmentPrimitive>& primitives,
                                  double spacing) {
    if (!(spacing > 0.0)) {
        throw DomainError("sample spacing must be > 0");
    }
    if (primitives.empty()) {
        return LocalTrajectory{};
    }
    for (const SegmentPrimitive& prim : primitives) {
        if (!prim.is_straight()) {
            const auto& b = std::get<BezierSegment>(prim.shape);
            if (distance(b.control[0], b.control[1]) < kGeomEps ||
                distance(b.control[2], b.control[3]) < kGeomEps) {
                throw DegenerateGeometry("bezier blend with undefined end tangent");
            }
        }
    }

    std::vector<TrajectoryPoint> points;
    double base_arc = 0.0;

    const auto start_point = [&](const SegmentPrimitive& prim) {
        TrajectoryPoint p;
        p.segment_index = prim.segment_index;
        p.speed_limit = prim.speed_limit;
        p.arc_length = 0.0;
        if (prim.is_straight()) {
            const auto& s = std::get<StraightSegment>(prim.shape);
            p.position = s.start;
            const Vec2 dir = normalized(s.end - s.start);
            p.heading = std::atan2(dir.y, dir.x);
            p.curvature = 0.0;
        } else {
            const auto& b = std::get<BezierSegment>(prim.shape);
            p.position = b.control[0];
            const Vec2 d = bezier_derivative(b, 0.0);
            p.heading = std::atan2(d.y, d.x);
            p.curvature = bezier_curvature(b, 0.0);
        }
        return p;
    };

    points.push_back(start_point(primitives.front()));

    for (const SegmentPrimitive& prim : primitives) {
        const SampledPrimitive meas = measure(prim);
        if (meas.length < kGeomEps) {
            throw DegenerateGeometry("zero-length segment primitive");
        }
        if (prim.is_straight()) {
            const auto& s = std::get<StraightSegment>(prim.shape);
            const Vec2 dir = normalized(s.end - s.start);
            const double heading = std::atan2(dir.y, dir.x);
            const auto n = static_cast<std::size_t>(std::ceil(meas.length / spacing));
            for (std::size_t i = 1; i <= n; ++i) {
                const double ds = meas.length * static_cast<double>(i) / static_cast<double>(n);
                TrajectoryPoint p;
                p.position = s.start + dir * ds;
                p.heading = heading;
                p.curvature = 0.0;
                p.arc_length = base_arc + ds;
                p.segment_index = prim.segment_index;
                p.speed_limit = prim.speed_limit;
                points.push_back(p);
            }
        } else {
            const auto& b = std::get<BezierSegment>(prim.shape);
            const auto n = static_cast<std::size_t>(std::ceil(meas.length / spacing));
            for (std::size_t i = 1; i <= n; ++i) {
                const double ds = meas.length * static_cast<double>(i) / static_cast<double>(n);
                const double t = i == n ? 1.0 : param_at_length(meas, ds);
                const Vec2 d = bezier_derivative(b, t);
                TrajectoryPoint p;
                p.position = bezier_point(b, t);
                p.heading = std::atan2(d.y, d.x);
                p.curvature = bezier_curvature(b, t);
                p.arc_length = base_arc + ds;
                p.segment_index = prim.segment_index;
                p.speed_limit = prim.speed_limit;
                points.push_back(p);
            }
        }
        base_arc += meas.length;
    }

    return LocalTrajectory(std::move(points));
}

LocalTrajectory clip_to_horizon(const LocalTrajectory& traj, const VehicleState& pose,
                                double horizon) {
    if (!(horizon > 0.0)) {
        throw DomainError("horizon must be > 0");
    }
    if (traj.empty()) {
        throw EmptyTrajectory("clip_to_horizon on empty trajectory");
    }
    const auto xs = traj.xs();
    const auto ys = traj.ys();
    const kernels::ArgMin near =
        kernels::argmin_dist2(xs.data(), ys.data(), traj.size(), pose.x, pose.y);

    const double s_limit = traj.point(near.index).arc_length + horizon;
    std::size_t end = near.index;
    while (end + 1 < traj.size() && traj.point(end + 1).arc_length <= s_limit) {
        ++end;
    }

    std::vector<TrajectoryPoint> clipped(
        traj.points().begin() + static_cast<std::ptrdiff_t>(near.index),
        traj.points().begin() + static_cast<std::ptrdiff_t>(end + 1));
    return LocalTrajectory(std::move(clipped), horizon, traj.start_offset() + near.index);
}

LocalTrajectory profile_velocity(LocalTrajectory traj, const ComfortLevel& comfort,
                                 double v_cruise, double k_max) {
    if (!(v_cruise > 0.0)) {
        throw DomainError("v_cruise must be > 0");
    }
    const std::size_t n = traj.size();
    if (n == 0) {
        return traj;
    }

    // Curve-speed caps from the raw curvature, then the scalar limits.
    std::vector<double> v(n);
    kernels::curve_speed_caps(traj.curvatures().data(), n, comfort.a_lat_max,
                              std::numeric_limits<double>::infinity(), v.data());
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = std::min({v[i], v_cruise, traj.point(i).speed_limit});
        if (traj.point(i).stop.has_value()) {
            v[i] = 0.0;
        }
    }
    v[n - 1] = 0.0;

    const double a = comfort.a_long_max;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double ds = traj.point(i + 1).arc_length - traj.point(i).arc_length;
        v[i + 1] = std::min(v[i + 1], std::sqrt(v[i] * v[i] + 2.0 * a * ds));
    }
    for (std::size_t i = n - 1; i > 0; --i) {
        const double ds = traj.point(i).arc_length - traj.point(i - 1).arc_length;
        v[i - 1] = std::min(v[i - 1], std::sqrt(v[i] * v[i] + 2.0 * a * ds));
    }

    for (std::size_t i = 0; i < n; ++i) {
        traj.set_target_speed(i, v[i]);
        const double k = traj.point(i).curvature;
        if (std::fabs(k) > k_max) {
            traj.set_curvature(i, std::copysign(k_max, k));
        }
    }
    return traj;
}

}  // namespace cts
