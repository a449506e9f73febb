#pragma once

#include <cmath>

namespace cts {

inline constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    bool operator==(const Vec2&) const = default;

    double norm2() const { return x * x + y * y; }
    double norm() const { return std::sqrt(norm2()); }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double distance(Vec2 a, Vec2 b) { return (b - a).norm(); }
inline double distance2(Vec2 a, Vec2 b) { return (b - a).norm2(); }

inline Vec2 normalized(Vec2 v) {
    const double n = v.norm();
    return n > 0.0 ? v / n : Vec2{0.0, 0.0};
}

inline Vec2 heading_vector(double heading) { return {std::cos(heading), std::sin(heading)}; }

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
    double w = std::remainder(a, 2.0 * kPi);
    if (w <= -kPi) {
        w += 2.0 * kPi;
    }
    return w;
}

struct SegmentProjection {
    double t = 0.0;   // parameter along [a,b], clamped to [0,1]
    Vec2 point;       // closest point on the segment
    double dist2 = 0.0;
};

/// Closest point on segment [a,b] to p. Degenerate segments collapse to a.
inline SegmentProjection project_on_segment(Vec2 a, Vec2 b, Vec2 p) {
    const Vec2 ab = b - a;
    const double len2 = ab.norm2();
    double t = 0.0;
    if (len2 > 0.0) {
        t = dot(p - a, ab) / len2;
        t = t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
    }
    SegmentProjection out;
    out.t = t;
    out.point = a + ab * t;
    out.dist2 = distance2(out.point, p);
    return out;
}

inline double segment_distance(Vec2 a, Vec2 b, Vec2 p) {
    return std::sqrt(project_on_segment(a, b, p).dist2);
}

}  // namespace cts
