#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace carrier {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm2(const Vec2& v) { return v.x * v.x + v.y * v.y; }
inline double norm(const Vec2& v) { return std::hypot(v.x, v.y); }
inline double distance(const Vec2& a, const Vec2& b) { return norm(a - b); }
inline double arg(const Vec2& v) { return std::atan2(v.y, v.x); }
inline Vec2 unit_from_angle(double theta) { return {std::cos(theta), std::sin(theta)}; }

inline Vec2 normalized(const Vec2& v) {
    double n = norm(v);
    return n > 0.0 ? v / n : Vec2{0.0, 0.0};
}

/// Angle at apex `b` between rays b->a and b->c, in [0, pi].
inline double angle_at(const Vec2& a, const Vec2& b, const Vec2& c) {
    Vec2 u = a - b, v = c - b;
    double ang = std::atan2(std::abs(cross(u, v)), dot(u, v));
    return ang;
}

/// Reduce an angle into [0, 2*pi).
inline double normalize_angle(double a) {
    a = std::fmod(a, kTwoPi);
    if (a < 0.0) a += kTwoPi;
    if (a >= kTwoPi) a = 0.0;
    return a;
}

/// Closed arc [lo, lo+len] on the circle R/(2*pi*Z); len in (0, 2*pi].
struct AngleInterval {
    double lo = 0.0;
    double len = kTwoPi;

    bool full() const { return len >= kTwoPi - 1e-15; }
    double hi() const { return lo + len; }

    bool contains(double theta) const {
        if (full()) return true;
        double d = normalize_angle(theta - lo);
        return d <= len;
    }

    AngleInterval rotated(double by) const { return {normalize_angle(lo + by), len}; }
    AngleInterval complement() const { return {normalize_angle(lo + len), kTwoPi - len}; }
};

// ---------------------------------------------------------------------------
// Segments

inline double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    Vec2 ab = b - a;
    double len2 = norm2(ab);
    if (len2 == 0.0) return distance(p, a);
    double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return distance(p, a + ab * t);
}

inline double segment_segment_distance(const Vec2& a1, const Vec2& b1,
                                       const Vec2& a2, const Vec2& b2) {
    auto orient = [](const Vec2& a, const Vec2& b, const Vec2& c) {
        return cross(b - a, c - a);
    };
    double d1 = orient(a2, b2, a1), d2 = orient(a2, b2, b1);
    double d3 = orient(a1, b1, a2), d4 = orient(a1, b1, b2);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return 0.0;  // proper crossing
    double d = point_segment_distance(a1, a2, b2);
    d = std::min(d, point_segment_distance(b1, a2, b2));
    d = std::min(d, point_segment_distance(a2, a1, b1));
    d = std::min(d, point_segment_distance(b2, a1, b1));
    return d;
}

/// Intersections of segment a + t*(b-a), t in [0,1], with circle |p-c| = rho.
inline std::vector<double> segment_circle_params(const Vec2& a, const Vec2& b,
                                                 const Vec2& c, double rho) {
    Vec2 d = b - a, f = a - c;
    double A = norm2(d);
    double B = 2.0 * dot(f, d);
    double C = norm2(f) - rho * rho;
    std::vector<double> ts;
    if (A == 0.0) return ts;
    double disc = B * B - 4.0 * A * C;
    if (disc < 0.0) return ts;
    double s = std::sqrt(disc);
    // stable quadratic roots
    double q = (B >= 0.0) ? -0.5 * (B + s) : -0.5 * (B - s);
    double t1 = q / A;
    double t2 = (q != 0.0) ? C / q : t1;
    if (t1 > t2) std::swap(t1, t2);
    for (double t : {t1, t2})
        if (t >= 0.0 && t <= 1.0) ts.push_back(t);
    if (ts.size() == 2 && ts[0] == ts[1]) ts.pop_back();
    return ts;
}

// ---------------------------------------------------------------------------
// Polygons (vertex cycles, no closing repeat)

inline double polygon_signed_area(const std::vector<Vec2>& p) {
    double s = 0.0;
    for (std::size_t i = 0, n = p.size(); i < n; ++i) {
        const Vec2& a = p[i];
        const Vec2& b = p[(i + 1) % n];
        s += cross(a, b);
    }
    return 0.5 * s;
}

inline double polygon_diameter(const std::vector<Vec2>& p) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j)
            d2 = std::max(d2, norm2(p[i] - p[j]));
    return std::sqrt(d2);
}

inline bool point_in_polygon(const Vec2& q, const std::vector<Vec2>& poly) {
    bool inside = false;
    for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        if ((a.y > q.y) != (b.y > q.y)) {
            double xint = a.x + (q.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (q.x < xint) inside = !inside;
        }
    }
    return inside;
}

inline double distance_to_polygon_boundary(const Vec2& q, const std::vector<Vec2>& poly) {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0, n = poly.size(); i < n; ++i)
        d = std::min(d, point_segment_distance(q, poly[i], poly[(i + 1) % n]));
    return d;
}

// ---------------------------------------------------------------------------
// Closed sub-intervals of [0,1] (cable pieces live on edge parameters)

struct UnitInterval {
    double lo = 0.0;
    double hi = 0.0;
    double length() const { return hi - lo; }
};

/// Sort, clip to [0,1] and merge overlapping/touching intervals.
inline std::vector<UnitInterval> merge_unit_intervals(std::vector<UnitInterval> v) {
    std::vector<UnitInterval> out;
    for (auto& it : v) {
        it.lo = std::clamp(it.lo, 0.0, 1.0);
        it.hi = std::clamp(it.hi, 0.0, 1.0);
    }
    std::erase_if(v, [](const UnitInterval& it) { return !(it.hi > it.lo); });
    std::sort(v.begin(), v.end(),
              [](const UnitInterval& a, const UnitInterval& b) { return a.lo < b.lo; });
    for (const auto& it : v) {
        if (!out.empty() && it.lo <= out.back().hi + 1e-15)
            out.back().hi = std::max(out.back().hi, it.hi);
        else
            out.push_back(it);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Robust-enough predicates for Delaunay construction

/// > 0 if p lies inside the circumcircle of ccw triangle (a,b,c).
inline double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& p) {
    double ax = a.x - p.x, ay = a.y - p.y;
    double bx = b.x - p.x, by = b.y - p.y;
    double cx = c.x - p.x, cy = c.y - p.y;
    double d1 = (ax * ax + ay * ay) * (bx * cy - by * cx);
    double d2 = (bx * bx + by * by) * (ax * cy - ay * cx);
    double d3 = (cx * cx + cy * cy) * (ax * by - ay * bx);
    return d1 - d2 + d3;
}

inline double orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
    return cross(b - a, c - a);
}

struct Circumcircle {
    Vec2 center;
    double radius2 = 0.0;
};

inline std::optional<Circumcircle> circumcircle(const Vec2& a, const Vec2& b, const Vec2& c) {
    double d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
    if (d == 0.0) return std::nullopt;
    double a2 = norm2(a), b2 = norm2(b), c2 = norm2(c);
    Vec2 u{(a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d,
           (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d};
    return Circumcircle{u, norm2(a - u)};
}

}  // namespace carrier
