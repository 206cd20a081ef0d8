#pragma once

#include <cmath>
#include <vector>

namespace cellevac {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2& operator+=(Vec2 o) {
        x += o.x;
        y += o.y;
        return *this;
    }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
    double norm_sq() const { return x * x + y * y; }
    Vec2 normalized() const {
        const double n = norm();
        return n > 0.0 ? Vec2{x / n, y / n} : Vec2{0.0, 0.0};
    }
};

struct Segment {
    Vec2 a;
    Vec2 b;

    Vec2 midpoint() const { return {(a.x + b.x) * 0.5, (a.y + b.y) * 0.5}; }
    double length() const { return (b - a).norm(); }
};

using Polygon = std::vector<Vec2>;

double distance(Vec2 p, Vec2 q);

// Closest point on segment [a,b] to p.
Vec2 closest_point_on_segment(Vec2 p, const Segment& s);
double distance_to_segment(Vec2 p, const Segment& s);

// Even-odd test; points on the boundary count as inside.
bool point_in_polygon(Vec2 p, const Polygon& poly);

// Proper or touching intersection of two segments.
bool segments_intersect(const Segment& s1, const Segment& s2);

double polygon_area(const Polygon& poly);
Vec2 polygon_centroid(const Polygon& poly);

// Nearest point on the polygon outline to p.
Vec2 closest_point_on_polygon(Vec2 p, const Polygon& poly);

}  // namespace cellevac
