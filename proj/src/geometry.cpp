#include "geometry.hpp"

#include <algorithm>
#include <limits>

namespace cellevac {

double distance(Vec2 p, Vec2 q) { return (p - q).norm(); }

Vec2 closest_point_on_segment(Vec2 p, const Segment& s) {
    const Vec2 d = s.b - s.a;
    const double len_sq = d.norm_sq();
    if (len_sq <= 0.0) return s.a;
    const double t = std::clamp((p - s.a).dot(d) / len_sq, 0.0, 1.0);
    return s.a + d * t;
}

double distance_to_segment(Vec2 p, const Segment& s) {
    return distance(p, closest_point_on_segment(p, s));
}

bool point_in_polygon(Vec2 p, const Polygon& poly) {
    const size_t n = poly.size();
    if (n < 3) return false;
    // Boundary points count as inside (tolerance scaled to coordinates).
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        if (distance_to_segment(p, {poly[j], poly[i]}) < 1e-9) return true;
    }
    bool inside = false;
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2 a = poly[j];
        const Vec2 b = poly[i];
        if ((b.y > p.y) != (a.y > p.y)) {
            const double x_cross = b.x + (p.y - b.y) * (a.x - b.x) / (a.y - b.y);
            if (p.x < x_cross) inside = !inside;
        }
    }
    return inside;
}

namespace {

double cross(Vec2 o, Vec2 a, Vec2 b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool on_segment(Vec2 p, const Segment& s) { return distance_to_segment(p, s) < 1e-12; }

}  // namespace

bool segments_intersect(const Segment& s1, const Segment& s2) {
    const double d1 = cross(s2.a, s2.b, s1.a);
    const double d2 = cross(s2.a, s2.b, s1.b);
    const double d3 = cross(s1.a, s1.b, s2.a);
    const double d4 = cross(s1.a, s1.b, s2.b);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
        return true;
    }
    if (d1 == 0 && on_segment(s1.a, s2)) return true;
    if (d2 == 0 && on_segment(s1.b, s2)) return true;
    if (d3 == 0 && on_segment(s2.a, s1)) return true;
    if (d4 == 0 && on_segment(s2.b, s1)) return true;
    return false;
}

double polygon_area(const Polygon& poly) {
    double a = 0.0;
    const size_t n = poly.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        a += poly[j].x * poly[i].y - poly[i].x * poly[j].y;
    }
    return std::abs(a) * 0.5;
}

Vec2 polygon_centroid(const Polygon& poly) {
    double cx = 0.0, cy = 0.0, a = 0.0;
    const size_t n = poly.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const double w = poly[j].x * poly[i].y - poly[i].x * poly[j].y;
        cx += (poly[j].x + poly[i].x) * w;
        cy += (poly[j].y + poly[i].y) * w;
        a += w;
    }
    if (a == 0.0) return poly.empty() ? Vec2{} : poly[0];
    return {cx / (3.0 * a), cy / (3.0 * a)};
}

Vec2 closest_point_on_polygon(Vec2 p, const Polygon& poly) {
    Vec2 best = poly.empty() ? p : poly[0];
    double best_d = std::numeric_limits<double>::max();
    const size_t n = poly.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2 q = closest_point_on_segment(p, {poly[j], poly[i]});
        const double d = distance(p, q);
        if (d < best_d) {
            best_d = d;
            best = q;
        }
    }
    return best;
}

}  // namespace cellevac
