#include "scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace cellevac {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& why) {
    throw ScenarioError("scenario: " + field + ": " + why);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key)) fail(path + "." + key, "missing required field");
    return obj.at(key);
}

double require_number(const json& obj, const std::string& key, const std::string& path) {
    const json& v = require(obj, key, path);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    return v.get<double>();
}

Vec2 parse_point(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        fail(path, "expected a point [x, y]");
    }
    return {v[0].get<double>(), v[1].get<double>()};
}

Polygon parse_polygon(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() < 3) fail(path, "expected a polygon with >= 3 points");
    Polygon poly;
    poly.reserve(v.size());
    for (size_t i = 0; i < v.size(); ++i) {
        poly.push_back(parse_point(v[i], path + "[" + std::to_string(i) + "]"));
    }
    return poly;
}

// Pointy-top hexagon vertices for a flat-to-flat width w.
std::array<Vec2, 6> hex_vertices(Vec2 c, double w) {
    const double r = w / std::sqrt(3.0);  // circumradius
    std::array<Vec2, 6> v{};
    for (int k = 0; k < 6; ++k) {
        const double ang = M_PI / 6.0 + k * M_PI / 3.0;
        v[k] = {c.x + r * std::cos(ang), c.y + r * std::sin(ang)};
    }
    return v;
}

bool inside_any(Vec2 p, const std::vector<Polygon>& polys) {
    for (const auto& poly : polys) {
        if (point_in_polygon(p, poly)) return true;
    }
    return false;
}

// Hexagonal lattice candidates inside the walkable area, spacing = cell
// width. Anchored at the polygon centroid so the grid is invariant to
// document-level translations of the whole layout.
std::vector<Vec2> lattice_candidates(const Polygon& walkable,
                                     const std::vector<Polygon>& obstacles, double w) {
    const Vec2 c0 = polygon_centroid(walkable);
    double max_r = 0.0;
    for (const Vec2& v : walkable) max_r = std::max(max_r, distance(v, c0));

    const double row_h = w * std::sqrt(3.0) / 2.0;
    const int ni = static_cast<int>(std::ceil(max_r / w)) + 1;
    const int nj = static_cast<int>(std::ceil(max_r / row_h)) + 1;

    std::vector<Vec2> pts;
    for (int j = -nj; j <= nj; ++j) {
        const double off = (j % 2 == 0) ? 0.0 : w / 2.0;
        for (int i = -ni; i <= ni; ++i) {
            const Vec2 p{c0.x + i * w + off, c0.y + j * row_h};
            if (point_in_polygon(p, walkable) && !inside_any(p, obstacles)) pts.push_back(p);
        }
    }
    return pts;
}

CellGrid build_grid(const json& g, const Polygon& walkable,
                    const std::vector<Polygon>& obstacles) {
    CellGrid grid;
    grid.width_flat_to_flat = require_number(g, "cell_width_m", "grid");
    if (grid.width_flat_to_flat <= 0.0) fail("grid.cell_width_m", "must be > 0");
    const double w = grid.width_flat_to_flat;

    std::vector<Vec2> centers;
    if (g.contains("centers")) {
        const json& cs = g.at("centers");
        if (!cs.is_array() || cs.empty()) fail("grid.centers", "expected a nonempty point list");
        for (size_t i = 0; i < cs.size(); ++i) {
            centers.push_back(parse_point(cs[i], "grid.centers[" + std::to_string(i) + "]"));
        }
    } else {
        std::vector<Vec2> pts = lattice_candidates(walkable, obstacles, w);
        const auto clearance = [&](Vec2 p) {
            double c = distance(p, closest_point_on_polygon(p, walkable));
            for (const Polygon& obs : obstacles) {
                c = std::min(c, distance(p, closest_point_on_polygon(p, obs)));
            }
            return c;
        };
        if (g.contains("count")) {
            const json& cnt = g.at("count");
            if (!cnt.is_number_integer() || cnt.get<long>() <= 0) {
                fail("grid.count", "expected a positive integer");
            }
            const size_t count = cnt.get<size_t>();
            if (pts.size() < count) {
                fail("grid.count", "walkable area only fits " + std::to_string(pts.size()) +
                                       " cells of this width");
            }
            // Keep the `count` best-cleared candidates so the beacons stay
            // spread across the walkable area whatever its shape.
            std::sort(pts.begin(), pts.end(), [&](Vec2 a, Vec2 b) {
                const double ca = clearance(a);
                const double cb = clearance(b);
                if (ca != cb) return ca > cb;
                if (a.x != b.x) return a.x < b.x;
                return a.y < b.y;
            });
            pts.resize(count);
        } else {
            // Keep cells with full clearance from the boundary.
            std::vector<Vec2> kept;
            for (const Vec2& p : pts) {
                if (distance(p, closest_point_on_polygon(p, walkable)) >= w / 2.0) {
                    kept.push_back(p);
                }
            }
            pts = std::move(kept);
            if (pts.empty()) fail("grid", "no cells fit the walkable area");
        }
        // Stable reading order: bottom row to top, left to right.
        std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) {
            if (a.y != b.y) return a.y < b.y;
            return a.x < b.x;
        });
        centers = std::move(pts);
    }

    for (size_t i = 0; i < centers.size(); ++i) {
        grid.cells.push_back({static_cast<int>(i), centers[i], hex_vertices(centers[i], w)});
    }

    // Tiling check: lattice-spaced cells never sit closer than one width.
    for (size_t i = 0; i < centers.size(); ++i) {
        for (size_t j = i + 1; j < centers.size(); ++j) {
            if (distance(centers[i], centers[j]) < w - 1e-9) {
                fail("grid", "cells " + std::to_string(i) + " and " + std::to_string(j) +
                                 " overlap (centers closer than the cell width)");
            }
        }
    }
    return grid;
}

struct EdgeRef {
    size_t edge_index;
    Segment edge;
    double t_mid;  // projection parameter of the gate midpoint on the edge
};

// Projects the declared exit position on the nearest wall edge and carves a
// gate of the requested width, centered on the projection, along that edge.
EdgeRef resolve_gate_edge(const Polygon& poly, Vec2 position, const std::string& path) {
    double best_d = std::numeric_limits<double>::max();
    EdgeRef best{0, {}, 0.0};
    const size_t n = poly.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const Segment e{poly[j], poly[i]};
        const double d = distance_to_segment(position, e);
        if (d < best_d) {
            best_d = d;
            const Vec2 dir = e.b - e.a;
            const double t = dir.norm_sq() > 0.0
                                 ? std::clamp((position - e.a).dot(dir) / dir.norm_sq(), 0.0, 1.0)
                                 : 0.0;
            best = {j, e, t};
        }
    }
    if (best_d > 5.0) fail(path + ".position", "more than 5 m away from every wall");
    return best;
}

}  // namespace

bool ScenarioLayout::contains(Vec2 p) const {
    return point_in_polygon(p, walkable) && !inside_any(p, obstacles);
}

ScenarioLayout load_scenario(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ScenarioError(std::string("scenario: invalid JSON: ") + e.what());
    }

    ScenarioLayout layout;

    const json& arena = require(doc, "arena", "(root)");
    layout.walkable = parse_polygon(require(arena, "polygon", "arena"), "arena.polygon");
    if (arena.contains("obstacles")) {
        const json& obs = arena.at("obstacles");
        if (!obs.is_array()) fail("arena.obstacles", "expected a list of polygons");
        for (size_t i = 0; i < obs.size(); ++i) {
            layout.obstacles.push_back(
                parse_polygon(obs[i], "arena.obstacles[" + std::to_string(i) + "]"));
        }
    }

    const json& exits = require(doc, "exits", "(root)");
    if (!exits.is_array() || exits.empty()) fail("exits", "expected a nonempty list");
    for (size_t i = 0; i < exits.size(); ++i) {
        const std::string path = "exits[" + std::to_string(i) + "]";
        const json& e = exits[i];
        ExitGate gate;
        const json& id = require(e, "id", path);
        if (!id.is_number_integer()) fail(path + ".id", "expected an integer");
        gate.id = id.get<int>();
        gate.position = parse_point(require(e, "position", path), path + ".position");
        gate.width_m = require_number(e, "width_m", path);
        if (gate.width_m <= 0.0) fail(path + ".width_m", "must be > 0");
        gate.critical_density = require_number(e, "critical_density", path);
        if (gate.critical_density <= 0.0) fail(path + ".critical_density", "must be > 0");
        const json& th = require(e, "thresholds", path);
        if (!th.is_array() || th.size() != 3) fail(path + ".thresholds", "expected 3 densities");
        for (int k = 0; k < 3; ++k) {
            if (!th[k].is_number()) fail(path + ".thresholds", "expected 3 densities");
            gate.thresholds[k] = th[k].get<double>();
        }
        if (!(gate.thresholds[0] < gate.thresholds[1] && gate.thresholds[1] < gate.thresholds[2])) {
            fail(path + ".thresholds", "must be strictly ascending");
        }
        if (e.contains("entry_point")) {
            gate.entry_point = parse_point(e.at("entry_point"), path + ".entry_point");
        }

        const EdgeRef ref = resolve_gate_edge(layout.walkable, gate.position, path);
        const Vec2 dir = (ref.edge.b - ref.edge.a).normalized();
        const double edge_len = ref.edge.length();
        const double half = gate.width_m / 2.0;
        if (gate.width_m > edge_len + 1e-9) {
            fail(path + ".width_m", "gate wider than its wall edge");
        }
        double t_mid = std::clamp(ref.t_mid * edge_len, half, edge_len - half);
        gate.position = ref.edge.a + dir * t_mid;
        gate.gate = {ref.edge.a + dir * (t_mid - half), ref.edge.a + dir * (t_mid + half)};
        layout.exits.push_back(gate);
    }
    for (size_t i = 0; i < layout.exits.size(); ++i) {
        for (size_t j = i + 1; j < layout.exits.size(); ++j) {
            if (layout.exits[i].id == layout.exits[j].id) {
                fail("exits", "duplicate exit id " + std::to_string(layout.exits[i].id));
            }
        }
    }

    layout.grid = build_grid(require(doc, "grid", "(root)"), layout.walkable, layout.obstacles);

    const json& pop = require(doc, "population", "(root)");
    const json& count = require(pop, "count", "population");
    if (!count.is_number_integer() || count.get<long>() < 0) {
        fail("population.count", "expected a non-negative integer");
    }
    layout.population.count = count.get<long>();
    layout.population.speed_min = require_number(pop, "speed_min", "population");
    layout.population.speed_max = require_number(pop, "speed_max", "population");
    if (layout.population.speed_min <= 0.0 ||
        layout.population.speed_max < layout.population.speed_min) {
        fail("population.speed_min", "need 0 < speed_min <= speed_max");
    }

    if (doc.contains("safety") && doc.at("safety").contains("penalty_slope")) {
        layout.safety_penalty_slope = require_number(doc.at("safety"), "penalty_slope", "safety");
        if (layout.safety_penalty_slope <= 0.0) fail("safety.penalty_slope", "must be > 0");
    }

    // Entry points must be usable spawn locations.
    for (size_t i = 0; i < layout.exits.size(); ++i) {
        const auto& ep = layout.exits[i].entry_point;
        if (ep && !layout.contains(*ep)) {
            fail("exits[" + std::to_string(i) + "].entry_point", "outside the walkable area");
        }
    }

    // Distance matrix: cell center to gate midpoint.
    const int nc = layout.cell_count();
    const int ne = layout.exit_count();
    layout.distance_matrix.assign(nc, std::vector<double>(ne, 0.0));
    layout.max_distance = 0.0;
    for (int c = 0; c < nc; ++c) {
        for (int j = 0; j < ne; ++j) {
            const double d = distance(layout.grid.cells[c].center, layout.exits[j].gate.midpoint());
            if (d <= 0.0) {
                fail("grid", "cell " + std::to_string(c) + " coincides with exit " +
                                 std::to_string(layout.exits[j].id));
            }
            layout.distance_matrix[c][j] = d;
            layout.max_distance = std::max(layout.max_distance, d);
        }
    }
    layout.max_width = 0.0;
    for (const ExitGate& e : layout.exits) layout.max_width = std::max(layout.max_width, e.width_m);

    // Walls: each polygon edge minus the gate openings carved into it.
    const size_t n = layout.walkable.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const Segment edge{layout.walkable[j], layout.walkable[i]};
        const Vec2 dir = (edge.b - edge.a).normalized();
        const double len = edge.length();
        std::vector<std::pair<double, double>> openings;
        for (const ExitGate& e : layout.exits) {
            const double ta = (e.gate.a - edge.a).dot(dir);
            const double tb = (e.gate.b - edge.a).dot(dir);
            if (distance_to_segment(e.gate.midpoint(), edge) < 1e-6) {
                openings.emplace_back(std::min(ta, tb), std::max(ta, tb));
            }
        }
        std::sort(openings.begin(), openings.end());
        double t = 0.0;
        for (const auto& [lo, hi] : openings) {
            if (lo > t + 1e-9) layout.walls.push_back({edge.a + dir * t, edge.a + dir * lo});
            t = std::max(t, hi);
        }
        if (t < len - 1e-9) layout.walls.push_back({edge.a + dir * t, edge.b});
    }
    for (const Polygon& obs : layout.obstacles) {
        const size_t m = obs.size();
        for (size_t i = 0, j = m - 1; i < m; j = i++) layout.walls.push_back({obs[j], obs[i]});
    }

    return layout;
}

ScenarioLayout load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("scenario: cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_scenario(ss.str());
}

int locate_cell_exact(const ScenarioLayout& layout, Vec2 p) {
    if (!layout.contains(p)) {
        throw ScenarioError("locate_cell_exact: point outside the walkable area");
    }
    int best = -1;
    double best_d = std::numeric_limits<double>::max();
    for (const HexCell& c : layout.grid.cells) {
        const double d = (p - c.center).norm_sq();
        if (d < best_d) {  // strict: lowest id wins ties
            best_d = d;
            best = c.id;
        }
    }
    return best;
}

double normalized_distance(const ScenarioLayout& layout, int cell, int exit) {
    if (cell < 0 || cell >= layout.cell_count()) {
        throw ScenarioError("normalized_distance: invalid cell id " + std::to_string(cell));
    }
    if (exit < 0 || exit >= layout.exit_count()) {
        throw ScenarioError("normalized_distance: invalid exit index " + std::to_string(exit));
    }
    return layout.distance_matrix[cell][exit] / layout.max_distance;
}

}  // namespace cellevac
