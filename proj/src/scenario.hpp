#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "geometry.hpp"

namespace cellevac {

// Scenario document problems (schema violations, bad geometry).
class ScenarioError : public std::runtime_error {
public:
    explicit ScenarioError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ExitGate {
    int id = 0;                 // id as written in the scenario document
    Vec2 position;              // nominal gate location (projected onto the wall)
    double width_m = 0.0;
    double critical_density = 0.0;              // peds/m^2, capacity point
    std::array<double, 3> thresholds{};         // ascending safety densities
    std::optional<Vec2> entry_point;            // external inflow spawn point
    Segment gate;                               // resolved wall opening
};

struct HexCell {
    int id = 0;
    Vec2 center;
    std::array<Vec2, 6> vertices{};
};

struct CellGrid {
    std::vector<HexCell> cells;
    double width_flat_to_flat = 0.0;
};

struct PopulationSpec {
    long count = 0;
    double speed_min = 1.24;  // m/s
    double speed_max = 1.48;
};

struct ScenarioLayout {
    Polygon walkable;
    std::vector<Polygon> obstacles;
    std::vector<ExitGate> exits;
    CellGrid grid;
    PopulationSpec population;
    double safety_penalty_slope = 20.0;

    // distance_matrix[cell][exit]: Euclidean cell center to gate midpoint.
    std::vector<std::vector<double>> distance_matrix;
    double max_distance = 0.0;
    double max_width = 0.0;

    // Wall segments: polygon edges minus gate openings, plus obstacle edges.
    // Blocked gates are added back as walls at run time, not here.
    std::vector<Segment> walls;

    int cell_count() const { return static_cast<int>(grid.cells.size()); }
    int exit_count() const { return static_cast<int>(exits.size()); }

    bool contains(Vec2 p) const;
};

// Parses and fully resolves a scenario document (JSON text). Throws
// ScenarioError naming the offending field on schema violations, and on
// geometry problems such as overlapping cells.
ScenarioLayout load_scenario(const std::string& json_text);
ScenarioLayout load_scenario_file(const std::string& path);

// Ground-truth locator: nearest cell center, ties broken by lowest cell id.
// Throws ScenarioError if p is outside the walkable area.
int locate_cell_exact(const ScenarioLayout& layout, Vec2 p);

// distance_matrix[c][j] / max_distance, in (0,1].
double normalized_distance(const ScenarioLayout& layout, int cell, int exit);

}  // namespace cellevac
