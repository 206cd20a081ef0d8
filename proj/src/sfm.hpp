#pragma once

#include <vector>

#include "rng.hpp"
#include "scenario.hpp"

namespace cellevac {

// Helbing-style motion parameters.
struct SfmParams {
    double mass = 80.0;            // kg
    double tau = 0.5;              // relaxation time, s
    double repulsion_a = 2000.0;   // N
    double repulsion_b = 0.08;     // m
    double body_radius = 0.25;     // m
    double contact_k = 1.2e5;      // kg/s^2
    double friction_kappa = 2.4e5; // kg/(m*s)
    double f_max = 1e4;            // cap on any pairwise force, N
    double dt = 0.05;              // s
    double speed_cap = 1.3;        // multiple of the preferred speed
    double cutoff = 2.0;           // interaction range, m
};

struct Pedestrian {
    int id = 0;
    Vec2 position;
    Vec2 velocity;
    double preferred_speed = 1.3;  // m/s
    int assigned_exit = -1;        // exit index; -1 until first indication
    int believed_cell = -1;
    long decision_changes = 0;
    bool active = true;
};

struct InflowSpec {
    int exit = -1;  // exit index
    double rate_per_min = 0.0;
    bool blocked = false;
};

struct Absorption {
    int ped = 0;
    int exit = 0;
    double time_s = 0.0;
};

struct WorldState {
    // Integer milliseconds: cycle boundaries and step times stay exact.
    long time_ms = 0;
    std::vector<Pedestrian> peds;
    std::vector<bool> exit_blocked;

    double time_s() const { return static_cast<double>(time_ms) / 1000.0; }
    long active_count() const;
};

// Spatial acceleration structures: a uniform hash of pedestrians rebuilt
// every step, plus static per-bin wall/gate lists so interior pedestrians
// skip boundary work entirely.
class ForceGrid {
public:
    ForceGrid(const ScenarioLayout& layout, const SfmParams& params,
              const std::vector<bool>& exit_blocked);

    void rebuild(const std::vector<Pedestrian>& peds);

    // Total social force on pedestrian p against current occupancy.
    Vec2 force_on(const Pedestrian& p, const std::vector<Pedestrian>& peds) const;

    bool near_boundary(Vec2 p) const;
    const std::vector<int>& gates_near(Vec2 p) const;

private:
    int bin_of(Vec2 p) const;

    const ScenarioLayout& layout_;
    SfmParams params_;
    double x0_ = 0.0, y0_ = 0.0, bin_ = 2.0;
    int nx_ = 1, ny_ = 1;
    std::vector<std::vector<int>> occupants_;
    std::vector<std::vector<int>> walls_per_bin_;  // includes blocked gates
    std::vector<std::vector<int>> gates_per_bin_;  // unblocked gate indices
    std::vector<Segment> walls_;                   // layout walls + blocked gates
    static const std::vector<int> kNoGates;
};

// Social force on one pedestrian: driving term toward the target plus
// pairwise and wall repulsion/contact terms. Finite for any input.
Vec2 social_force(const Pedestrian& p, const std::vector<const Pedestrian*>& neighbors,
                  const std::vector<Segment>& walls, Vec2 target, const SfmParams& params);

// One explicit-Euler step: forces, integration, speed cap, absorption at
// unblocked gates, containment. Returns the pedestrians absorbed.
std::vector<Absorption> step(WorldState& world, const ScenarioLayout& layout, ForceGrid& grid,
                             const SfmParams& params);

// Poisson arrivals at the entry points of the given inflow gates; returns
// indices of the spawned pedestrians. Throws ScenarioError if an inflow
// references an exit without an entry point.
std::vector<size_t> inject_inflows(WorldState& world, const ScenarioLayout& layout,
                                   const std::vector<InflowSpec>& flows, double dt, Rng& flows_rng);

}  // namespace cellevac
