#include "simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cellevac {

namespace {

constexpr double kExitDiscRadius = 3.0;  // half-disc radius for gate densities

std::vector<double> exit_densities(const WorldState& world, const ScenarioLayout& layout) {
    const double area = M_PI * kExitDiscRadius * kExitDiscRadius / 2.0;
    std::vector<double> rho(layout.exits.size(), 0.0);
    for (const Pedestrian& p : world.peds) {
        if (!p.active) continue;
        for (size_t j = 0; j < layout.exits.size(); ++j) {
            if (distance(p.position, layout.exits[j].gate.midpoint()) <= kExitDiscRadius) {
                rho[j] += 1.0;
            }
        }
    }
    for (double& r : rho) r /= area;
    return rho;
}

}  // namespace

double fitness(const EvacMetrics& m, double safety_weight) {
    if (!m.viable) return std::numeric_limits<double>::infinity();
    return m.total_evac_time_s / 60.0 - safety_weight * m.avg_safety;
}

RunResult run_evacuation(const ScenarioLayout& layout, const BetaConfig& beta,
                         const RunConfig& config, uint64_t seed) {
    if (!beta.finite()) throw std::invalid_argument("run_evacuation: non-finite beta");
    if (config.deadline_s <= 0.0) throw std::invalid_argument("run_evacuation: deadline <= 0");

    RngStreams streams(seed);
    RunResult result;
    RunLog& log = result.log;
    log.deadline_s = config.deadline_s;
    log.sample_period_s = config.cycle_period_s;
    log.evacuated_per_exit.assign(layout.exits.size(), 0);

    WorldState world;
    world.exit_blocked.assign(layout.exits.size(), false);

    // EF: one blocked gate drawn over all exits, two inflow gates over the
    // exits that have entry points.
    std::vector<InflowSpec> flows;
    if (config.kind == ScenarioKind::kEF) {
        const int ne = layout.exit_count();
        const int blocked = static_cast<int>(streams.flows.uniform_int(ne));
        world.exit_blocked[static_cast<size_t>(blocked)] = true;
        result.ef_blocked_exit = layout.exits[static_cast<size_t>(blocked)].id;

        std::vector<int> entry_capable;
        for (int j = 0; j < ne; ++j) {
            if (j != blocked && layout.exits[static_cast<size_t>(j)].entry_point) {
                entry_capable.push_back(j);
            }
        }
        if (entry_capable.size() < 2) {
            throw ScenarioError("EF scenario needs >= 2 unblocked exits with entry points");
        }
        const size_t a = streams.flows.uniform_int(entry_capable.size());
        size_t b = streams.flows.uniform_int(entry_capable.size() - 1);
        if (b >= a) ++b;
        const double rate = config.inflow_rate_per_min * config.scale;
        flows.push_back({entry_capable[a], rate, false});
        flows.push_back({entry_capable[b], rate, false});
        result.ef_inflow_exits = {layout.exits[static_cast<size_t>(entry_capable[a])].id,
                                  layout.exits[static_cast<size_t>(entry_capable[b])].id};
    }

    // Initial crowd: uniform over the walkable area, clear of walls.
    const long n0 = std::lround(static_cast<double>(layout.population.count) * config.scale);
    double bx0 = 1e18, by0 = 1e18, bx1 = -1e18, by1 = -1e18;
    for (const Vec2& v : layout.walkable) {
        bx0 = std::min(bx0, v.x);
        by0 = std::min(by0, v.y);
        bx1 = std::max(bx1, v.x);
        by1 = std::max(by1, v.y);
    }
    for (long i = 0; i < n0; ++i) {
        Pedestrian p;
        p.id = static_cast<int>(i);
        bool placed = false;
        for (int tries = 0; tries < 10000 && !placed; ++tries) {
            const Vec2 pos{streams.motion.uniform(bx0, bx1), streams.motion.uniform(by0, by1)};
            if (!layout.contains(pos)) continue;
            if (distance(pos, closest_point_on_polygon(pos, layout.walkable)) <
                config.sfm.body_radius) {
                continue;
            }
            p.position = pos;
            placed = true;
        }
        if (!placed) throw ScenarioError("cannot place initial pedestrians in the walkable area");
        p.preferred_speed =
            streams.motion.uniform(layout.population.speed_min, layout.population.speed_max);
        world.peds.push_back(p);
    }
    log.initial_peds = n0;
    const long num_initial = std::max<long>(1, n0);

    ForceGrid grid(layout, config.sfm, world.exit_blocked);
    CellAllocation incumbent = initial_allocation(layout, world.exit_blocked);

    const int steps_per_cycle =
        std::max(1, static_cast<int>(std::lround(config.cycle_period_s / config.sfm.dt)));

    // Indication state cached for the current cycle; used for mid-cycle
    // spawns as well.
    std::vector<std::vector<double>> v_matrix;
    double current_bc = 0.0;

    auto gather_inputs = [&]() {
        ControlInputs in;
        in.peds_per_cell.assign(layout.grid.cells.size(), 0);
        for (const Pedestrian& p : world.peds) {
            if (!p.active) continue;
            ++in.peds_per_cell[static_cast<size_t>(locate_cell_exact(layout, p.position))];
        }
        in.exit_density = exit_densities(world, layout);
        in.exit_blocked = world.exit_blocked;
        in.num_peds_now = world.active_count();
        in.num_peds_initial = num_initial;
        return in;
    };

    auto give_indication = [&](Pedestrian& p, int exit_index, bool count_change) {
        if (count_change && p.assigned_exit >= 0 && p.assigned_exit != exit_index) {
            ++p.decision_changes;
            ++log.total_decision_changes;
        }
        p.assigned_exit = exit_index;
    };

    // Resolve one pedestrian's indication under the current allocation (or
    // its own logit row when unguided).
    auto assign_pedestrian = [&](Pedestrian& p, bool count_change) {
        if (config.channel.none_mode) {
            const int own = locate_cell_exact(layout, p.position);
            p.believed_cell = own;
            std::vector<double> row = v_matrix[static_cast<size_t>(own)];
            if (p.assigned_exit >= 0 && std::isfinite(row[static_cast<size_t>(p.assigned_exit)])) {
                row[static_cast<size_t>(p.assigned_exit)] += current_bc;
            }
            give_indication(p, sample_exit(row, streams.controller), count_change);
        } else {
            const int believed = resolve_cell(p.position, layout, config.channel, streams.channel);
            ++log.resolutions;
            if (believed != locate_cell_exact(layout, p.position)) ++log.cell_errors;
            p.believed_cell = believed;
            give_indication(p, incumbent.exit_for_cell[static_cast<size_t>(believed)],
                            count_change);
        }
    };

    bool done = false;
    const long inflow_end_ms =
        config.kind == ScenarioKind::kEF ? std::lround(config.inflow_duration_s * 1000.0) : 0;
    const long deadline_ms = std::lround(config.deadline_s * 1000.0);

    auto maybe_finish = [&]() {
        if (world.active_count() == 0 && world.time_ms >= inflow_end_ms) {
            done = true;
        } else if (world.time_ms >= deadline_ms) {
            done = true;
            log.deadline_hit = true;
        }
    };

    while (!done) {
        ControlInputs inputs = gather_inputs();
        current_bc = beta_c_t(beta.beta_c, inputs.num_peds_now, inputs.num_peds_initial);

        if (config.channel.none_mode) {
            v_matrix = utility(layout, inputs, beta, nullptr);
        } else {
            incumbent = control_cycle(layout, inputs, beta, incumbent, streams.controller,
                                      config.argmax_allocation);
        }
        for (Pedestrian& p : world.peds) {
            if (p.active) assign_pedestrian(p, true);
        }

        log.exit_density_samples.push_back(inputs.exit_density);
        log.beta_c_series.push_back(current_bc);

        if (config.collect_trajectory) {
            for (const Pedestrian& p : world.peds) {
                if (!p.active) continue;
                const int exit_id =
                    p.assigned_exit >= 0
                        ? layout.exits[static_cast<size_t>(p.assigned_exit)].id
                        : -1;
                result.trajectory.push_back(
                    {world.time_s(), p.id, p.position.x, p.position.y, p.believed_cell, exit_id});
            }
        }

        for (int s = 0; s < steps_per_cycle && !done; ++s) {
            if (config.kind == ScenarioKind::kEF && world.time_ms < inflow_end_ms) {
                const auto spawned =
                    inject_inflows(world, layout, flows, config.sfm.dt, streams.flows);
                for (const size_t idx : spawned) {
                    ++log.injected_peds;
                    assign_pedestrian(world.peds[idx], false);  // first indication
                }
            }
            const auto absorbed = step(world, layout, grid, config.sfm);
            for (const Absorption& a : absorbed) {
                ++log.evacuated_peds;
                ++log.evacuated_per_exit[static_cast<size_t>(a.exit)];
                log.last_evac_time_s = a.time_s;
            }

            if (config.check_invariants) {
                long active = 0;
                for (const Pedestrian& p : world.peds) {
                    if (!p.active) continue;
                    ++active;
                    if (!layout.contains(p.position)) ++result.invariant_violations;
                    if (p.velocity.norm() >
                        config.sfm.speed_cap * p.preferred_speed + 1e-9) {
                        ++result.invariant_violations;
                    }
                }
                if (log.initial_peds + log.injected_peds != log.evacuated_peds + active) {
                    ++result.invariant_violations;
                }
            }
            maybe_finish();
        }
    }

    log.active_at_end = world.active_count();
    result.metrics = finalize_metrics(log, SafetyModel::from_layout(layout));
    return result;
}

}  // namespace cellevac
