#include "sfm.hpp"

#include <algorithm>
#include <cmath>

namespace cellevac {

const std::vector<int> ForceGrid::kNoGates{};

long WorldState::active_count() const {
    long n = 0;
    for (const Pedestrian& p : peds) {
        if (p.active) ++n;
    }
    return n;
}

namespace {

Vec2 cap_norm(Vec2 f, double f_max) {
    const double n = f.norm();
    if (n > f_max) return f * (f_max / n);
    return f;
}

// Pairwise repulsion + body contact. n_hat points from the other agent
// toward p (the push direction).
Vec2 pair_force(const Pedestrian& p, const Pedestrian& q, const SfmParams& prm) {
    const Vec2 diff = p.position - q.position;
    const double d = diff.norm();
    const double r_sum = 2.0 * prm.body_radius;
    // Coincident agents get a fixed, capped push; direction is arbitrary
    // but deterministic.
    const Vec2 n_hat = d > 1e-12 ? diff * (1.0 / d) : Vec2{1.0, 0.0};

    Vec2 f = n_hat * (prm.repulsion_a * std::exp((r_sum - d) / prm.repulsion_b));
    if (d < r_sum) {
        const double overlap = r_sum - d;
        f += n_hat * (prm.contact_k * overlap);
        const Vec2 t_hat{-n_hat.y, n_hat.x};
        const double dv_t = (q.velocity - p.velocity).dot(t_hat);
        f += t_hat * (prm.friction_kappa * overlap * dv_t);
    }
    return cap_norm(f, prm.f_max);
}

Vec2 wall_force(const Pedestrian& p, const Segment& wall, const SfmParams& prm) {
    const Vec2 cp = closest_point_on_segment(p.position, wall);
    const Vec2 diff = p.position - cp;
    const double d = diff.norm();
    const Vec2 n_hat = d > 1e-12 ? diff * (1.0 / d) : Vec2{1.0, 0.0};

    Vec2 f = n_hat * (prm.repulsion_a * std::exp((prm.body_radius - d) / prm.repulsion_b));
    if (d < prm.body_radius) {
        const double overlap = prm.body_radius - d;
        f += n_hat * (prm.contact_k * overlap);
        const Vec2 t_hat{-n_hat.y, n_hat.x};
        f += t_hat * (-prm.friction_kappa * overlap * p.velocity.dot(t_hat));
    }
    return cap_norm(f, prm.f_max);
}

Vec2 driving_force(const Pedestrian& p, Vec2 target, const SfmParams& prm) {
    const Vec2 e_hat = (target - p.position).normalized();
    return (e_hat * p.preferred_speed - p.velocity) * (prm.mass / prm.tau);
}

}  // namespace

Vec2 social_force(const Pedestrian& p, const std::vector<const Pedestrian*>& neighbors,
                  const std::vector<Segment>& walls, Vec2 target, const SfmParams& params) {
    Vec2 f = driving_force(p, target, params);
    for (const Pedestrian* q : neighbors) {
        if (q->id == p.id || !q->active) continue;
        if (distance(p.position, q->position) > params.cutoff) continue;
        f += pair_force(p, *q, params);
    }
    for (const Segment& w : walls) {
        if (distance_to_segment(p.position, w) > params.cutoff) continue;
        f += wall_force(p, w, params);
    }
    return f;
}

ForceGrid::ForceGrid(const ScenarioLayout& layout, const SfmParams& params,
                     const std::vector<bool>& exit_blocked)
    : layout_(layout), params_(params) {
    double x1 = -1e18, y1 = -1e18;
    x0_ = 1e18;
    y0_ = 1e18;
    for (const Vec2& v : layout.walkable) {
        x0_ = std::min(x0_, v.x);
        y0_ = std::min(y0_, v.y);
        x1 = std::max(x1, v.x);
        y1 = std::max(y1, v.y);
    }
    bin_ = params.cutoff;
    nx_ = std::max(1, static_cast<int>(std::ceil((x1 - x0_) / bin_)));
    ny_ = std::max(1, static_cast<int>(std::ceil((y1 - y0_) / bin_)));
    occupants_.resize(static_cast<size_t>(nx_) * ny_);

    walls_ = layout.walls;
    for (size_t j = 0; j < exit_blocked.size(); ++j) {
        if (exit_blocked[j]) walls_.push_back(layout.exits[j].gate);
    }

    walls_per_bin_.resize(occupants_.size());
    gates_per_bin_.resize(occupants_.size());
    const double reach = params.cutoff;  // > max displacement per step
    for (int by = 0; by < ny_; ++by) {
        for (int bx = 0; bx < nx_; ++bx) {
            const Vec2 lo{x0_ + bx * bin_, y0_ + by * bin_};
            const Vec2 hi{lo.x + bin_, lo.y + bin_};
            const Vec2 mid{(lo.x + hi.x) / 2.0, (lo.y + hi.y) / 2.0};
            const double half_diag = std::hypot(bin_, bin_) / 2.0;
            const size_t b = static_cast<size_t>(by) * nx_ + bx;
            for (size_t w = 0; w < walls_.size(); ++w) {
                if (distance_to_segment(mid, walls_[w]) <= reach + half_diag) {
                    walls_per_bin_[b].push_back(static_cast<int>(w));
                }
            }
            for (int j = 0; j < layout.exit_count(); ++j) {
                if (exit_blocked[static_cast<size_t>(j)]) continue;
                if (distance_to_segment(mid, layout.exits[j].gate) <= reach + half_diag) {
                    gates_per_bin_[b].push_back(j);
                }
            }
        }
    }
}

int ForceGrid::bin_of(Vec2 p) const {
    const int bx = std::clamp(static_cast<int>((p.x - x0_) / bin_), 0, nx_ - 1);
    const int by = std::clamp(static_cast<int>((p.y - y0_) / bin_), 0, ny_ - 1);
    return by * nx_ + bx;
}

void ForceGrid::rebuild(const std::vector<Pedestrian>& peds) {
    for (auto& bin : occupants_) bin.clear();
    for (const Pedestrian& p : peds) {
        if (p.active) occupants_[static_cast<size_t>(bin_of(p.position))].push_back(p.id);
    }
}

Vec2 ForceGrid::force_on(const Pedestrian& p, const std::vector<Pedestrian>& peds) const {
    Vec2 f{};
    const int bx = std::clamp(static_cast<int>((p.position.x - x0_) / bin_), 0, nx_ - 1);
    const int by = std::clamp(static_cast<int>((p.position.y - y0_) / bin_), 0, ny_ - 1);
    const double cutoff_sq = params_.cutoff * params_.cutoff;
    for (int dy = -1; dy <= 1; ++dy) {
        const int yy = by + dy;
        if (yy < 0 || yy >= ny_) continue;
        for (int dx = -1; dx <= 1; ++dx) {
            const int xx = bx + dx;
            if (xx < 0 || xx >= nx_) continue;
            for (const int qid : occupants_[static_cast<size_t>(yy) * nx_ + xx]) {
                if (qid == p.id) continue;
                const Pedestrian& q = peds[static_cast<size_t>(qid)];
                if ((p.position - q.position).norm_sq() > cutoff_sq) continue;
                f += pair_force(p, q, params_);
            }
        }
    }
    for (const int w : walls_per_bin_[static_cast<size_t>(bin_of(p.position))]) {
        if (distance_to_segment(p.position, walls_[static_cast<size_t>(w)]) > params_.cutoff) {
            continue;
        }
        f += wall_force(p, walls_[static_cast<size_t>(w)], params_);
    }
    return f;
}

bool ForceGrid::near_boundary(Vec2 p) const {
    const size_t b = static_cast<size_t>(bin_of(p));
    return !walls_per_bin_[b].empty() || !gates_per_bin_[b].empty();
}

const std::vector<int>& ForceGrid::gates_near(Vec2 p) const {
    return gates_per_bin_[static_cast<size_t>(bin_of(p))];
}

std::vector<Absorption> step(WorldState& world, const ScenarioLayout& layout, ForceGrid& grid,
                             const SfmParams& params) {
    std::vector<Absorption> absorbed;
    grid.rebuild(world.peds);

    // Forces from the pre-move snapshot, applied in id order.
    std::vector<Vec2> force(world.peds.size());
    for (const Pedestrian& p : world.peds) {
        if (!p.active) continue;
        Vec2 f = grid.force_on(p, world.peds);
        if (p.assigned_exit >= 0) {
            f += driving_force(p, layout.exits[static_cast<size_t>(p.assigned_exit)].gate.midpoint(),
                               params);
        } else {
            // No indication yet: relax to a stop.
            f += p.velocity * (-params.mass / params.tau);
        }
        force[static_cast<size_t>(p.id)] = f;
    }

    world.time_ms += std::lround(params.dt * 1000.0);
    const double t_next = world.time_s();
    for (Pedestrian& p : world.peds) {
        if (!p.active) continue;
        p.velocity += force[static_cast<size_t>(p.id)] * (params.dt / params.mass);
        const double cap = params.speed_cap * p.preferred_speed;
        const double speed = p.velocity.norm();
        if (speed > cap) p.velocity = p.velocity * (cap / speed);

        const Vec2 old_pos = p.position;
        Vec2 new_pos = old_pos + p.velocity * params.dt;

        if (grid.near_boundary(old_pos)) {
            // Absorption at an unblocked gate crossed this step.
            bool out = false;
            for (const int j : grid.gates_near(old_pos)) {
                if (world.exit_blocked[static_cast<size_t>(j)]) continue;
                if (segments_intersect({old_pos, new_pos},
                                       layout.exits[static_cast<size_t>(j)].gate)) {
                    p.active = false;
                    absorbed.push_back({p.id, j, t_next});
                    out = true;
                    break;
                }
            }
            if (out) continue;
            // Containment backstop: wall forces normally keep pedestrians
            // inside; a stray update is pulled back to the boundary.
            if (!layout.contains(new_pos)) {
                const Vec2 cp = closest_point_on_polygon(new_pos, layout.walkable);
                Vec2 candidate = cp + (cp - new_pos).normalized() * 0.01;
                if (!layout.contains(candidate)) candidate = old_pos;
                new_pos = candidate;
                p.velocity = {0.0, 0.0};
            }
        }
        p.position = new_pos;
    }
    return absorbed;
}

std::vector<size_t> inject_inflows(WorldState& world, const ScenarioLayout& layout,
                                   const std::vector<InflowSpec>& flows, double dt,
                                   Rng& flows_rng) {
    std::vector<size_t> spawned;
    for (const InflowSpec& flow : flows) {
        if (flow.blocked || flow.rate_per_min <= 0.0) continue;
        const ExitGate& gate = layout.exits.at(static_cast<size_t>(flow.exit));
        if (!gate.entry_point) {
            throw ScenarioError("inflow at exit " + std::to_string(gate.id) +
                                ": no entry point defined");
        }
        const long n = flows_rng.poisson(flow.rate_per_min / 60.0 * dt);
        for (long k = 0; k < n; ++k) {
            Pedestrian p;
            p.id = static_cast<int>(world.peds.size());
            const double ang = flows_rng.uniform(0.0, 2.0 * M_PI);
            const double rad = flows_rng.uniform(0.0, 0.5);
            Vec2 pos = *gate.entry_point + Vec2{rad * std::cos(ang), rad * std::sin(ang)};
            if (!layout.contains(pos)) pos = *gate.entry_point;
            p.position = pos;
            p.preferred_speed =
                flows_rng.uniform(layout.population.speed_min, layout.population.speed_max);
            world.peds.push_back(p);
            spawned.push_back(world.peds.size() - 1);
        }
    }
    return spawned;
}

}  // namespace cellevac
