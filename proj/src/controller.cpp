#include "controller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cellevac {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

bool BetaConfig::finite() const {
    return std::isfinite(beta_d) && std::isfinite(beta_g) && std::isfinite(beta_e) &&
           std::isfinite(beta_w) && std::isfinite(beta_c);
}

BetaConfig beta_profile(const std::string& name) {
    if (name == "optimal_0db") return {-17.723, -2.181, -1.671, 1.064, 2.594};
    if (name == "optimal_5db") return {-16.040, -3.224, -2.267, 0.0, 6.816};
    if (name == "optimal_10db") return {-17.696, -2.0, -2.0, 1.685, 3.0};
    if (name == "optimal_20db") return {-28.479, 10.0, -3.083, 0.041, 4.025};
    if (name == "standard_no_cellevac") return {-28.0, 0.6, -0.5, 0.6, 0.0};
    throw std::invalid_argument("unknown beta profile: " + name);
}

std::vector<std::string> beta_profile_names() {
    return {"optimal_0db", "optimal_5db", "optimal_10db", "optimal_20db", "standard_no_cellevac"};
}

std::vector<std::vector<long>> group_sizes(const ScenarioLayout& layout,
                                           const std::vector<long>& peds_per_cell) {
    const int nc = layout.cell_count();
    const int ne = layout.exit_count();
    std::vector<std::vector<long>> group(nc, std::vector<long>(ne, 0));

    std::vector<int> order(nc);
    for (int j = 0; j < ne; ++j) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return layout.distance_matrix[a][j] < layout.distance_matrix[b][j];
        });
        // Prefix over strictly closer cells; distance ties share a prefix.
        long prefix = 0;
        int i = 0;
        while (i < nc) {
            int k = i;
            long tie_count = 0;
            while (k < nc && layout.distance_matrix[order[k]][j] ==
                                 layout.distance_matrix[order[i]][j]) {
                tie_count += peds_per_cell[order[k]];
                ++k;
            }
            for (int t = i; t < k; ++t) {
                const int c = order[t];
                group[c][j] = prefix + peds_per_cell[c];
            }
            prefix += tie_count;
            i = k;
        }
    }
    return group;
}

double group_ratio(long group_cj, long group_min_c) {
    if (group_cj == 0) return 0.0;
    return static_cast<double>(group_cj - group_min_c) / static_cast<double>(group_cj);
}

double excon(double density, double critical_density) { return density / critical_density; }

double beta_c_t(double beta_c, long num_peds_now, long num_peds_initial) {
    const double ratio =
        std::clamp(static_cast<double>(num_peds_now) / static_cast<double>(num_peds_initial),
                   0.0, 1.0);
    return beta_c * (1.0 - ratio);
}

std::vector<std::vector<double>> utility(const ScenarioLayout& layout,
                                         const ControlInputs& inputs, const BetaConfig& beta,
                                         const std::vector<int>* incumbent_exits) {
    const int nc = layout.cell_count();
    const int ne = layout.exit_count();
    const auto group = group_sizes(layout, inputs.peds_per_cell);
    const double bc = beta_c_t(beta.beta_c, inputs.num_peds_now, inputs.num_peds_initial);

    std::vector<std::vector<double>> v(nc, std::vector<double>(ne, kNaN));
    for (int c = 0; c < nc; ++c) {
        long group_min = std::numeric_limits<long>::max();
        for (int j = 0; j < ne; ++j) {
            if (!inputs.exit_blocked[j]) group_min = std::min(group_min, group[c][j]);
        }
        for (int j = 0; j < ne; ++j) {
            if (inputs.exit_blocked[j]) continue;
            const double dist_n = normalized_distance(layout, c, j);
            const double width_n = layout.exits[j].width_m / layout.max_width;
            const double grp = group_ratio(group[c][j], group_min);
            const double exc = excon(inputs.exit_density[j], layout.exits[j].critical_density);
            const double nochanging =
                incumbent_exits && (*incumbent_exits)[static_cast<size_t>(c)] == j ? 1.0 : 0.0;
            const double u = beta.beta_d * dist_n + beta.beta_w * width_n + beta.beta_g * grp +
                             beta.beta_e * exc + bc * nochanging;
            if (!std::isfinite(u)) {
                throw ControllerFault("non-finite utility for cell " + std::to_string(c) +
                                      ", exit index " + std::to_string(j));
            }
            v[c][j] = u;
        }
    }
    return v;
}

std::vector<double> allocation_probabilities(const std::vector<double>& v_row) {
    double vmax = -std::numeric_limits<double>::infinity();
    for (const double v : v_row) {
        if (std::isfinite(v)) vmax = std::max(vmax, v);
    }
    std::vector<double> p(v_row.size(), 0.0);
    if (!std::isfinite(vmax)) return p;
    double sum = 0.0;
    for (size_t j = 0; j < v_row.size(); ++j) {
        if (std::isfinite(v_row[j])) {
            p[j] = std::exp(v_row[j] - vmax);
            sum += p[j];
        }
    }
    for (double& x : p) x /= sum;
    return p;
}

int sample_exit(const std::vector<double>& v_row, Rng& rng) {
    const std::vector<double> p = allocation_probabilities(v_row);
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    if (total <= 0.0) throw ControllerFault("no available exit in choice set");
    const double u = rng.uniform() * total;
    double acc = 0.0;
    int last_valid = -1;
    for (size_t j = 0; j < p.size(); ++j) {
        if (p[j] <= 0.0) continue;
        acc += p[j];
        last_valid = static_cast<int>(j);
        if (u < acc) return last_valid;
    }
    return last_valid;  // guards against rounding at the top end
}

namespace {

int argmax_exit(const std::vector<double>& v_row) {
    int best = -1;
    double best_v = -std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < v_row.size(); ++j) {
        if (std::isfinite(v_row[j]) && v_row[j] > best_v) {
            best_v = v_row[j];
            best = static_cast<int>(j);
        }
    }
    if (best < 0) throw ControllerFault("no available exit in choice set");
    return best;
}

}  // namespace

CellAllocation control_cycle(const ScenarioLayout& layout, const ControlInputs& inputs,
                             const BetaConfig& beta, const CellAllocation& incumbent, Rng& rng,
                             bool argmax) {
    CellAllocation next;
    next.cycle = incumbent.cycle + 1;
    next.exit_for_cell.resize(layout.cell_count());

    std::vector<std::vector<double>> v;
    try {
        v = utility(layout, inputs, beta, &incumbent.exit_for_cell);
    } catch (const ControllerFault&) {
        // Abort the cycle, keep the previous allocation.
        next.exit_for_cell = incumbent.exit_for_cell;
        next.changed_cells = 0;
        return next;
    }
    // An empty choice set (every exit blocked) is a configuration error and
    // propagates from the sampler.
    for (int c = 0; c < layout.cell_count(); ++c) {
        const int j = argmax ? argmax_exit(v[c]) : sample_exit(v[c], rng);
        next.exit_for_cell[c] = j;
        if (j != incumbent.exit_for_cell[c]) ++next.changed_cells;
    }
    return next;
}

CellAllocation initial_allocation(const ScenarioLayout& layout,
                                  const std::vector<bool>& exit_blocked) {
    CellAllocation alloc;
    alloc.cycle = 0;
    alloc.exit_for_cell.resize(layout.cell_count());
    for (int c = 0; c < layout.cell_count(); ++c) {
        int best = -1;
        double best_d = std::numeric_limits<double>::max();
        for (int j = 0; j < layout.exit_count(); ++j) {
            if (exit_blocked[j]) continue;
            if (layout.distance_matrix[c][j] < best_d) {
                best_d = layout.distance_matrix[c][j];
                best = j;
            }
        }
        if (best < 0) throw ControllerFault("all exits blocked");
        alloc.exit_for_cell[c] = best;
    }
    return alloc;
}

}  // namespace cellevac
