#include "channel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cellevac {

double free_space_pl(double d_m, double f_mhz) {
    if (d_m <= 0.0) throw std::domain_error("free_space_pl: distance must be > 0");
    if (f_mhz <= 0.0) throw std::domain_error("free_space_pl: frequency must be > 0");
    return 20.0 * std::log10(d_m) + 20.0 * std::log10(f_mhz) - 27.55;
}

double rssi_sample(double d_m, const ChannelParams& params, Rng& rng) {
    if (d_m <= 0.0) throw std::domain_error("rssi_sample: distance must be > 0");
    const double shadow = params.sigma_g_db > 0.0 ? rng.normal(0.0, params.sigma_g_db) : 0.0;
    if (params.model == ChannelModel::kCalibrated) {
        return -60.0 * std::log10(d_m) + shadow;
    }
    const double pl0 = free_space_pl(params.reference_distance_m, params.frequency_mhz);
    return params.tx_power_dbm - pl0 -
           10.0 * params.path_loss_exponent * std::log10(d_m / params.reference_distance_m) +
           shadow;
}

int resolve_cell(Vec2 p, const ScenarioLayout& layout, const ChannelParams& params, Rng& rng) {
    const auto& cells = layout.grid.cells;

    // Step 1/2 short-circuit: any beacon inside the reference distance fixes
    // the location deterministically; nearest wins if several qualify.
    int near_id = -1;
    double near_d = params.reference_distance_m;
    for (const HexCell& c : cells) {
        const double d = distance(p, c.center);
        if (d < near_d) {
            near_d = d;
            near_id = c.id;
        }
    }
    if (near_id >= 0) return near_id;

    int best = -1;
    double best_rssi = -std::numeric_limits<double>::infinity();
    for (const HexCell& c : cells) {
        const double r = rssi_sample(distance(p, c.center), params, rng);
        if (r > best_rssi) {  // strict: lowest cell id wins ties
            best_rssi = r;
            best = c.id;
        }
    }
    return best;
}

}  // namespace cellevac
