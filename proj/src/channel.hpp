#pragma once

#include "rng.hpp"
#include "scenario.hpp"

namespace cellevac {

enum class ChannelModel {
    kCalibrated,  // RSSI = -60*log10(d) + X_g (the -60 dB/decade slope)
    kLogNormal,   // RSSI = tx - PL0 - 10*eta*log10(d/d0) + X_g
};

struct ChannelParams {
    double frequency_mhz = 2450.0;
    double tx_power_dbm = 40.0;  // 10 W
    double path_loss_exponent = 5.0;
    double reference_distance_m = 1.0;
    double sigma_g_db = 0.0;  // shadowing std-dev
    ChannelModel model = ChannelModel::kCalibrated;
    bool none_mode = false;  // pedestrians carry no guidance device
};

// Free-space path loss in dB (Friis): d in meters, f in MHz.
// Throws std::domain_error for non-positive inputs.
double free_space_pl(double d_m, double f_mhz);

// One received-power sample in dBm at distance d, shadowing included.
// sigma_g = 0 gives the deterministic mean path; no RNG draw is consumed.
double rssi_sample(double d_m, const ChannelParams& params, Rng& rng);

// Two-step cell resolution: if any beacon is closer than the reference
// distance the location is that cell (nearest on multiple hits); otherwise
// the cell with the strongest sampled RSSI, ties to the lowest cell id.
int resolve_cell(Vec2 p, const ScenarioLayout& layout, const ChannelParams& params, Rng& rng);

}  // namespace cellevac
