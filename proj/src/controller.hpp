#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "rng.hpp"
#include "scenario.hpp"

namespace cellevac {

// The five logit coefficients of the control model.
struct BetaConfig {
    double beta_d = 0.0;  // distance
    double beta_g = 0.0;  // group (path congestion) ratio
    double beta_e = 0.0;  // exit congestion
    double beta_w = 0.0;  // gate width
    double beta_c = 0.0;  // decision inertia, time-modulated

    bool finite() const;
};

// Named presets: the tuned controller configurations for shadowing levels
// 0/5/10/20 dB plus the per-pedestrian standard-behavior model.
// Throws std::invalid_argument for unknown names.
BetaConfig beta_profile(const std::string& name);
std::vector<std::string> beta_profile_names();

// Exit chosen for every cell, refreshed each control cycle.
struct CellAllocation {
    std::vector<int> exit_for_cell;  // exit index per cell id
    long cycle = 0;
    int changed_cells = 0;  // cells whose exit differs from the incumbent
};

class ControllerFault : public std::runtime_error {
public:
    explicit ControllerFault(const std::string& msg) : std::runtime_error(msg) {}
};

// Per-cycle observable state the controller works from (ground truth).
struct ControlInputs {
    std::vector<long> peds_per_cell;      // active pedestrians per cell id
    std::vector<double> exit_density;     // peds/m^2 near each gate
    std::vector<bool> exit_blocked;       // excluded from the choice set
    long num_peds_now = 0;                // active guided pedestrians
    long num_peds_initial = 1;            // population at t = 0
};

// GROUP_cj: pedestrians in cells strictly closer to exit j than cell c,
// plus those in c itself.
std::vector<std::vector<long>> group_sizes(const ScenarioLayout& layout,
                                           const std::vector<long>& peds_per_cell);

// (GROUP_cj - GROUP_min_c) / GROUP_cj; defined as 0 for an empty path.
double group_ratio(long group_cj, long group_min_c);

// Exit-gate congestion relative to its capacity point.
double excon(double density, double critical_density);

// Time-modulated inertia weight; the occupancy ratio is clamped to [0,1]
// so the weight stays non-negative under external inflows.
double beta_c_t(double beta_c, long num_peds_now, long num_peds_initial);

// Systematic utilities V[cell][exit]; blocked exits hold NaN and are
// excluded from sampling. Throws ControllerFault on non-finite attributes.
// incumbent_exits carries the cells' current exits for the inertia term;
// pass nullptr to omit it (per-pedestrian mode adds its own inertia).
std::vector<std::vector<double>> utility(const ScenarioLayout& layout,
                                         const ControlInputs& inputs, const BetaConfig& beta,
                                         const std::vector<int>* incumbent_exits);

// Multinomial-logit probabilities for one utility row (max-subtracted
// softmax over finite entries; NaN entries get probability 0).
std::vector<double> allocation_probabilities(const std::vector<double>& v_row);

// Samples one exit from a utility row. Throws ControllerFault if no entry
// is finite.
int sample_exit(const std::vector<double>& v_row, Rng& rng);

// Full control cycle: attributes -> utilities -> per-cell sampling.
// On a controller fault the incumbent allocation is kept for this cycle.
// With argmax=true the most probable exit is taken instead of sampling.
CellAllocation control_cycle(const ScenarioLayout& layout, const ControlInputs& inputs,
                             const BetaConfig& beta, const CellAllocation& incumbent, Rng& rng,
                             bool argmax = false);

// Deterministic bootstrap incumbent: nearest unblocked exit per cell.
CellAllocation initial_allocation(const ScenarioLayout& layout,
                                  const std::vector<bool>& exit_blocked);

}  // namespace cellevac
