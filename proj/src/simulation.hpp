#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "channel.hpp"
#include "controller.hpp"
#include "metrics.hpp"
#include "scenario.hpp"
#include "sfm.hpp"

namespace cellevac {

enum class ScenarioKind { kNEF, kEF };

struct RunConfig {
    ChannelParams channel;
    ScenarioKind kind = ScenarioKind::kNEF;
    double deadline_s = 1500.0;       // 25 min
    double cycle_period_s = 5.0;      // control / positioning cadence
    double scale = 1.0;               // population and inflow-rate scale
    double inflow_rate_per_min = 120.0;  // per inflow gate, before scaling
    double inflow_duration_s = 300.0;    // upper floors drain window
    bool argmax_allocation = false;
    bool collect_trajectory = false;
    bool check_invariants = false;
    SfmParams sfm;
};

struct TrajectoryRow {
    double time_s = 0.0;
    int ped = 0;
    double x = 0.0;
    double y = 0.0;
    int believed_cell = -1;
    int assigned_exit_id = 0;  // document exit id
};

struct RunResult {
    EvacMetrics metrics;
    RunLog log;
    std::vector<TrajectoryRow> trajectory;
    // EF draw, as document exit ids (-1 when not applicable).
    int ef_blocked_exit = -1;
    std::array<int, 2> ef_inflow_exits{-1, -1};
    long invariant_violations = 0;

    double cell_error_rate() const {
        return log.resolutions > 0
                   ? static_cast<double>(log.cell_errors) / static_cast<double>(log.resolutions)
                   : 0.0;
    }
};

// One full evacuation: control cycles every cycle_period_s, SFM substeps in
// between, inflow injection and gate blocking for EF. Deterministic for a
// fixed (layout, beta, config, seed).
RunResult run_evacuation(const ScenarioLayout& layout, const BetaConfig& beta,
                         const RunConfig& config, uint64_t seed);

// evacTime (minutes) - lambda * avg_safety for viable runs, +inf otherwise.
double fitness(const EvacMetrics& m, double safety_weight = 1.0);

}  // namespace cellevac
