#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "scenario.hpp"

namespace cellevac {

// Threshold-based exit safety: full marks below rho1, linear decay to zero
// at rho2, then an unbounded linear penalty scaled so rho3 maps to -slope.
struct SafetyModel {
    struct ExitThresholds {
        double rho1 = 0.0;
        double rho2 = 0.0;
        double rho3 = 0.0;
    };
    std::vector<ExitThresholds> per_exit;
    double penalty_slope = 20.0;

    static SafetyModel from_layout(const ScenarioLayout& layout);
};

double instantaneous_safety(double density, const SafetyModel& model, int exit);

// Everything finalize_metrics needs, accumulated during a run.
struct RunLog {
    double deadline_s = 0.0;
    double sample_period_s = 5.0;
    // One density sample per exit per control cycle.
    std::vector<std::vector<double>> exit_density_samples;  // [cycle][exit]
    std::vector<double> beta_c_series;                      // inertia weight per cycle
    std::vector<long> evacuated_per_exit;
    long initial_peds = 0;
    long injected_peds = 0;
    long evacuated_peds = 0;
    long active_at_end = 0;
    long total_decision_changes = 0;
    double last_evac_time_s = 0.0;
    bool deadline_hit = false;
    // Positioning diagnostics.
    long resolutions = 0;
    long cell_errors = 0;
};

struct EvacMetrics {
    double total_evac_time_s = 0.0;
    double avg_safety = 0.0;
    double safety_variance = 0.0;
    double mean_decision_changes = 0.0;
    bool viable = false;
    std::vector<double> per_exit_safety;
    std::vector<long> per_exit_throughput;
};

// Pure post-processing of a complete run log. Throws std::invalid_argument
// on an empty log.
EvacMetrics finalize_metrics(const RunLog& log, const SafetyModel& model);

}  // namespace cellevac
