#include "metrics.hpp"

#include <algorithm>

#include "stats.hpp"

namespace cellevac {

SafetyModel SafetyModel::from_layout(const ScenarioLayout& layout) {
    SafetyModel model;
    model.penalty_slope = layout.safety_penalty_slope;
    for (const ExitGate& e : layout.exits) {
        model.per_exit.push_back({e.thresholds[0], e.thresholds[1], e.thresholds[2]});
    }
    return model;
}

double instantaneous_safety(double density, const SafetyModel& model, int exit) {
    const auto& t = model.per_exit.at(static_cast<size_t>(exit));
    if (density <= t.rho1) return 1.0;
    if (density <= t.rho2) return (t.rho2 - density) / (t.rho2 - t.rho1);
    return -model.penalty_slope * (density - t.rho2) / (t.rho3 - t.rho2);
}

EvacMetrics finalize_metrics(const RunLog& log, const SafetyModel& model) {
    if (log.exit_density_samples.empty()) {
        throw std::invalid_argument("finalize_metrics: empty run log");
    }
    const size_t ne = log.exit_density_samples.front().size();

    EvacMetrics m;
    m.viable = log.active_at_end == 0;
    m.total_evac_time_s = log.deadline_hit ? log.deadline_s : log.last_evac_time_s;

    m.per_exit_safety.assign(ne, 0.0);
    for (const auto& sample : log.exit_density_samples) {
        for (size_t j = 0; j < ne; ++j) {
            m.per_exit_safety[j] += instantaneous_safety(sample[j], model, static_cast<int>(j));
        }
    }
    const double n_samples = static_cast<double>(log.exit_density_samples.size());
    for (double& s : m.per_exit_safety) s /= n_samples;

    m.avg_safety = stats::mean(m.per_exit_safety);
    m.safety_variance = stats::population_variance(m.per_exit_safety);

    const long ever = log.initial_peds + log.injected_peds;
    m.mean_decision_changes =
        ever > 0 ? static_cast<double>(log.total_decision_changes) / static_cast<double>(ever)
                 : 0.0;
    m.per_exit_throughput = log.evacuated_per_exit;
    return m;
}

}  // namespace cellevac
