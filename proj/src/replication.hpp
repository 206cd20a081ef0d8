#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace cellevac {

enum class ControlOutput { kEvacTime, kFitness };

struct ReplicationPolicy {
    int min_reps = 10;
    int max_reps = 50;
    double confidence = 0.95;
    double error_percent = 0.5;  // of the running mean
    ControlOutput control_output = ControlOutput::kEvacTime;

    void validate() const;  // throws std::invalid_argument
};

// Stop once n >= max_reps, or once n >= min_reps and the t confidence
// interval's half-width is within error_percent of |mean|. Means below 1 in
// magnitude switch the criterion to an absolute half-width.
bool should_stop(const std::vector<double>& samples, const ReplicationPolicy& policy);

struct ReplicationSummary {
    std::vector<double> control_samples;  // one per replication, in rep order
    double mean = 0.0;
    double variance = 0.0;  // sample variance of the control output
    int n = 0;
    bool aborted_early = false;  // stopped by the caller's abort hook
};

// One replication: maps (replication seed, rep index) to the control-output
// sample. Must be safe to call from worker threads.
using RepFn = std::function<double(uint64_t seed, int rep)>;
// Optional abort hook, checked per completed replication in rep order.
using AbortFn = std::function<bool(double sample, int rep)>;

// Runs replications with seeds derived from (seed, rep index) until the
// stopping rule fires. Replications execute in waves of `workers`; the stop
// rule is evaluated at wave barriers (first at exactly min_reps) so the
// achieved n is independent of scheduling.
ReplicationSummary run_replicated(const ReplicationPolicy& policy, const RepFn& fn, uint64_t seed,
                                  int workers = 1, const AbortFn& abort = nullptr);

// Seed for one replication.
uint64_t replication_seed(uint64_t base_seed, int rep);

}  // namespace cellevac
