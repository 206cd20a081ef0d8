#include "replication.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

#include "rng.hpp"
#include "stats.hpp"

namespace cellevac {

void ReplicationPolicy::validate() const {
    if (min_reps < 1 || min_reps > max_reps) {
        throw std::invalid_argument("replication: need 1 <= min_reps <= max_reps");
    }
    if (confidence <= 0.0 || confidence >= 1.0) {
        throw std::invalid_argument("replication: confidence must be in (0,1)");
    }
    if (error_percent <= 0.0) {
        throw std::invalid_argument("replication: error_percent must be > 0");
    }
}

bool should_stop(const std::vector<double>& samples, const ReplicationPolicy& policy) {
    const int n = static_cast<int>(samples.size());
    if (n >= policy.max_reps) return true;
    if (n < policy.min_reps) return false;
    const double half_width = stats::t_ci_half_width(samples, policy.confidence);
    const double mean = stats::mean(samples);
    const double tol = policy.error_percent / 100.0;
    // Relative criterion blows up near zero means; fall back to absolute.
    const double limit = std::abs(mean) < 1.0 ? tol : tol * std::abs(mean);
    return half_width <= limit;
}

uint64_t replication_seed(uint64_t base_seed, int rep) {
    return derive_seed(base_seed, "rep", static_cast<uint64_t>(rep));
}

ReplicationSummary run_replicated(const ReplicationPolicy& policy, const RepFn& fn, uint64_t seed,
                                  int workers, const AbortFn& abort) {
    policy.validate();
    workers = std::max(1, workers);

    ReplicationSummary summary;
    auto& samples = summary.control_samples;

    // Waves of `workers` replications; results land in rep order. The first
    // barrier sits at exactly min_reps.
    while (true) {
        const int n = static_cast<int>(samples.size());
        int wave = n < policy.min_reps ? std::min(workers, policy.min_reps - n) : workers;
        wave = std::min(wave, policy.max_reps - n);
        if (wave <= 0) break;

        std::vector<double> results(static_cast<size_t>(wave));
        if (workers == 1 || wave == 1) {
            for (int k = 0; k < wave; ++k) {
                results[static_cast<size_t>(k)] = fn(replication_seed(seed, n + k), n + k);
            }
        } else {
            std::vector<std::exception_ptr> errors(static_cast<size_t>(wave));
            std::vector<std::thread> pool;
            pool.reserve(static_cast<size_t>(wave));
            for (int k = 0; k < wave; ++k) {
                pool.emplace_back([&, k] {
                    try {
                        results[static_cast<size_t>(k)] = fn(replication_seed(seed, n + k), n + k);
                    } catch (...) {
                        errors[static_cast<size_t>(k)] = std::current_exception();
                    }
                });
            }
            for (auto& t : pool) t.join();
            for (const auto& e : errors) {
                if (e) std::rethrow_exception(e);
            }
        }

        for (int k = 0; k < wave; ++k) {
            samples.push_back(results[static_cast<size_t>(k)]);
            if (abort && abort(results[static_cast<size_t>(k)], n + k)) {
                summary.aborted_early = true;
                break;
            }
        }
        if (summary.aborted_early) break;
        if (should_stop(samples, policy)) break;
    }

    summary.n = static_cast<int>(samples.size());
    summary.mean = stats::mean(samples);
    summary.variance = stats::sample_variance(samples);
    return summary;
}

}  // namespace cellevac
