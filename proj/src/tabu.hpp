#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "controller.hpp"

namespace cellevac {

// Discretized box over the five beta coefficients.
struct SearchSpace {
    struct Axis {
        double lower = 0.0;
        double upper = 0.0;
        int steps = 60;  // grid intervals; steps+1 points per axis

        double value(int index) const;
        int point_count() const { return steps + 1; }
    };
    std::array<Axis, 5> axes;  // order: beta_d, beta_g, beta_e, beta_w, beta_c

    static SearchSpace defaults();
    BetaConfig beta_at(const std::array<int, 5>& point) const;
    void validate() const;  // throws std::invalid_argument
};

struct TabuParams {
    int tenure = 7;
    int max_iters = 200;
    int max_evals = 500;  // fresh (uncached) evaluations
};

struct Evaluation {
    double fitness = 0.0;  // +inf for non-viable candidates
    bool viable = false;
};

// Candidate evaluator; seed is derived from the grid point so revisits are
// exactly reproducible (and cacheable).
using EvalFn = std::function<Evaluation(const BetaConfig& beta, uint64_t seed)>;

struct TraceEntry {
    int iteration = 0;
    int eval_index = 0;
    BetaConfig beta;
    double fitness = 0.0;
    bool viable = false;
    double best_so_far = 0.0;  // +inf until a viable candidate appears
};

struct OptimizeResult {
    bool found = false;  // at least one viable candidate
    BetaConfig best;
    double best_fitness = 0.0;
    std::array<int, 5> best_point{};
    std::vector<TraceEntry> trace;
    int fresh_evals = 0;
    int iterations = 0;
};

// Grid moves from a point: +/-1 step per coordinate, clipped to the box.
std::vector<std::array<int, 5>> neighborhood(const std::array<int, 5>& point,
                                             const SearchSpace& space);

// Classic best-admissible-neighbor Tabu search with aspiration (a tabu
// candidate is admitted when it beats the incumbent best) and tenure-halving
// diversification when every neighbor is tabu and none aspirational.
OptimizeResult optimize(const EvalFn& eval, const SearchSpace& space, const TabuParams& params,
                        uint64_t seed);

}  // namespace cellevac
