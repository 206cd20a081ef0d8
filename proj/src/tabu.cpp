#include "tabu.hpp"

#include <limits>
#include <map>
#include <stdexcept>

#include "rng.hpp"

namespace cellevac {

double SearchSpace::Axis::value(int index) const {
    return lower + (upper - lower) * static_cast<double>(index) / static_cast<double>(steps);
}

SearchSpace SearchSpace::defaults() {
    SearchSpace s;
    s.axes[0] = {-30.0, 0.0, 60};   // beta_d
    s.axes[1] = {-10.0, 10.0, 60};  // beta_g
    s.axes[2] = {-5.0, 5.0, 60};    // beta_e
    s.axes[3] = {0.0, 5.0, 60};     // beta_w
    s.axes[4] = {0.0, 10.0, 60};    // beta_c
    return s;
}

BetaConfig SearchSpace::beta_at(const std::array<int, 5>& point) const {
    return {axes[0].value(point[0]), axes[1].value(point[1]), axes[2].value(point[2]),
            axes[3].value(point[3]), axes[4].value(point[4])};
}

void SearchSpace::validate() const {
    for (const Axis& a : axes) {
        if (!(a.lower < a.upper)) throw std::invalid_argument("search space: lower >= upper");
        if (a.steps <= 0) throw std::invalid_argument("search space: steps must be > 0");
    }
}

std::vector<std::array<int, 5>> neighborhood(const std::array<int, 5>& point,
                                             const SearchSpace& space) {
    std::vector<std::array<int, 5>> nbrs;
    nbrs.reserve(10);
    for (int axis = 0; axis < 5; ++axis) {
        for (const int dir : {-1, +1}) {
            const int idx = point[static_cast<size_t>(axis)] + dir;
            if (idx < 0 || idx > space.axes[static_cast<size_t>(axis)].steps) continue;
            std::array<int, 5> n = point;
            n[static_cast<size_t>(axis)] = idx;
            nbrs.push_back(n);
        }
    }
    return nbrs;
}

namespace {

uint64_t point_hash(const std::array<int, 5>& p) {
    uint64_t h = 0x243f6a8885a308d3ULL;
    for (const int i : p) h = splitmix64(h * 31 + static_cast<uint64_t>(i) + 1);
    return h;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

OptimizeResult optimize(const EvalFn& eval, const SearchSpace& space, const TabuParams& params,
                        uint64_t seed) {
    space.validate();
    if (params.max_evals <= 0 || params.max_iters <= 0) {
        throw std::invalid_argument("tabu: budget must be > 0");
    }

    OptimizeResult result;
    result.best_fitness = kInf;

    std::map<std::array<int, 5>, Evaluation> cache;
    std::map<std::array<int, 5>, int> visited_at;  // tabu bookkeeping
    int tenure = params.tenure;
    int iteration = 0;
    bool budget_exhausted = false;

    // Evaluates through the cache; fresh evaluations consume budget and
    // append to the trace.
    auto evaluate = [&](const std::array<int, 5>& point) -> const Evaluation* {
        if (const auto it = cache.find(point); it != cache.end()) return &it->second;
        if (result.fresh_evals >= params.max_evals) {
            budget_exhausted = true;
            return nullptr;
        }
        const BetaConfig beta = space.beta_at(point);
        const Evaluation e = eval(beta, derive_seed(seed, "eval", point_hash(point)));
        const auto [it, inserted] = cache.emplace(point, e);
        ++result.fresh_evals;
        if (e.viable && e.fitness < result.best_fitness) {
            result.best_fitness = e.fitness;
            result.best = beta;
            result.best_point = point;
            result.found = true;
        }
        result.trace.push_back(
            {iteration, result.fresh_evals, beta, e.fitness, e.viable, result.best_fitness});
        return &it->second;
    };

    // Start at the grid center.
    std::array<int, 5> current{};
    for (size_t a = 0; a < 5; ++a) current[a] = space.axes[a].steps / 2;
    evaluate(current);
    visited_at[current] = 0;

    while (!budget_exhausted && iteration < params.max_iters) {
        ++iteration;
        const auto nbrs = neighborhood(current, space);

        const std::array<int, 5>* chosen = nullptr;
        double chosen_fitness = kInf;
        while (!chosen && !budget_exhausted) {
            for (const auto& n : nbrs) {
                const Evaluation* e = evaluate(n);
                if (!e) break;  // budget exhausted mid-neighborhood
                const auto seen = visited_at.find(n);
                const bool tabu = seen != visited_at.end() && iteration - seen->second <= tenure;
                // Aspiration: a tabu point that beats the best is admitted.
                if (tabu && !(e->viable && e->fitness < result.best_fitness)) continue;
                if (!chosen || e->fitness < chosen_fitness) {
                    chosen = &n;
                    chosen_fitness = e->fitness;
                }
            }
            if (!chosen && !budget_exhausted) {
                if (tenure == 0) break;  // no neighbors at all (degenerate box)
                // Diversification: everything tabu and nothing aspirational.
                tenure /= 2;
            }
        }
        if (!chosen || budget_exhausted) break;
        current = *chosen;  // classic TS: move even when non-improving
        visited_at[current] = iteration;
    }

    result.iterations = iteration;
    return result;
}

}  // namespace cellevac
