#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "rng.hpp"
#include "simulation.hpp"
#include "tabu.hpp"

using namespace cellevac;

namespace {

// Separable quadratic with its minimum at a grid point.
EvalFn quadratic_at(const SearchSpace& space, const std::array<int, 5>& target) {
    const BetaConfig t = space.beta_at(target);
    return [t](const BetaConfig& b, uint64_t) -> Evaluation {
        const double f = (b.beta_d - t.beta_d) * (b.beta_d - t.beta_d) +
                         (b.beta_g - t.beta_g) * (b.beta_g - t.beta_g) +
                         (b.beta_e - t.beta_e) * (b.beta_e - t.beta_e) +
                         (b.beta_w - t.beta_w) * (b.beta_w - t.beta_w) +
                         (b.beta_c - t.beta_c) * (b.beta_c - t.beta_c);
        return {f, true};
    };
}

// Independent oracle for separable objectives: per-axis exhaustive argmin.
std::array<int, 5> separable_grid_minimizer(const SearchSpace& space,
                                            const std::array<int, 5>& target) {
    const BetaConfig t = space.beta_at(target);
    const std::array<double, 5> want = {t.beta_d, t.beta_g, t.beta_e, t.beta_w, t.beta_c};
    std::array<int, 5> best{};
    for (size_t a = 0; a < 5; ++a) {
        double best_f = std::numeric_limits<double>::max();
        for (int i = 0; i <= space.axes[a].steps; ++i) {
            const double v = space.axes[a].value(i);
            const double f = (v - want[a]) * (v - want[a]);
            if (f < best_f) {
                best_f = f;
                best[a] = i;
            }
        }
    }
    return best;
}

}  // namespace

TEST_CASE("default search space matches the documented box") {
    const SearchSpace s = SearchSpace::defaults();
    CHECK(s.axes[0].lower == -30.0);
    CHECK(s.axes[0].upper == 0.0);
    CHECK(s.axes[1].lower == -10.0);
    CHECK(s.axes[1].upper == 10.0);
    CHECK(s.axes[2].lower == -5.0);
    CHECK(s.axes[2].upper == 5.0);
    CHECK(s.axes[3].lower == 0.0);
    CHECK(s.axes[3].upper == 5.0);
    CHECK(s.axes[4].lower == 0.0);
    CHECK(s.axes[4].upper == 10.0);
    for (const auto& a : s.axes) CHECK(a.steps == 60);
}

TEST_CASE("neighborhood size: interior 10, corner 5") {
    const SearchSpace space = SearchSpace::defaults();
    std::array<int, 5> interior = {30, 30, 30, 30, 30};
    CHECK(neighborhood(interior, space).size() == 10);
    std::array<int, 5> corner = {0, 0, 0, 0, 0};
    CHECK(neighborhood(corner, space).size() == 5);
    std::array<int, 5> far_corner = {60, 60, 60, 60, 60};
    CHECK(neighborhood(far_corner, space).size() == 5);
    std::array<int, 5> edge = {0, 30, 30, 30, 30};
    CHECK(neighborhood(edge, space).size() == 9);
}

TEST_CASE("tabu search finds the exact grid minimizer of a separable quadratic") {
    const SearchSpace space = SearchSpace::defaults();
    Rng rng(555);
    for (int trial = 0; trial < 4; ++trial) {
        std::array<int, 5> target{};
        for (size_t a = 0; a < 5; ++a) {
            target[a] = static_cast<int>(rng.uniform_int(
                static_cast<uint64_t>(space.axes[a].steps + 1)));
        }
        TabuParams params;
        params.max_iters = 200;
        params.max_evals = 100000;
        const OptimizeResult r = optimize(quadratic_at(space, target), space, params, trial);
        REQUIRE(r.found);
        const std::array<int, 5> oracle = separable_grid_minimizer(space, target);
        CHECK(r.best_point == oracle);
        CHECK(r.best_fitness == doctest::Approx(0.0));
    }
}

TEST_CASE("best-so-far trace is monotone non-increasing and always viable") {
    const SearchSpace space = SearchSpace::defaults();
    const std::array<int, 5> target = {10, 50, 20, 40, 5};
    // Half the box is non-viable: best must never come from there.
    const EvalFn eval = [&](const BetaConfig& b, uint64_t seed) -> Evaluation {
        Evaluation e = quadratic_at(space, target)(b, seed);
        if (b.beta_g > 0.0) {
            e.viable = false;
            e.fitness = std::numeric_limits<double>::infinity();
        }
        return e;
    };
    TabuParams params;
    params.max_iters = 150;
    params.max_evals = 100000;
    const OptimizeResult r = optimize(eval, space, params, 3);
    REQUIRE(r.found);
    CHECK(r.best.beta_g <= 0.0);
    double prev = std::numeric_limits<double>::infinity();
    for (const TraceEntry& t : r.trace) {
        CHECK(t.best_so_far <= prev);
        prev = t.best_so_far;
        if (t.fitness == t.best_so_far && std::isfinite(t.best_so_far)) CHECK(t.viable);
    }
}

TEST_CASE("tenure zero still converges on a separable quadratic") {
    const SearchSpace space = SearchSpace::defaults();
    const std::array<int, 5> target = {5, 12, 33, 44, 55};
    TabuParams params;
    params.tenure = 0;
    params.max_iters = 300;
    params.max_evals = 100000;
    const OptimizeResult r = optimize(quadratic_at(space, target), space, params, 8);
    REQUIRE(r.found);
    CHECK(r.best_point == separable_grid_minimizer(space, target));
}

TEST_CASE("budget of one evaluation leaves a trace of length one") {
    const SearchSpace space = SearchSpace::defaults();
    TabuParams params;
    params.max_evals = 1;
    const OptimizeResult r = optimize(quadratic_at(space, {1, 2, 3, 4, 5}), space, params, 1);
    CHECK(r.trace.size() == 1);
    CHECK(r.fresh_evals == 1);
    CHECK(r.found);  // the start point is viable
}

TEST_CASE("no viable candidate yields an explicit no-solution result with the trace") {
    const SearchSpace space = SearchSpace::defaults();
    const EvalFn eval = [](const BetaConfig&, uint64_t) -> Evaluation {
        return {std::numeric_limits<double>::infinity(), false};
    };
    TabuParams params;
    params.max_iters = 5;
    params.max_evals = 40;
    const OptimizeResult r = optimize(eval, space, params, 1);
    CHECK(!r.found);
    CHECK(!r.trace.empty());
    for (const TraceEntry& t : r.trace) CHECK(!t.viable);
}

TEST_CASE("same seed gives an identical trace") {
    const SearchSpace space = SearchSpace::defaults();
    // Seed-dependent noise: determinism must come from the derived seeds.
    const EvalFn eval = [&](const BetaConfig& b, uint64_t seed) -> Evaluation {
        Rng rng(seed);
        const Evaluation base = quadratic_at(space, {20, 20, 20, 20, 20})(b, seed);
        return {base.fitness + rng.normal(0.0, 0.01), true};
    };
    TabuParams params;
    params.max_iters = 40;
    params.max_evals = 100000;
    const OptimizeResult a = optimize(eval, space, params, 77);
    const OptimizeResult b = optimize(eval, space, params, 77);
    REQUIRE(a.trace.size() == b.trace.size());
    for (size_t i = 0; i < a.trace.size(); ++i) {
        CHECK(a.trace[i].fitness == b.trace[i].fitness);
        CHECK(a.trace[i].eval_index == b.trace[i].eval_index);
        CHECK(a.trace[i].best_so_far == b.trace[i].best_so_far);
    }
    CHECK(a.best_fitness == b.best_fitness);
}

TEST_CASE("heavy tabu pressure triggers diversification and still terminates") {
    SearchSpace space = SearchSpace::defaults();
    for (auto& a : space.axes) a.steps = 2;  // 3 points per axis
    TabuParams params;
    params.tenure = 1000;  // everything stays tabu quickly
    params.max_iters = 60;
    params.max_evals = 100000;
    const OptimizeResult r = optimize(quadratic_at(space, {1, 1, 1, 1, 1}), space, params, 5);
    CHECK(r.found);
    CHECK(r.best_point == std::array<int, 5>{1, 1, 1, 1, 1});
}

TEST_CASE("fitness is minutes minus weighted safety; non-viable is +inf") {
    EvacMetrics m;
    m.viable = true;
    m.total_evac_time_s = 600.0;
    m.avg_safety = 0.5;
    CHECK(fitness(m) == doctest::Approx(9.5));
    CHECK(fitness(m, 2.0) == doctest::Approx(9.0));
    m.viable = false;
    CHECK(std::isinf(fitness(m)));
    // Equal time: the safer candidate wins.
    EvacMetrics a = m, b = m;
    a.viable = b.viable = true;
    a.avg_safety = 0.9;
    b.avg_safety = 0.2;
    CHECK(fitness(a) < fitness(b));
}

TEST_CASE("search space validation") {
    SearchSpace s = SearchSpace::defaults();
    s.axes[2].lower = s.axes[2].upper;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = SearchSpace::defaults();
    s.axes[0].steps = 0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    TabuParams bad;
    bad.max_evals = 0;
    CHECK_THROWS_AS(optimize(quadratic_at(SearchSpace::defaults(), {0, 0, 0, 0, 0}),
                             SearchSpace::defaults(), bad, 1),
                    std::invalid_argument);
}
