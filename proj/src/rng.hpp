#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace cellevac {

// Named, independently seeded random streams. A simulation run owns four of
// them (motion, channel, controller, flows) so that changing the consumption
// pattern of one subsystem does not perturb the draws seen by the others.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next_u64() { return gen_(); }

    // [0,1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // (0,1]
    double uniform_pos() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // [0,n), unbiased
    uint64_t uniform_int(uint64_t n) {
        if (n <= 1) return 0;
        const uint64_t bound = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do {
            x = next_u64();
        } while (x >= bound);
        return x % n;
    }

    // Box-Muller; two uniforms per variate, no cached pair so the stream
    // position is a pure function of the number of calls.
    double normal(double mean, double sd) {
        const double u1 = uniform_pos();
        const double u2 = uniform();
        const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
        return mean + sd * z;
    }

    // Exact Poisson sampling. Large means are split additively so Knuth's
    // product method never underflows.
    long poisson(double mean) {
        long n = 0;
        while (mean > 16.0) {
            n += poisson_knuth(16.0);
            mean -= 16.0;
        }
        if (mean > 0.0) n += poisson_knuth(mean);
        return n;
    }

private:
    long poisson_knuth(double mean) {
        const double limit = std::exp(-mean);
        long k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform_pos();
        } while (p > limit);
        return k - 1;
    }

    std::mt19937_64 gen_;
};

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic seed derivation: hash the tag (FNV-1a) into the base seed,
// then scramble. Used for replication seeds, per-stream seeds and grid-point
// seeds so that every consumer gets a distinct, reproducible stream.
inline uint64_t derive_seed(uint64_t base, std::string_view tag, uint64_t index = 0) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return splitmix64(base ^ splitmix64(h ^ splitmix64(index)));
}

// The four streams every evacuation run consumes.
struct RngStreams {
    Rng motion;      // initial placement, preferred speeds
    Rng channel;     // RSSI shadowing draws
    Rng controller;  // logit sampling (cell allocation / per-pedestrian choice)
    Rng flows;       // inflow arrivals, spawn jitter, EF gate selection

    explicit RngStreams(uint64_t run_seed)
        : motion(derive_seed(run_seed, "motion")),
          channel(derive_seed(run_seed, "channel")),
          controller(derive_seed(run_seed, "controller")),
          flows(derive_seed(run_seed, "flows")) {}
};

}  // namespace cellevac
