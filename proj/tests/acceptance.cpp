// Acceptance suite: one pass/fail line per criterion, nonzero exit status on
// any failure. Statistical criteria run with fixed seeds and are fully
// deterministic.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "channel.hpp"
#include "controller.hpp"
#include "helpers.hpp"
#include "replication.hpp"
#include "scenario.hpp"
#include "simulation.hpp"
#include "stats.hpp"
#include "tabu.hpp"

#ifndef CELLEVAC_CLI_PATH
#define CELLEVAC_CLI_PATH "cellevac"
#endif

using namespace cellevac;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& what, const std::string& detail,
            double seconds) {
    std::printf("[%s] criterion %d: %s (%s; %.1fs)\n", pass ? "PASS" : "FAIL", criterion,
                what.c_str(), detail.c_str(), seconds);
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

void run_criterion(int criterion, const std::string& what,
                   const std::function<bool(std::string&)>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool pass = false;
    try {
        pass = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    const double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(criterion, pass, what, detail, dt);
}

// ---- 1: logit sampling against the closed-form softmax ----

bool logit_oracle(std::string& detail) {
    Rng row_rng(10001);
    Rng sample_rng(10002);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> row(8);
        for (double& v : row) v = row_rng.uniform(-12.0, 12.0);

        // Independent oracle: max-subtracted softmax computed right here.
        std::vector<double> expected(8);
        double vmax = row[0];
        for (const double v : row) vmax = std::max(vmax, v);
        double sum = 0.0;
        for (size_t j = 0; j < 8; ++j) {
            expected[j] = std::exp(row[j] - vmax);
            sum += expected[j];
        }
        for (double& e : expected) e /= sum;

        const int n = 1000000;
        std::array<long, 8> counts{};
        for (int i = 0; i < n; ++i) ++counts[static_cast<size_t>(sample_exit(row, sample_rng))];
        for (size_t j = 0; j < 8; ++j) {
            const double freq = static_cast<double>(counts[j]) / n;
            worst = std::max(worst, std::abs(freq - expected[j]));
        }
    }
    detail = "worst |freq - softmax| = " + std::to_string(worst);
    return worst < 0.01;
}

// ---- 2: two-beacon misclassification against the Gaussian tail ----

bool channel_oracle(std::string& detail) {
    Rng rng(20001);
    double worst = 0.0;
    for (const double d1 : {1.5, 2.0, 3.0}) {
        for (const double d2 : {4.0, 6.0}) {
            const ScenarioLayout toy = load_scenario(
                toy_scenario(-10, -10, d1 + d2 + 10, 10, {{0.0, 0.0}, {d1 + d2, 0.0}},
                             {{1, -10.0, 0.0, 2.0}}, 1.0));
            const Vec2 probe{d1, 0.0};
            for (const double sigma : {5.0, 15.0, 30.0}) {
                ChannelParams params;
                params.sigma_g_db = sigma;
                const int n = 1000000;
                long wrong = 0;
                for (int i = 0; i < n; ++i) {
                    if (resolve_cell(probe, toy, params, rng) == 1) ++wrong;
                }
                const double p_hat = static_cast<double>(wrong) / n;
                const double p_true =
                    stats::q_function(60.0 * std::log10(d2 / d1) / (sigma * std::sqrt(2.0)));
                worst = std::max(worst, std::abs(p_hat - p_true));
            }
        }
    }
    detail = "worst |p_hat - Q| = " + std::to_string(worst);
    return worst < 0.005;
}

// ---- 3: zero uncertainty means zero believed-cell error ----

bool zero_uncertainty(std::string& detail) {
    const ScenarioLayout layout = load_scenario_file(reference_scenario_path());
    RunConfig cfg;
    cfg.scale = 0.1;
    const RunResult r = run_evacuation(layout, beta_profile("optimal_0db"), cfg, 30001);
    std::ostringstream ss;
    ss << r.log.resolutions << " resolutions, " << r.log.cell_errors << " errors";
    detail = ss.str();
    return r.metrics.viable && r.log.resolutions > 0 && r.log.cell_errors == 0;
}

// ---- 4: evacuation time and decision changes vs sigma_g ----

bool sensitivity_trend(std::string& detail) {
    const ScenarioLayout layout = load_scenario_file(reference_scenario_path());
    const std::vector<double> sigmas = {0.0, 5.0, 10.0, 20.0, 30.0, 40.0};
    std::vector<double> med_evac, med_changes;
    for (const double sigma : sigmas) {
        std::vector<double> evac, changes;
        for (int rep = 0; rep < 10; ++rep) {
            RunConfig cfg;
            cfg.scale = 0.1;
            cfg.channel.sigma_g_db = sigma;
            const uint64_t seed =
                derive_seed(40001, "sens", static_cast<uint64_t>(sigma) * 100 +
                                               static_cast<uint64_t>(rep));
            const RunResult r = run_evacuation(layout, beta_profile("optimal_0db"), cfg, seed);
            evac.push_back(r.metrics.total_evac_time_s);
            changes.push_back(r.metrics.mean_decision_changes);
        }
        med_evac.push_back(stats::median(evac));
        med_changes.push_back(stats::median(changes));
    }
    const double rho = stats::spearman_rho(sigmas, med_evac);
    const bool changes_increase =
        med_changes[0] < med_changes[3] && med_changes[3] < med_changes[5];
    std::ostringstream ss;
    ss << "spearman(evac)=" << rho << ", changes 0/20/40 dB = " << med_changes[0] << "/"
       << med_changes[3] << "/" << med_changes[5];
    detail = ss.str();
    return rho >= 0.9 && changes_increase;
}

// ---- 5: guided beats the unguided baseline on time and balance ----

bool guidance_benefit(std::string& detail) {
    const ScenarioLayout layout = load_scenario_file(reference_scenario_path());
    std::vector<double> evac_g, var_g, evac_n, var_n;
    for (int mode = 0; mode < 2; ++mode) {
        RunConfig cfg;
        cfg.channel.none_mode = mode == 1;
        const BetaConfig beta =
            beta_profile(mode == 0 ? "optimal_0db" : "standard_no_cellevac");
        for (int rep = 0; rep < 20; ++rep) {
            const uint64_t seed =
                derive_seed(50001, mode == 0 ? "guided" : "baseline", static_cast<uint64_t>(rep));
            const RunResult r = run_evacuation(layout, beta, cfg, seed);
            (mode == 0 ? evac_g : evac_n).push_back(r.metrics.total_evac_time_s);
            (mode == 0 ? var_g : var_n).push_back(r.metrics.safety_variance);
        }
    }
    const double p_evac = stats::rank_sum_p_less(evac_g, evac_n);
    const double p_var = stats::rank_sum_p_less(var_g, var_n);
    std::ostringstream ss;
    ss << "evac med " << stats::median(evac_g) << " vs " << stats::median(evac_n)
       << " (p=" << p_evac << "), var med " << stats::median(var_g) << " vs "
       << stats::median(var_n) << " (p=" << p_var << ")";
    detail = ss.str();
    return stats::median(evac_g) < stats::median(evac_n) &&
           stats::median(var_g) < stats::median(var_n) && p_evac < 0.05 && p_var < 0.05;
}

// ---- 6: replication controller against closed-form CI arithmetic ----

// 0.975 t quantiles for df 9..49, frozen from standard tables.
constexpr std::array<double, 41> kT975 = {
    2.2621571628540993, 2.2281388519649385, 2.200985160082949, 2.1788128296634177,
    2.1603686564610127, 2.1447866879169273, 2.131449545559323, 2.1199052992210112,
    2.1098155778331806, 2.10092204024096, 2.093024054408263, 2.0859634472658364,
    2.079613844727662, 2.0738730679040147, 2.0686576104190406, 2.0638985616280205,
    2.059538552753294, 2.055529438642871, 2.0518305164802833, 2.048407141795244,
    2.045229642132703, 2.0422724563012373, 2.0395134463964077, 2.036933343460101,
    2.0345152974493383, 2.032244509317718, 2.0301079282503425, 2.0280940009804502,
    2.0261924630291093, 2.024394163911969, 2.0226909200367604, 2.0210753903062733,
    2.019540970441376, 2.018081702818444, 2.016692199227824, 2.0153675744437636,
    2.014103388880846, 2.0128955989194286, 2.0117405137297655, 2.010634757624232,
    2.0095752371292397};

bool replication_controller(std::string& detail) {
    ReplicationPolicy pol;  // 10..50, 95%, 0.5%

    // Zero-variance stream stops at exactly the floor.
    const ReplicationSummary flat = run_replicated(pol, [](uint64_t, int) { return 42.0; }, 1);
    if (flat.n != 10) {
        detail = "zero-variance stream stopped at n=" + std::to_string(flat.n);
        return false;
    }

    // Synthetic Normal(100, sigma) streams: the achieved n must equal the
    // stop point computed independently with the frozen t table, and n must
    // stay within [10, 50].
    for (const double sigma : {0.05, 0.2, 0.5, 1.0, 3.0, 10.0}) {
        for (uint64_t seed = 60001; seed < 60006; ++seed) {
            const auto fn = [sigma](uint64_t rep_seed, int) {
                Rng rng(rep_seed);
                return rng.normal(100.0, sigma);
            };
            const ReplicationSummary s = run_replicated(pol, fn, seed);
            if (s.n < 10 || s.n > 50) {
                detail = "n out of bounds: " + std::to_string(s.n);
                return false;
            }
            // Closed-form oracle over the same sample sequence.
            int oracle_n = -1;
            std::vector<double> prefix;
            for (int rep = 0; rep < 50; ++rep) {
                prefix.push_back(fn(replication_seed(seed, rep), rep));
                const int n = rep + 1;
                if (n < 10) continue;
                double mean = 0.0;
                for (const double x : prefix) mean += x;
                mean /= n;
                double var = 0.0;
                for (const double x : prefix) var += (x - mean) * (x - mean);
                var /= (n - 1);
                const double hw =
                    kT975[static_cast<size_t>(n - 10)] * std::sqrt(var) / std::sqrt(n);
                const double limit =
                    std::abs(mean) < 1.0 ? 0.005 : 0.005 * std::abs(mean);
                if (n == 50 || hw <= limit) {
                    oracle_n = n;
                    break;
                }
            }
            if (s.n != oracle_n) {
                std::ostringstream ss;
                ss << "sigma=" << sigma << " seed=" << seed << ": controller n=" << s.n
                   << " oracle n=" << oracle_n;
                detail = ss.str();
                return false;
            }
        }
    }
    detail = "floor stop + 30 synthetic streams match the closed-form CI";
    return true;
}

// ---- 7: tabu search on a separable quadratic surrogate ----

bool tabu_correctness(std::string& detail) {
    const SearchSpace space = SearchSpace::defaults();
    Rng rng(70001);
    for (int trial = 0; trial < 3; ++trial) {
        std::array<int, 5> target{};
        for (size_t a = 0; a < 5; ++a) {
            target[a] =
                static_cast<int>(rng.uniform_int(static_cast<uint64_t>(space.axes[a].steps + 1)));
        }
        const BetaConfig t = space.beta_at(target);
        const EvalFn eval = [t](const BetaConfig& b, uint64_t) -> Evaluation {
            const double f = (b.beta_d - t.beta_d) * (b.beta_d - t.beta_d) +
                             (b.beta_g - t.beta_g) * (b.beta_g - t.beta_g) +
                             (b.beta_e - t.beta_e) * (b.beta_e - t.beta_e) +
                             (b.beta_w - t.beta_w) * (b.beta_w - t.beta_w) +
                             (b.beta_c - t.beta_c) * (b.beta_c - t.beta_c);
            return {f, true};
        };
        TabuParams params;
        params.max_iters = 250;
        params.max_evals = 100000;
        const OptimizeResult r = optimize(eval, space, params, 70100 + trial);

        if (!r.found || r.best_point != target) {
            detail = "trial " + std::to_string(trial) + ": wrong minimizer";
            return false;
        }
        double prev = std::numeric_limits<double>::infinity();
        for (const TraceEntry& entry : r.trace) {
            if (entry.best_so_far > prev) {
                detail = "best-so-far not monotone";
                return false;
            }
            prev = entry.best_so_far;
        }
    }
    detail = "3 random targets recovered exactly; traces monotone";
    return true;
}

// ---- 8: CLI determinism (byte-identical outputs) ----

bool read_file(const std::string& path, std::string& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::ostringstream ss;
    ss << in.rdbuf();
    out = ss.str();
    return true;
}

bool cli_determinism(std::string& detail) {
    const std::string cli = CELLEVAC_CLI_PATH;
    const std::string scn = reference_scenario_path();
    struct ModeSpec {
        std::string name;
        std::string args;
        std::vector<std::string> files;
    };
    const std::vector<ModeSpec> modes = {
        {"run",
         "--mode run --sigma 5 --scale 0.03 --reps-min 2 --reps-max 2 --trajectory",
         {"metrics.csv", "trajectory.csv"}},
        {"sweep",
         "--mode sweep --sigma 0,20,none --scale 0.02 --reps-min 2 --reps-max 2 --kind EF",
         {"sweep.csv"}},
        {"optimize",
         "--mode optimize --sigma 5 --scale 0.02 --reps-min 2 --reps-max 2 --max-evals 5 "
         "--max-iters 2",
         {"trace.csv", "best_beta.json"}},
    };
    for (const ModeSpec& mode : modes) {
        for (const std::string& dir : {"a", "b"}) {
            const std::string out = "/tmp/cev_acc_" + mode.name + "_" + dir;
            std::system(("rm -rf " + out).c_str());
            const std::string cmd = cli + " --scenario " + scn + " " + mode.args +
                                    " --seed 88 --out " + out + " > /dev/null 2>&1";
            if (std::system(cmd.c_str()) != 0) {
                detail = mode.name + ": CLI invocation failed";
                return false;
            }
        }
        for (const std::string& file : mode.files) {
            std::string a, b;
            if (!read_file("/tmp/cev_acc_" + mode.name + "_a/" + file, a) ||
                !read_file("/tmp/cev_acc_" + mode.name + "_b/" + file, b)) {
                detail = mode.name + ": missing output " + file;
                return false;
            }
            if (a != b) {
                detail = mode.name + ": " + file + " differs between invocations";
                return false;
            }
            if (a.empty()) {
                detail = mode.name + ": " + file + " is empty";
                return false;
            }
        }
    }
    detail = "run/sweep/optimize outputs byte-identical across reruns";
    return true;
}

// ---- 9: SFM sanity: free-walk kinematics and conservation ----

bool sfm_sanity(std::string& detail) {
    // Lone pedestrian over 13 m: time within 2% of d/v0 + tau.
    const ScenarioLayout corridor = load_scenario(
        toy_scenario(0, -5, 30, 5, {{10.0, 0.0}}, {{1, 30.0, 0.0, 2.0}}, 6.0, 1));
    SfmParams prm;
    WorldState world;
    world.exit_blocked = {false};
    Pedestrian p;
    p.id = 0;
    p.position = corridor.exits[0].gate.midpoint() + Vec2{-13.0, 0.0};
    p.preferred_speed = 1.3;
    p.assigned_exit = 0;
    world.peds.push_back(p);
    ForceGrid grid(corridor, prm, world.exit_blocked);
    double evac_time = -1.0;
    for (int s = 0; s < 20000 && evac_time < 0.0; ++s) {
        const auto absorbed = step(world, corridor, grid, prm);
        if (!absorbed.empty()) evac_time = absorbed[0].time_s;
    }
    const double oracle = 13.0 / 1.3 + prm.tau;
    const double rel_err = std::abs(evac_time - oracle) / oracle;
    if (!(evac_time > 0.0) || rel_err >= 0.02) {
        std::ostringstream ss;
        ss << "free walk: " << evac_time << " s vs oracle " << oracle << " s";
        detail = ss.str();
        return false;
    }

    // Conservation at every step of a 10-minute EF run.
    const ScenarioLayout layout = load_scenario_file(reference_scenario_path());
    RunConfig cfg;
    cfg.scale = 0.1;
    cfg.kind = ScenarioKind::kEF;
    cfg.deadline_s = 600.0;
    cfg.inflow_duration_s = 600.0;
    cfg.check_invariants = true;
    const RunResult r = run_evacuation(layout, beta_profile("optimal_0db"), cfg, 90001);
    std::ostringstream ss;
    ss << "free walk " << evac_time << " s (oracle " << oracle << " s), EF run "
       << r.log.initial_peds << "+" << r.log.injected_peds << " peds, "
       << r.invariant_violations << " invariant violations";
    detail = ss.str();
    return r.invariant_violations == 0 && r.log.injected_peds > 0 &&
           r.log.initial_peds + r.log.injected_peds ==
               r.log.evacuated_peds + r.log.active_at_end;
}

}  // namespace

int main() {
    std::printf("cellevac acceptance suite\n");
    run_criterion(1, "logit allocation matches the softmax oracle", logit_oracle);
    run_criterion(2, "two-beacon misclassification matches the Gaussian tail", channel_oracle);
    run_criterion(3, "sigma 0 resolves every cell exactly", zero_uncertainty);
    run_criterion(4, "evac time and decision changes grow with sigma_g", sensitivity_trend);
    run_criterion(5, "guidance beats the unguided baseline (time and balance)",
                  guidance_benefit);
    run_criterion(6, "replication controller matches closed-form CI arithmetic",
                  replication_controller);
    run_criterion(7, "tabu search recovers exact grid minimizers", tabu_correctness);
    run_criterion(8, "CLI outputs are byte-identical for identical flags and seed",
                  cli_determinism);
    run_criterion(9, "SFM free-walk kinematics and pedestrian conservation", sfm_sanity);
    std::printf("%d/9 criteria passed\n", 9 - g_failures);
    return g_failures;
}
