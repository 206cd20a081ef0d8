// Batch experiment harness for the cellevac shared library. Three modes:
//   run      one replicated evaluation, metrics CSV (+ optional trajectory)
//   sweep    replicated evaluations over a sigma_g list, long-format CSV
//   optimize tabu-search campaign, best profile + progress trace
//
// Every output file embeds the resolved configuration and seed as header
// comments, so any CSV can be regenerated from its own header. No
// timestamps: identical flags and seed give byte-identical files.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cellevac.h"

namespace {

std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

struct SigmaPoint {
    bool none = false;  // unguided baseline
    double value = 0.0;

    std::string label() const { return none ? "none" : fmt(value); }
};

std::vector<SigmaPoint> parse_sigma_list(const std::string& text) {
    std::vector<SigmaPoint> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok.erase(std::remove_if(tok.begin(), tok.end(), ::isspace), tok.end());
        if (tok.empty()) continue;
        if (tok == "none" || tok == "N" || tok == "n") {
            out.push_back({true, 0.0});
            continue;
        }
        double v = 0.0;
        const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size() || v < 0.0) {
            throw CLI::ValidationError("--sigma", "expected dB values >= 0 or 'none': " + tok);
        }
        out.push_back({false, v});
    }
    if (out.empty()) throw CLI::ValidationError("--sigma", "empty sigma list");
    return out;
}

struct Options {
    std::string scenario;
    std::string mode = "run";
    std::string sigma_text = "0";
    std::string kind = "NEF";
    std::string beta = "optimal_0db";
    std::string channel_model = "eq6";
    std::string out_dir = "out";
    uint64_t seed = 1;
    int reps_min = 10;
    int reps_max = 50;
    double confidence = 0.95;
    double error_pct = 0.5;
    int workers = 1;
    double deadline_min = 25.0;
    double scale = 1.0;
    double inflow_rate = 120.0;
    double inflow_duration_s = 300.0;
    double lambda = 1.0;
    bool trajectory = false;
    bool argmax = false;
    bool beta_explicit = false;
    // optimizer
    int tenure = 7;
    int max_iters = 200;
    int max_evals = 500;
    std::vector<double> space_lower;
    std::vector<double> space_upper;
    std::vector<int> space_steps;
};

[[noreturn]] void die(const std::string& msg, int code = 1) {
    std::fprintf(stderr, "error: %s\n", msg.c_str());
    std::exit(code);
}

void check(cev_status st, const std::string& what) {
    if (st != CEV_OK) die(what + ": " + cev_last_error());
}

cev_run_config make_config(const Options& opt, const SigmaPoint& sigma) {
    cev_run_config cfg;
    cev_run_config_init(&cfg);
    cfg.sigma_g_db = sigma.none ? 0.0 : sigma.value;
    cfg.unguided = sigma.none ? 1 : 0;
    cfg.channel_model =
        opt.channel_model == "eq5" ? CEV_CHANNEL_LOG_NORMAL : CEV_CHANNEL_CALIBRATED;
    cfg.kind = opt.kind == "EF" ? CEV_KIND_EF : CEV_KIND_NEF;
    cfg.deadline_s = opt.deadline_min * 60.0;
    cfg.scale = opt.scale;
    cfg.inflow_rate_per_min = opt.inflow_rate;
    cfg.inflow_duration_s = opt.inflow_duration_s;
    cfg.argmax_allocation = opt.argmax ? 1 : 0;
    cfg.safety_weight = opt.lambda;
    cfg.seed = opt.seed;
    return cfg;
}

cev_replication make_policy(const Options& opt, int control) {
    cev_replication pol;
    cev_replication_init(&pol);
    pol.min_reps = opt.reps_min;
    pol.max_reps = opt.reps_max;
    pol.confidence = opt.confidence;
    pol.error_percent = opt.error_pct;
    pol.control_output = control;
    return pol;
}

// The sigma point a beta label belongs to is data, not config, so the
// header carries everything needed to regenerate the file.
void write_header(std::ofstream& f, const Options& opt, const std::string& mode_line) {
    f << "# cellevac " << cev_version() << "\n";
    f << "# mode=" << mode_line << " scenario=" << opt.scenario << "\n";
    f << "# kind=" << opt.kind << " beta=" << opt.beta << " sigma=" << opt.sigma_text
      << " channel_model=" << opt.channel_model << "\n";
    f << "# seed=" << opt.seed << " scale=" << fmt(opt.scale)
      << " deadline_min=" << fmt(opt.deadline_min) << " workers=" << opt.workers << "\n";
    f << "# reps_min=" << opt.reps_min << " reps_max=" << opt.reps_max
      << " confidence=" << fmt(opt.confidence) << " error_pct=" << fmt(opt.error_pct) << "\n";
    f << "# inflow_rate_per_min=" << fmt(opt.inflow_rate)
      << " inflow_duration_s=" << fmt(opt.inflow_duration_s) << " lambda=" << fmt(opt.lambda)
      << " argmax=" << (opt.argmax ? 1 : 0) << "\n";
}

const char* kMetricsColumns =
    "seed,sigma_g,scenario_kind,beta_profile,evac_time_s,avg_safety,safety_var,mean_changes,"
    "viable,rep,inflow_exit_a,inflow_exit_b,blocked_exit,cell_error_rate,initial_peds,"
    "injected_peds,evacuated_peds,fitness\n";

void write_metric_row(std::ofstream& f, const Options& opt, const SigmaPoint& sigma, int rep,
                      uint64_t rep_seed, const cev_metrics& m) {
    f << rep_seed << ',' << sigma.label() << ',' << opt.kind << ',' << opt.beta << ','
      << fmt(m.evac_time_s) << ',' << fmt(m.avg_safety) << ',' << fmt(m.safety_variance) << ','
      << fmt(m.mean_decision_changes) << ',' << m.viable << ',' << rep << ','
      << m.ef_inflow_exit_a << ',' << m.ef_inflow_exit_b << ',' << m.ef_blocked_exit << ','
      << fmt(m.cell_error_rate) << ',' << m.initial_peds << ',' << m.injected_peds << ','
      << m.evacuated_peds << ',' << fmt(m.fitness) << '\n';
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream f(path);
    if (!f) die("cannot write " + path.string());
    return f;
}

int run_group(const cev_scenario* scn, const cev_beta* beta, const Options& opt,
              const SigmaPoint& sigma, int control, std::ofstream& csv) {
    // The 'none' group is the no-guidance baseline: unless a beta was given
    // explicitly, it runs the standard per-pedestrian behavior model.
    cev_beta group_beta = *beta;
    Options group_opt = opt;
    if (sigma.none && !opt.beta_explicit) {
        check(cev_beta_profile("standard_no_cellevac", &group_beta), "baseline profile");
        group_opt.beta = "standard_no_cellevac";
    }
    const cev_run_config cfg = make_config(opt, sigma);
    const cev_replication pol = make_policy(opt, control);
    std::vector<cev_metrics> reps(static_cast<size_t>(pol.max_reps));
    int n = 0;
    check(cev_run_replicated(scn, &group_beta, &cfg, &pol, opt.workers, reps.data(),
                             static_cast<int>(reps.size()), &n),
          "replicated run failed");
    for (int i = 0; i < n; ++i) {
        write_metric_row(csv, group_opt, sigma, i, cev_replication_seed(opt.seed, i),
                         reps[static_cast<size_t>(i)]);
    }
    return n;
}

struct TrajSink {
    std::ofstream* f;
};

void traj_cb(void* user, double time_s, int ped, double x, double y, int believed_cell,
             int assigned_exit_id) {
    auto* sink = static_cast<TrajSink*>(user);
    *sink->f << fmt(time_s) << ',' << ped << ',' << fmt(x) << ',' << fmt(y) << ','
             << believed_cell << ',' << assigned_exit_id << '\n';
}

int cmd_run(const cev_scenario* scn, const cev_beta* beta, const Options& opt,
            const std::vector<SigmaPoint>& sigmas) {
    if (sigmas.size() != 1) die("--sigma: mode run takes exactly one sigma value", 2);
    const std::filesystem::path out = opt.out_dir;
    auto csv = open_out(out / "metrics.csv");
    write_header(csv, opt, "run");
    csv << kMetricsColumns;
    const int n = run_group(scn, beta, opt, sigmas[0], CEV_CONTROL_EVAC_TIME, csv);

    if (opt.trajectory) {
        auto traj = open_out(out / "trajectory.csv");
        write_header(traj, opt, "run-trajectory");
        traj << "time_s,ped,x,y,believed_cell,assigned_exit\n";
        TrajSink sink{&traj};
        cev_run_config cfg = make_config(opt, sigmas[0]);
        cfg.seed = cev_replication_seed(opt.seed, 0);  // trajectory of replication 0
        cev_metrics m{};
        check(cev_run_single(scn, beta, &cfg, &m, traj_cb, &sink), "trajectory run failed");
    }
    std::printf("run: %d replications -> %s\n", n, (out / "metrics.csv").c_str());
    return 0;
}

int cmd_sweep(const cev_scenario* scn, const cev_beta* beta, const Options& opt,
              const std::vector<SigmaPoint>& sigmas) {
    if (sigmas.size() < 2) die("--sigma: sweep needs at least 2 sigma values", 2);
    const std::filesystem::path out = opt.out_dir;
    auto csv = open_out(out / "sweep.csv");
    write_header(csv, opt, "sweep");
    csv << kMetricsColumns;
    for (const SigmaPoint& sigma : sigmas) {
        const int n = run_group(scn, beta, opt, sigma, CEV_CONTROL_EVAC_TIME, csv);
        std::printf("sweep: sigma=%s n=%d\n", sigma.label().c_str(), n);
    }
    std::printf("sweep -> %s\n", (out / "sweep.csv").c_str());
    return 0;
}

struct TraceSink {
    std::ofstream* f;
};

void trace_cb(void* user, int iteration, int eval_index, const cev_beta* beta, double fitness,
              int viable, double best_so_far) {
    auto* sink = static_cast<TraceSink*>(user);
    *sink->f << iteration << ',' << eval_index << ',' << fmt(beta->beta_d) << ','
             << fmt(beta->beta_g) << ',' << fmt(beta->beta_e) << ',' << fmt(beta->beta_w) << ','
             << fmt(beta->beta_c) << ',' << fmt(fitness) << ',' << viable << ','
             << fmt(best_so_far) << '\n';
}

int cmd_optimize(const cev_scenario* scn, const Options& opt,
                 const std::vector<SigmaPoint>& sigmas) {
    if (sigmas.size() != 1) die("--sigma: mode optimize takes exactly one sigma value", 2);
    if (sigmas[0].none) die("--sigma: cannot optimize the unguided baseline", 2);

    cev_search_space space;
    cev_search_space_init(&space);
    if (!opt.space_lower.empty()) {
        for (int a = 0; a < 5; ++a) space.lower[a] = opt.space_lower[static_cast<size_t>(a)];
    }
    if (!opt.space_upper.empty()) {
        for (int a = 0; a < 5; ++a) space.upper[a] = opt.space_upper[static_cast<size_t>(a)];
    }
    if (!opt.space_steps.empty()) {
        for (int a = 0; a < 5; ++a) space.steps[a] = opt.space_steps[static_cast<size_t>(a)];
    }
    cev_tabu_params params{opt.tenure, opt.max_iters, opt.max_evals};
    const cev_run_config cfg = make_config(opt, sigmas[0]);
    const cev_replication pol = make_policy(opt, CEV_CONTROL_FITNESS);

    const std::filesystem::path out = opt.out_dir;
    auto trace = open_out(out / "trace.csv");
    write_header(trace, opt, "optimize");
    trace << "# tenure=" << opt.tenure << " max_iters=" << opt.max_iters
          << " max_evals=" << opt.max_evals << "\n";
    trace << "iteration,eval,beta_d,beta_g,beta_e,beta_w,beta_c,fitness,viable,best_so_far\n";
    TraceSink sink{&trace};

    cev_beta best{};
    double best_fitness = 0.0;
    const cev_status st = cev_optimize(scn, &cfg, &space, &params, &pol, opt.workers, trace_cb,
                                       &sink, &best, &best_fitness);
    trace.close();
    if (st == CEV_ERR_NO_SOLUTION) {
        std::fprintf(stderr, "optimize: no viable solution (trace preserved in %s)\n",
                     (out / "trace.csv").c_str());
        return 1;
    }
    check(st, "optimize failed");

    const std::string best_path = (out / "best_beta.json").string();
    check(cev_beta_save_file(best_path.c_str(), &best), "cannot save best profile");
    std::printf("optimize: best fitness %s -> %s (trace: %s)\n", fmt(best_fitness).c_str(),
                best_path.c_str(), (out / "trace.csv").c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    Options opt;
    CLI::App app{"cellevac: cell-based evacuation guidance experiments"};
    app.add_option("--scenario", opt.scenario, "scenario document (.scn)")->required();
    app.add_option("--mode", opt.mode, "run | sweep | optimize")
        ->check(CLI::IsMember({"run", "sweep", "optimize"}));
    app.add_option("--sigma", opt.sigma_text,
                   "sigma_g list, dB, comma separated; 'none' = unguided baseline");
    app.add_option("--kind", opt.kind, "NEF | EF")->check(CLI::IsMember({"NEF", "EF"}));
    app.add_option("--beta", opt.beta, "beta profile name or JSON file");
    app.add_option("--channel-model", opt.channel_model, "eq6 | eq5")
        ->check(CLI::IsMember({"eq6", "eq5"}));
    app.add_option("--seed", opt.seed, "master seed");
    app.add_option("--reps-min", opt.reps_min, "minimum replications");
    app.add_option("--reps-max", opt.reps_max, "maximum replications");
    app.add_option("--confidence", opt.confidence, "replication confidence level");
    app.add_option("--error-pct", opt.error_pct, "replication error percent");
    app.add_option("--out", opt.out_dir, "output directory");
    app.add_option("--workers", opt.workers, "concurrent replications");
    app.add_option("--deadline-min", opt.deadline_min, "evacuation deadline, minutes");
    app.add_option("--scale", opt.scale, "population/inflow scale factor");
    app.add_option("--inflow-rate", opt.inflow_rate, "EF inflow rate per gate, peds/min");
    app.add_option("--inflow-duration-s", opt.inflow_duration_s, "EF inflow window, seconds");
    app.add_option("--lambda", opt.lambda, "safety weight in the fitness");
    app.add_flag("--trajectory", opt.trajectory, "write per-cycle trajectory CSV (mode run)");
    app.add_flag("--argmax", opt.argmax, "argmax allocation instead of sampling");
    app.add_option("--tenure", opt.tenure, "tabu tenure");
    app.add_option("--max-iters", opt.max_iters, "tabu iterations");
    app.add_option("--max-evals", opt.max_evals, "tabu evaluation budget");
    app.add_option("--space-lower", opt.space_lower, "search box lower bounds (5 values)")
        ->expected(5);
    app.add_option("--space-upper", opt.space_upper, "search box upper bounds (5 values)")
        ->expected(5);
    app.add_option("--space-steps", opt.space_steps, "search grid steps (5 values)")->expected(5);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    std::vector<SigmaPoint> sigmas;
    try {
        sigmas = parse_sigma_list(opt.sigma_text);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }

    cev_scenario* scn = cev_scenario_load_file(opt.scenario.c_str());
    if (!scn) die(std::string("--scenario: ") + cev_last_error(), 2);

    opt.beta_explicit = app.count("--beta") > 0;
    cev_beta beta{};
    if (cev_beta_profile(opt.beta.c_str(), &beta) != CEV_OK &&
        cev_beta_load_file(opt.beta.c_str(), &beta) != CEV_OK) {
        cev_scenario_free(scn);
        die("--beta: not a known profile or readable file: " + opt.beta, 2);
    }

    std::error_code ec;
    std::filesystem::create_directories(opt.out_dir, ec);
    if (ec) die("--out: cannot create " + opt.out_dir, 2);

    int rc = 0;
    if (opt.mode == "run") {
        rc = cmd_run(scn, &beta, opt, sigmas);
    } else if (opt.mode == "sweep") {
        rc = cmd_sweep(scn, &beta, opt, sigmas);
    } else {
        rc = cmd_optimize(scn, opt, sigmas);
    }
    cev_scenario_free(scn);
    return rc;
}
