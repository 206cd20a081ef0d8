#include "cellevac.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "channel.hpp"
#include "controller.hpp"
#include "replication.hpp"
#include "scenario.hpp"
#include "simulation.hpp"
#include "tabu.hpp"

using nlohmann::json;

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

cev_status status_of(const std::exception& e) {
    if (dynamic_cast<const cellevac::ScenarioError*>(&e)) return CEV_ERR_SCENARIO;
    if (dynamic_cast<const std::invalid_argument*>(&e)) return CEV_ERR_INVALID_ARGUMENT;
    return CEV_ERR_RUNTIME;
}

template <typename Fn>
cev_status wrap(Fn&& fn) {
    try {
        return fn();
    } catch (const std::exception& e) {
        set_error(e.what());
        return status_of(e);
    } catch (...) {
        set_error("unknown error");
        return CEV_ERR_RUNTIME;
    }
}

cellevac::BetaConfig to_beta(const cev_beta& b) {
    return {b.beta_d, b.beta_g, b.beta_e, b.beta_w, b.beta_c};
}

cev_beta from_beta(const cellevac::BetaConfig& b) {
    return {b.beta_d, b.beta_g, b.beta_e, b.beta_w, b.beta_c};
}

cellevac::RunConfig to_run_config(const cev_run_config& cfg) {
    cellevac::RunConfig rc;
    rc.channel.sigma_g_db = cfg.sigma_g_db;
    rc.channel.none_mode = cfg.unguided != 0;
    rc.channel.model = cfg.channel_model == CEV_CHANNEL_LOG_NORMAL
                           ? cellevac::ChannelModel::kLogNormal
                           : cellevac::ChannelModel::kCalibrated;
    rc.kind = cfg.kind == CEV_KIND_EF ? cellevac::ScenarioKind::kEF
                                      : cellevac::ScenarioKind::kNEF;
    rc.deadline_s = cfg.deadline_s;
    rc.scale = cfg.scale;
    rc.inflow_rate_per_min = cfg.inflow_rate_per_min;
    rc.inflow_duration_s = cfg.inflow_duration_s;
    rc.argmax_allocation = cfg.argmax_allocation != 0;
    return rc;
}

cev_metrics to_c_metrics(const cellevac::RunResult& r, double safety_weight) {
    cev_metrics m{};
    m.evac_time_s = r.metrics.total_evac_time_s;
    m.avg_safety = r.metrics.avg_safety;
    m.safety_variance = r.metrics.safety_variance;
    m.mean_decision_changes = r.metrics.mean_decision_changes;
    m.viable = r.metrics.viable ? 1 : 0;
    m.fitness = cellevac::fitness(r.metrics, safety_weight);
    m.cell_error_rate = r.cell_error_rate();
    m.initial_peds = r.log.initial_peds;
    m.injected_peds = r.log.injected_peds;
    m.evacuated_peds = r.log.evacuated_peds;
    m.ef_blocked_exit = r.ef_blocked_exit;
    m.ef_inflow_exit_a = r.ef_inflow_exits[0];
    m.ef_inflow_exit_b = r.ef_inflow_exits[1];
    return m;
}

cellevac::ReplicationPolicy to_policy(const cev_replication& pol) {
    cellevac::ReplicationPolicy p;
    p.min_reps = pol.min_reps;
    p.max_reps = pol.max_reps;
    p.confidence = pol.confidence;
    p.error_percent = pol.error_percent;
    p.control_output = pol.control_output == CEV_CONTROL_FITNESS
                           ? cellevac::ControlOutput::kFitness
                           : cellevac::ControlOutput::kEvacTime;
    return p;
}

}  // namespace

struct cev_scenario {
    cellevac::ScenarioLayout layout;
};

extern "C" {

const char* cev_version(void) { return "1.0.0"; }

const char* cev_last_error(void) { return g_last_error.c_str(); }

cev_scenario* cev_scenario_load_file(const char* path) {
    if (!path) {
        set_error("cev_scenario_load_file: path is NULL");
        return nullptr;
    }
    try {
        auto* s = new cev_scenario{cellevac::load_scenario_file(path)};
        return s;
    } catch (const std::exception& e) {
        set_error(e.what());
        return nullptr;
    }
}

cev_scenario* cev_scenario_load_string(const char* json_text) {
    if (!json_text) {
        set_error("cev_scenario_load_string: text is NULL");
        return nullptr;
    }
    try {
        auto* s = new cev_scenario{cellevac::load_scenario(json_text)};
        return s;
    } catch (const std::exception& e) {
        set_error(e.what());
        return nullptr;
    }
}

void cev_scenario_free(cev_scenario* s) { delete s; }

int cev_scenario_cell_count(const cev_scenario* s) { return s ? s->layout.cell_count() : 0; }

int cev_scenario_exit_count(const cev_scenario* s) { return s ? s->layout.exit_count() : 0; }

long cev_scenario_population(const cev_scenario* s) {
    return s ? s->layout.population.count : 0;
}

int cev_scenario_exit_id(const cev_scenario* s, int exit_index) {
    if (!s || exit_index < 0 || exit_index >= s->layout.exit_count()) return -1;
    return s->layout.exits[static_cast<size_t>(exit_index)].id;
}

double cev_scenario_distance_m(const cev_scenario* s, int cell, int exit_index) {
    if (!s || cell < 0 || cell >= s->layout.cell_count() || exit_index < 0 ||
        exit_index >= s->layout.exit_count()) {
        return -1.0;
    }
    return s->layout.distance_matrix[static_cast<size_t>(cell)][static_cast<size_t>(exit_index)];
}

cev_status cev_beta_profile(const char* name, cev_beta* out) {
    return wrap([&]() -> cev_status {
        if (!name || !out) throw std::invalid_argument("cev_beta_profile: NULL argument");
        *out = from_beta(cellevac::beta_profile(name));
        return CEV_OK;
    });
}

cev_status cev_beta_load_file(const char* path, cev_beta* out) {
    return wrap([&]() -> cev_status {
        if (!path || !out) throw std::invalid_argument("cev_beta_load_file: NULL argument");
        std::ifstream in(path);
        if (!in) {
            set_error(std::string("cannot open beta file: ") + path);
            return CEV_ERR_IO;
        }
        json doc;
        in >> doc;
        for (const char* key : {"beta_d", "beta_g", "beta_e", "beta_w", "beta_c"}) {
            if (!doc.contains(key) || !doc.at(key).is_number()) {
                throw std::invalid_argument(std::string("beta file: missing numeric field ") +
                                            key);
            }
        }
        out->beta_d = doc.at("beta_d").get<double>();
        out->beta_g = doc.at("beta_g").get<double>();
        out->beta_e = doc.at("beta_e").get<double>();
        out->beta_w = doc.at("beta_w").get<double>();
        out->beta_c = doc.at("beta_c").get<double>();
        if (!to_beta(*out).finite()) throw std::invalid_argument("beta file: non-finite value");
        return CEV_OK;
    });
}

cev_status cev_beta_save_file(const char* path, const cev_beta* beta) {
    return wrap([&]() -> cev_status {
        if (!path || !beta) throw std::invalid_argument("cev_beta_save_file: NULL argument");
        json doc;
        doc["beta_d"] = beta->beta_d;
        doc["beta_g"] = beta->beta_g;
        doc["beta_e"] = beta->beta_e;
        doc["beta_w"] = beta->beta_w;
        doc["beta_c"] = beta->beta_c;
        std::ofstream out(path);
        if (!out) {
            set_error(std::string("cannot write beta file: ") + path);
            return CEV_ERR_IO;
        }
        out << doc.dump(2) << "\n";
        return CEV_OK;
    });
}

void cev_run_config_init(cev_run_config* cfg) {
    if (!cfg) return;
    cfg->sigma_g_db = 0.0;
    cfg->unguided = 0;
    cfg->channel_model = CEV_CHANNEL_CALIBRATED;
    cfg->kind = CEV_KIND_NEF;
    cfg->deadline_s = 1500.0;
    cfg->scale = 1.0;
    cfg->inflow_rate_per_min = 120.0;
    cfg->inflow_duration_s = 300.0;
    cfg->argmax_allocation = 0;
    cfg->safety_weight = 1.0;
    cfg->seed = 1;
}

void cev_replication_init(cev_replication* pol) {
    if (!pol) return;
    pol->min_reps = 10;
    pol->max_reps = 50;
    pol->confidence = 0.95;
    pol->error_percent = 0.5;
    pol->control_output = CEV_CONTROL_EVAC_TIME;
}

cev_status cev_run_single(const cev_scenario* s, const cev_beta* beta, const cev_run_config* cfg,
                          cev_metrics* out, cev_trajectory_fn traj, void* traj_user) {
    return wrap([&]() -> cev_status {
        if (!s || !beta || !cfg || !out) {
            throw std::invalid_argument("cev_run_single: NULL argument");
        }
        cellevac::RunConfig rc = to_run_config(*cfg);
        rc.collect_trajectory = traj != nullptr;
        const cellevac::RunResult r =
            cellevac::run_evacuation(s->layout, to_beta(*beta), rc, cfg->seed);
        *out = to_c_metrics(r, cfg->safety_weight);
        if (traj) {
            for (const auto& row : r.trajectory) {
                traj(traj_user, row.time_s, row.ped, row.x, row.y, row.believed_cell,
                     row.assigned_exit_id);
            }
        }
        return CEV_OK;
    });
}

cev_status cev_run_replicated(const cev_scenario* s, const cev_beta* beta,
                              const cev_run_config* cfg, const cev_replication* pol, int workers,
                              cev_metrics* out, int cap, int* n_out) {
    return wrap([&]() -> cev_status {
        if (!s || !beta || !cfg || !pol || !out || !n_out || cap <= 0) {
            throw std::invalid_argument("cev_run_replicated: bad argument");
        }
        const cellevac::ReplicationPolicy policy = to_policy(*pol);
        policy.validate();
        if (cap < policy.max_reps) {
            throw std::invalid_argument("cev_run_replicated: cap below max_reps");
        }
        const cellevac::RunConfig rc = to_run_config(*cfg);
        const cellevac::BetaConfig b = to_beta(*beta);
        std::vector<cev_metrics> store(static_cast<size_t>(policy.max_reps));

        const auto fn = [&](uint64_t rep_seed, int rep) -> double {
            const cellevac::RunResult r = cellevac::run_evacuation(s->layout, b, rc, rep_seed);
            const cev_metrics m = to_c_metrics(r, cfg->safety_weight);
            store[static_cast<size_t>(rep)] = m;
            return policy.control_output == cellevac::ControlOutput::kFitness ? m.fitness
                                                                              : m.evac_time_s;
        };
        const cellevac::ReplicationSummary summary =
            cellevac::run_replicated(policy, fn, cfg->seed, workers);
        for (int i = 0; i < summary.n; ++i) out[i] = store[static_cast<size_t>(i)];
        *n_out = summary.n;
        return CEV_OK;
    });
}

uint64_t cev_replication_seed(uint64_t base_seed, int rep) {
    return cellevac::replication_seed(base_seed, rep);
}

void cev_search_space_init(cev_search_space* space) {
    if (!space) return;
    const cellevac::SearchSpace def = cellevac::SearchSpace::defaults();
    for (int a = 0; a < 5; ++a) {
        space->lower[a] = def.axes[static_cast<size_t>(a)].lower;
        space->upper[a] = def.axes[static_cast<size_t>(a)].upper;
        space->steps[a] = def.axes[static_cast<size_t>(a)].steps;
    }
}

void cev_tabu_params_init(cev_tabu_params* params) {
    if (!params) return;
    params->tenure = 7;
    params->max_iters = 200;
    params->max_evals = 500;
}

cev_status cev_optimize(const cev_scenario* s, const cev_run_config* cfg,
                        const cev_search_space* space, const cev_tabu_params* params,
                        const cev_replication* pol, int workers, cev_trace_fn trace,
                        void* trace_user, cev_beta* best_out, double* best_fitness_out) {
    return wrap([&]() -> cev_status {
        if (!s || !cfg || !space || !params || !pol || !best_out || !best_fitness_out) {
            throw std::invalid_argument("cev_optimize: NULL argument");
        }
        cellevac::SearchSpace sp;
        for (size_t a = 0; a < 5; ++a) {
            sp.axes[a] = {space->lower[a], space->upper[a], space->steps[a]};
        }
        cellevac::ReplicationPolicy policy = to_policy(*pol);
        policy.control_output = cellevac::ControlOutput::kFitness;
        const cellevac::RunConfig rc = to_run_config(*cfg);

        const cellevac::EvalFn eval = [&](const cellevac::BetaConfig& beta,
                                          uint64_t eval_seed) -> cellevac::Evaluation {
            bool all_viable = true;
            const auto fn = [&](uint64_t rep_seed, int) -> double {
                const cellevac::RunResult r =
                    cellevac::run_evacuation(s->layout, beta, rc, rep_seed);
                return cellevac::fitness(r.metrics, cfg->safety_weight);
            };
            // A single pending-evacuation replication disqualifies the
            // candidate; stop spending budget on it.
            const auto abort = [&](double sample, int) {
                if (!std::isfinite(sample)) {
                    all_viable = false;
                    return true;
                }
                return false;
            };
            const cellevac::ReplicationSummary summary =
                cellevac::run_replicated(policy, fn, eval_seed, workers, abort);
            if (!all_viable) {
                return {std::numeric_limits<double>::infinity(), false};
            }
            return {summary.mean, true};
        };

        cellevac::TabuParams tp{params->tenure, params->max_iters, params->max_evals};
        const cellevac::OptimizeResult result = cellevac::optimize(eval, sp, tp, cfg->seed);
        if (trace) {
            for (const auto& t : result.trace) {
                const cev_beta b = from_beta(t.beta);
                trace(trace_user, t.iteration, t.eval_index, &b, t.fitness, t.viable ? 1 : 0,
                      t.best_so_far);
            }
        }
        if (!result.found) {
            set_error("no viable candidate within the optimization budget");
            return CEV_ERR_NO_SOLUTION;
        }
        *best_out = from_beta(result.best);
        *best_fitness_out = result.best_fitness;
        return CEV_OK;
    });
}

}  // extern "C"
