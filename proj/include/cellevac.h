/*
 * cellevac: cell-based crowd evacuation guidance simulator and optimizer.
 *
 * C interface to the simulation core. Handles are opaque; functions return
 * CEV_OK or an error code, with a per-thread message available through
 * cev_last_error(). Unless noted otherwise, results are deterministic for a
 * fixed seed and identical inputs.
 */
#ifndef CELLEVAC_H
#define CELLEVAC_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cev_status {
    CEV_OK = 0,
    CEV_ERR_INVALID_ARGUMENT = 1,
    CEV_ERR_SCENARIO = 2, /* schema violation or bad geometry */
    CEV_ERR_IO = 3,
    CEV_ERR_RUNTIME = 4,
    CEV_ERR_NO_SOLUTION = 5 /* optimization found no viable candidate */
} cev_status;

const char* cev_version(void);

/* Message describing the most recent failure on the calling thread. */
const char* cev_last_error(void);

/* -------- scenario -------- */

typedef struct cev_scenario cev_scenario;

/* Load a scenario document; NULL on failure (see cev_last_error). */
cev_scenario* cev_scenario_load_file(const char* path);
cev_scenario* cev_scenario_load_string(const char* json_text);
void cev_scenario_free(cev_scenario* s);

int cev_scenario_cell_count(const cev_scenario* s);
int cev_scenario_exit_count(const cev_scenario* s);
long cev_scenario_population(const cev_scenario* s);
/* Document id of the exit at a 0-based index; -1 on a bad index. */
int cev_scenario_exit_id(const cev_scenario* s, int exit_index);
/* Cell-center to gate-midpoint distance in meters; < 0 on bad ids. */
double cev_scenario_distance_m(const cev_scenario* s, int cell, int exit_index);

/* -------- controller parameters -------- */

typedef struct cev_beta {
    double beta_d; /* distance */
    double beta_g; /* group (path congestion) ratio */
    double beta_e; /* exit congestion */
    double beta_w; /* gate width */
    double beta_c; /* decision inertia (time-modulated) */
} cev_beta;

/* Named presets: optimal_0db, optimal_5db, optimal_10db, optimal_20db,
 * standard_no_cellevac. */
cev_status cev_beta_profile(const char* name, cev_beta* out);
cev_status cev_beta_load_file(const char* path, cev_beta* out);
cev_status cev_beta_save_file(const char* path, const cev_beta* beta);

/* -------- run configuration -------- */

enum { CEV_KIND_NEF = 0, CEV_KIND_EF = 1 };
enum { CEV_CHANNEL_CALIBRATED = 0, CEV_CHANNEL_LOG_NORMAL = 1 };

typedef struct cev_run_config {
    double sigma_g_db;   /* shadowing std-dev */
    int unguided;        /* 1: no guidance, per-pedestrian standard choice */
    int channel_model;   /* CEV_CHANNEL_* */
    int kind;            /* CEV_KIND_* */
    double deadline_s;   /* abort limit per run */
    double scale;        /* population and inflow-rate scale factor */
    double inflow_rate_per_min; /* per inflow gate, before scaling */
    double inflow_duration_s;   /* inflow window for EF runs */
    int argmax_allocation;      /* 1: take the most probable exit */
    double safety_weight;       /* fitness = minutes - weight * safety */
    uint64_t seed;
} cev_run_config;

void cev_run_config_init(cev_run_config* cfg);

/* -------- results -------- */

typedef struct cev_metrics {
    double evac_time_s;
    double avg_safety;
    double safety_variance;
    double mean_decision_changes;
    int viable;
    double fitness;
    double cell_error_rate; /* believed-cell mismatch fraction */
    long long initial_peds;
    long long injected_peds;
    long long evacuated_peds;
    int ef_blocked_exit; /* document ids; -1 when not applicable */
    int ef_inflow_exit_a;
    int ef_inflow_exit_b;
} cev_metrics;

/* Per-cycle trajectory sink (assigned_exit_id is the document id, -1 when
 * the pedestrian has no indication yet). */
typedef void (*cev_trajectory_fn)(void* user, double time_s, int ped, double x, double y,
                                  int believed_cell, int assigned_exit_id);

cev_status cev_run_single(const cev_scenario* s, const cev_beta* beta, const cev_run_config* cfg,
                          cev_metrics* out, cev_trajectory_fn traj, void* traj_user);

/* -------- replication -------- */

enum { CEV_CONTROL_EVAC_TIME = 0, CEV_CONTROL_FITNESS = 1 };

typedef struct cev_replication {
    int min_reps;
    int max_reps;
    double confidence;
    double error_percent; /* CI half-width limit as a percent of the mean */
    int control_output;   /* CEV_CONTROL_* */
} cev_replication;

void cev_replication_init(cev_replication* pol);

/* Replications with seeds derived from cfg->seed; fills out[0..cap) in
 * replication order and stores the achieved count in *n_out. cap must be at
 * least pol->max_reps. */
cev_status cev_run_replicated(const cev_scenario* s, const cev_beta* beta,
                              const cev_run_config* cfg, const cev_replication* pol, int workers,
                              cev_metrics* out, int cap, int* n_out);

/* Seed used for replication `rep` of a campaign with the given base seed. */
uint64_t cev_replication_seed(uint64_t base_seed, int rep);

/* -------- optimization -------- */

typedef struct cev_search_space {
    double lower[5]; /* order: beta_d, beta_g, beta_e, beta_w, beta_c */
    double upper[5];
    int steps[5]; /* grid intervals per axis */
} cev_search_space;

void cev_search_space_init(cev_search_space* space);

typedef struct cev_tabu_params {
    int tenure;
    int max_iters;
    int max_evals;
} cev_tabu_params;

void cev_tabu_params_init(cev_tabu_params* params);

typedef void (*cev_trace_fn)(void* user, int iteration, int eval_index, const cev_beta* beta,
                             double fitness, int viable, double best_so_far);

/* Tabu-search campaign over the beta box; every candidate is evaluated with
 * the replication policy (control output: fitness; candidates with any
 * non-viable replication are rejected). Emits one trace callback per fresh
 * evaluation. Returns CEV_ERR_NO_SOLUTION when no viable candidate exists
 * within the budget; the trace is still emitted. */
cev_status cev_optimize(const cev_scenario* s, const cev_run_config* cfg,
                        const cev_search_space* space, const cev_tabu_params* params,
                        const cev_replication* pol, int workers, cev_trace_fn trace,
                        void* trace_user, cev_beta* best_out, double* best_fitness_out);

#ifdef __cplusplus
}
#endif

#endif /* CELLEVAC_H */
