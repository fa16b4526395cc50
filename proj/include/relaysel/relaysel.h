/* C interface to the relay-selection planner. Every call returns an rs_status;
 * on failure rs_last_error() holds a message for the calling thread.
 * Strings returned through char** are owned by the caller (rs_string_free). */
#ifndef RELAYSEL_H
#define RELAYSEL_H

#include <stddef.h>
#include <stdint.h>

#if defined(RELAYSEL_BUILDING)
#define RS_API __attribute__((visibility("default")))
#else
#define RS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rs_status {
  RS_OK = 0,
  RS_ERR_INTERNAL = 1,
  RS_ERR_VALIDATION = 2,
  RS_ERR_CAP = 3,
  RS_ERR_IO = 4
} rs_status;

typedef enum rs_method { RS_EXACT = 0, RS_CPBVI = 1, RS_GCPBVI = 2, RS_ORACLE = 3 } rs_method;

typedef struct rs_scenario rs_scenario;
typedef struct rs_problem rs_problem;
typedef struct rs_policy rs_policy;
typedef struct rs_metrics rs_metrics;

typedef struct rs_solve_options {
  int method;          /* rs_method */
  double eps;          /* belief-set density target, used when belief_h == 0 */
  int belief_h;
  size_t belief_cap;
  size_t frontier_cap;
  size_t frontier_work;
  int prune;           /* exact solver: 0 reachable-belief Pareto, 1 dominance, 2 grid */
  int grid_resolution;
  int greedy_inclusive;
  int singleton_augmented;
} rs_solve_options;

RS_API const char* rs_version(void);
RS_API const char* rs_last_error(void);
RS_API void rs_string_free(char* s);
RS_API uint64_t rs_default_seed(void);

RS_API void rs_solve_options_default(rs_solve_options* opt);
RS_API rs_status rs_method_parse(const char* name, int* method);

/* scenarios */
RS_API rs_status rs_scenario_table1(int grid_x, int grid_y, int relays, int ues, rs_scenario** out);
RS_API rs_status rs_scenario_load(const char* path, rs_scenario** out);
RS_API rs_status rs_scenario_parse(const char* json, rs_scenario** out);
RS_API rs_status rs_scenario_save(const rs_scenario* sc, const char* path);
/* keys: eps_fix, speed (all relays), horizon, gamma, c_th, r_max, c_max */
RS_API rs_status rs_scenario_set(rs_scenario* sc, const char* key, double value);
RS_API rs_status rs_scenario_set_id(rs_scenario* sc, const char* id);
RS_API rs_status rs_scenario_json(const rs_scenario* sc, char** out);
RS_API rs_status rs_scenario_fingerprint(const rs_scenario* sc, char** out);
RS_API rs_status rs_scenario_id(const rs_scenario* sc, char** out);
RS_API rs_status rs_scenario_info(const rs_scenario* sc, int* relays, int* ues, int* regions);
RS_API void rs_scenario_free(rs_scenario* sc);

/* planning problems: one UE (ue >= 0) or the centralized joint problem (ue < 0) */
RS_API rs_status rs_problem_create(const rs_scenario* sc, int ue, rs_problem** out);
RS_API rs_status rs_problem_fingerprint(const rs_problem* pb, char** out);
RS_API void rs_problem_free(rs_problem* pb);

/* policies */
RS_API rs_status rs_solve(const rs_problem* pb, const rs_solve_options* opt, rs_policy** out);
RS_API rs_status rs_policy_save(const rs_policy* pol, const char* path);
RS_API rs_status rs_policy_load(const rs_problem* pb, const char* path, rs_policy** out);
RS_API rs_status rs_policy_report(const rs_policy* pol, char** json);
/* planned root value; cost summed over UEs */
RS_API rs_status rs_policy_value(const rs_policy* pol, double* reward, double* cost);
RS_API rs_status rs_policy_method(const rs_policy* pol, int* method);
RS_API void rs_policy_free(rs_policy* pol);

/* Monte-Carlo evaluation; reselect != 0 re-runs the constrained argmax at each belief */
RS_API rs_status rs_simulate(const rs_policy* pol, int runs, uint64_t seed, int reselect, rs_metrics** out);
RS_API rs_status rs_simulate_cellular(const rs_problem* pb, int runs, uint64_t seed, rs_metrics** out);
RS_API rs_status rs_metrics_summary(const rs_metrics* m, double* avg_reward, double* avg_cost, double* stderr_reward,
                                    double* stderr_cost, double* avg_ee);
RS_API rs_status rs_metrics_csv(const rs_metrics* m, const char* scenario_id, const char* method, int header,
                                char** out);
RS_API void rs_metrics_free(rs_metrics* m);

/* comparison table; modes is comma separated (d2d, cellular, centralized, distributed) */
RS_API rs_status rs_compare(const rs_scenario* sc, const char* modes, const int* speeds, int n_speeds, int runs,
                            uint64_t seed, const rs_solve_options* opt, char** csv);
/* complexity-model table for relays 1..k_max */
RS_API rs_status rs_bench(int k_max, int ues, int states, int beliefs, char** csv);

#ifdef __cplusplus
}
#endif

#endif
