#ifndef QSAFE_H
#define QSAFE_H

/* C interface to the quantized collision-avoidance verifier/falsifier.
 * Every fallible call returns qsafe_status; the matching human-readable
 * message stays on the context and is read back with qsafe_last_error.
 * A context is not thread-safe; qsafe_cancel and qsafe_progress are the
 * only calls safe to issue concurrently with a running operation. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qsafe_status {
  QSAFE_OK = 0,
  QSAFE_ERR_INVALID_ARGUMENT = 1,
  QSAFE_ERR_PARSE = 2,
  QSAFE_ERR_IO = 3,
  QSAFE_ERR_EMPTY_SET = 4,
  QSAFE_ERR_DEGENERATE = 5,
  QSAFE_ERR_LP_FAILURE = 6,
  QSAFE_ERR_MISSING_NETWORK = 7,
  QSAFE_ERR_BUFFER_TOO_SMALL = 8,
  QSAFE_ERR_STATE = 9, /* call-order violation, e.g. run before networks load */
  QSAFE_ERR_UNKNOWN = 10
} qsafe_status;

typedef struct qsafe_ctx qsafe_ctx;

const char* qsafe_version(void);

qsafe_ctx* qsafe_ctx_new(void);
void qsafe_ctx_free(qsafe_ctx* ctx);

/* Message of the most recent failure on this context ("" when none). The
 * pointer stays valid until the next call on the same context. */
const char* qsafe_last_error(const qsafe_ctx* ctx);

/* Options use the config-file keys: nnet_dir, q_pos, q_vel, q_theta_deg,
 * vown_min, vown_max, vint_min, vint_max, tau_dot (0|-1|both), jobs, seed,
 * out, resume, max_depth, pos_floor, vel_floor, theta_floor_deg,
 * argmax_scores, max_steps, mc_batch. */
qsafe_status qsafe_set_option(qsafe_ctx* ctx, const char* key, const char* value);

/* key=value file with '#' comments; later qsafe_set_option calls override. */
qsafe_status qsafe_load_config(qsafe_ctx* ctx, const char* path);

/* Loads the 45-network pack from dir, or from the nnet_dir option when dir
 * is NULL or empty. */
qsafe_status qsafe_load_networks(qsafe_ctx* ctx, const char* dir);
int qsafe_networks_loaded(const qsafe_ctx* ctx);

/* Cooperative cancellation of a running verify/falsify; safe from a signal
 * handler. The flag resets when the next operation starts. */
void qsafe_cancel(qsafe_ctx* ctx);
int qsafe_cancelled(const qsafe_ctx* ctx);

/* Partitions finished by the operation currently running (or last run). */
uint64_t qsafe_progress(const qsafe_ctx* ctx);

qsafe_status qsafe_partition_count(qsafe_ctx* ctx, uint64_t* count);
qsafe_status qsafe_partition_descriptor(qsafe_ctx* ctx, uint64_t index,
                                        char* buf, size_t cap);

typedef struct qsafe_verify_summary {
  uint64_t total;
  uint64_t safe;
  uint64_t unsafe_count;
  uint64_t inconclusive;
  uint64_t resumed;
  double wall_seconds;
} qsafe_verify_summary;

/* Checks every partition. Writes <out>/verify_report.json and
 * <out>/unsafe.jsonl; when the resume option names a file, its descriptors
 * are skipped as already safe and newly proven ones are appended to it as
 * they finish. */
qsafe_status qsafe_verify(qsafe_ctx* ctx, qsafe_verify_summary* out);

typedef enum qsafe_falsify_result {
  QSAFE_FALSIFY_CONFIRMED = 0,
  QSAFE_FALSIFY_QUANTIZED_SAFE = 1,
  QSAFE_FALSIFY_FLOOR_REACHED = 2,
  QSAFE_FALSIFY_CANCELLED = 3
} qsafe_falsify_result;

typedef struct qsafe_falsify_summary {
  int result; /* qsafe_falsify_result */
  int rounds;
  uint64_t partitions_checked;
  uint64_t unsafe_found;
  uint64_t replays;
  int trace_steps;     /* rows in the confirmed trace, 0 otherwise */
  double final_rho_ft; /* last-row separation when confirmed, else -1 */
  double wall_seconds;
} qsafe_falsify_summary;

/* Counterexample search with quantization refinement. Writes
 * <out>/falsify_outcome.json and, when confirmed,
 * <out>/counterexample.{csv,json,svg}. */
qsafe_status qsafe_falsify(qsafe_ctx* ctx, qsafe_falsify_summary* out);

typedef struct qsafe_sim_summary {
  int stop; /* 0 collision, 1 step budget exhausted, 2 diverged */
  int steps;
  int network_evals;
  double final_rho_ft;
  double final_tau;
} qsafe_sim_summary;

/* One closed-loop rollout from a polar encounter (angles in radians);
 * nonzero quantized selects cell-center controller inputs. Writes
 * <out>/trace.{csv,json,svg}. When csv_text is non-NULL it receives a heap
 * copy of the CSV (release with qsafe_free). */
qsafe_status qsafe_simulate(qsafe_ctx* ctx, double rho_ft, double theta_rad,
                            double psi_rad, double v_own, double v_int,
                            double tau0, int tau_dot, int quantized,
                            qsafe_sim_summary* out, char** csv_text);

typedef struct qsafe_mc_summary {
  uint64_t samples;
  uint64_t collisions;
  double wall_seconds;
} qsafe_mc_summary;

/* mc_batch seeded encounter samples on the exact closed loop; writes
 * <out>/montecarlo.json with every colliding case. */
qsafe_status qsafe_montecarlo(qsafe_ctx* ctx, int tau_dot, qsafe_mc_summary* out);

void qsafe_free(char* p);

#ifdef __cplusplus
}
#endif

#endif /* QSAFE_H */
