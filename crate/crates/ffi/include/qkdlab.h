#ifndef QKDLAB_H
#define QKDLAB_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define QKD_PRESET_3DEB 0

#define QKD_PRESET_UNIVERSAL 1

#define QKD_PRESET_2MUB 2

#define QKD_PRESET_QUBIT 3

#define QKD_LOG_BASE_2 0

#define QKD_LOG_BASE_3 1

#define QKD_LOG_BASE_E 2

/**
 * Result code of every call.
 */
typedef enum QkdStatus {
  QKD_STATUS_OK = 0,
  QKD_STATUS_NULL_POINTER = 1,
  QKD_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The optimizer did not converge or found no crossing.
   */
  QKD_STATUS_NUMERICAL = 3,
  /**
   * A Rust panic was caught at the boundary.
   */
  QKD_STATUS_PANIC = 4,
} QkdStatus;

/**
 * Cloner of the (v, x, y, z) family.
 */
typedef struct QkdCloner QkdCloner;

/**
 * Simulation settings.
 */
typedef struct QkdSimConfig QkdSimConfig;

/**
 * Outcome of one simulated session.
 */
typedef struct QkdSimResult QkdSimResult;

typedef struct QkdInfoReport {
  double f_a;
  double f_b;
  double d_a1;
  double d_a2;
  double d_b1;
  double d_b2;
  /**
   * NaN when F_A < 1/3.
   */
  double i_ab;
  /**
   * NaN unless y = z.
   */
  double i_ae;
  double r_bound;
} QkdInfoReport;

typedef struct QkdCrossing {
  double f_a_star;
  double error_rate;
  double i_ab;
  double i_ae;
  double residual;
  /**
   * Free parameters of the preset, first `n_params` used.
   */
  double params[4];
  uint32_t n_params;
  uint32_t iterations;
} QkdCrossing;

typedef struct QkdSymmetric {
  double fidelity;
  double v;
  double x;
  double y;
  double f_a;
  double f_b;
} QkdSymmetric;

typedef struct QkdThresholds {
  double visibility_threshold;
  double bell_fidelity_threshold;
  double qubit_threshold;
  double reported_security_threshold;
  double reference_visibility;
  double reference_visibility_fidelity;
} QkdThresholds;

typedef struct QkdSimSummary {
  uint64_t rounds;
  uint64_t seed;
  uint64_t sifted_count;
  double sifted_fraction;
  /**
   * Zero when nothing was sifted; `qber` is then NaN.
   */
  uint8_t has_qber;
  double qber;
  double qber_std_error;
  /**
   * Set for cloning attacks.
   */
  uint8_t has_eve_information;
  double empirical_i_ae;
  /**
   * `P(a = b | i, j)`, NaN for pairs never drawn.
   */
  double basis_correlation[4][4];
} QkdSimSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string. Do not free.
 */
const char *qkd_version(void);

/**
 * Copy of the calling thread's last error message, or NULL if the last
 * call succeeded. Release with [`qkd_string_free`].
 */
char *qkd_last_error_message(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed already.
 */
void qkd_string_free(char *s);

/**
 * Creates a cloner. With `normalize` nonzero the parameters are rescaled
 * to unit norm; otherwise they must already be normalized within 1e-6.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum QkdStatus qkd_cloner_new(double v,
                              double x,
                              double y,
                              double z,
                              uint8_t normalize,
                              struct QkdCloner **out);

/**
 * # Safety
 * `cloner` must come from [`qkd_cloner_new`] or be NULL.
 */
void qkd_cloner_free(struct QkdCloner *cloner);

/**
 * Writes the normalized parameters of a cloner.
 *
 * # Safety
 * `cloner` must be a live handle and `out` valid for 4 doubles.
 */
enum QkdStatus qkd_cloner_params(const struct QkdCloner *cloner, double *out);

/**
 * Fidelities, disturbances and information figures of a cloner.
 *
 * # Safety
 * `cloner` must be a live handle and `out` valid for writes.
 */
enum QkdStatus qkd_cloner_report(const struct QkdCloner *cloner,
                                 uint32_t base,
                                 struct QkdInfoReport *out);

/**
 * Crossing point of Bob's and Eve's information for a preset.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum QkdStatus qkd_crossing(uint32_t preset_code, uint32_t base, struct QkdCrossing *out);

/**
 * Cloner with equal fidelities for Bob and Eve (3DEB preset only).
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum QkdStatus qkd_symmetric_point(uint32_t preset_code, struct QkdSymmetric *out);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum QkdStatus qkd_thresholds(struct QkdThresholds *out);

/**
 * New configuration with an ideal channel and uniform basis choice.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum QkdStatus qkd_sim_config_new(uint64_t rounds, uint64_t seed, struct QkdSimConfig **out);

/**
 * Parses a JSON configuration (same format as the command-line tool).
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` valid for writes.
 */
enum QkdStatus qkd_sim_config_from_json(const char *json, struct QkdSimConfig **out);

/**
 * # Safety
 * `config` must come from this library or be NULL.
 */
void qkd_sim_config_free(struct QkdSimConfig *config);

/**
 * Sets the channel from its text form: `ideal`, `depolarizing:V`,
 * `clone:optimal` or `clone:v,x,y[,z]`.
 *
 * # Safety
 * `config` must be a live handle and `channel` a NUL-terminated string.
 */
enum QkdStatus qkd_sim_config_set_channel(struct QkdSimConfig *config, const char *channel);

/**
 * Uses a cloner handle as Eve's attack.
 *
 * # Safety
 * Both handles must be live.
 */
enum QkdStatus qkd_sim_config_set_attack(struct QkdSimConfig *config,
                                         const struct QkdCloner *cloner);

/**
 * Basis-choice weights, four per party. Either pointer may be NULL to keep
 * the current weights.
 *
 * # Safety
 * `config` must be live; non-NULL weight pointers must hold 4 doubles.
 */
enum QkdStatus qkd_sim_config_set_weights(struct QkdSimConfig *config,
                                          const double *alice,
                                          const double *bob);

/**
 * Runs a session.
 *
 * # Safety
 * `config` must be live and `out` valid for writes.
 */
enum QkdStatus qkd_simulate(const struct QkdSimConfig *config, struct QkdSimResult **out);

/**
 * # Safety
 * `result` must come from [`qkd_simulate`] or be NULL.
 */
void qkd_sim_result_free(struct QkdSimResult *result);

/**
 * # Safety
 * `result` must be live and `out` valid for writes.
 */
enum QkdStatus qkd_sim_result_summary(const struct QkdSimResult *result, struct QkdSimSummary *out);

/**
 * Full result as JSON. Release with [`qkd_string_free`].
 *
 * # Safety
 * `result` must be live and `out` valid for writes.
 */
enum QkdStatus qkd_sim_result_to_json(const struct QkdSimResult *result, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QKDLAB_H */
