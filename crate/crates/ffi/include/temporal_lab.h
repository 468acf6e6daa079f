#ifndef TEMPORAL_LAB_H
#define TEMPORAL_LAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TlStatus {
  TL_STATUS_OK = 0,
  TL_STATUS_NULL_POINTER = 1,
  TL_STATUS_INVALID_ARGUMENT = 2,
  TL_STATUS_PARSE = 3,
  TL_STATUS_BACKWARD_SIGNALING = 4,
  TL_STATUS_BUDGET_EXCEEDED = 5,
  TL_STATUS_UNKNOWN_PRESET = 6,
  TL_STATUS_PANIC = 7,
} TlStatus;

/**
 * A temporal scenario.
 */
typedef struct TlScenario TlScenario;

/**
 * A table of joint probabilities `P(r,s|k,l)`.
 */
typedef struct TlTable TlTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread, or null. Owned by the
 * library.
 */
const char *tl_last_error(void);

/**
 * Library version, a static string.
 */
const char *tl_version(void);

/**
 * Frees a string returned by this library.
 */
void tl_string_free(char *s);

/**
 * Parses a scenario in the JSON schema.
 */
enum TlStatus tl_scenario_from_json(const char *json, struct TlScenario **result);

/**
 * One of the built-in scenarios, by name.
 */
enum TlStatus tl_scenario_preset(const char *name, struct TlScenario **result);

void tl_scenario_free(struct TlScenario *sc);

/**
 * Dimension and numbers of settings.
 */
enum TlStatus tl_scenario_shape(const struct TlScenario *sc, size_t *dim, size_t *m, size_t *n);

/**
 * `P(r,s|k,l)` into `p[2 * r + s]`; `p` holds 4 values.
 */
enum TlStatus tl_scenario_joint(const struct TlScenario *sc, size_t k, size_t l, double *p);

/**
 * Correlators `C[k][l]` row-major into `c`, which holds `len >= m * n`
 * values.
 */
enum TlStatus tl_scenario_correlators(const struct TlScenario *sc, double *c, size_t len);

/**
 * The scenario in the JSON schema; free with [`tl_string_free`].
 */
enum TlStatus tl_scenario_to_json(const struct TlScenario *sc, char **json);

/**
 * All joint probabilities of a scenario.
 */
enum TlStatus tl_scenario_table(const struct TlScenario *sc, struct TlTable **result);

/**
 * Parses a table `{m, n, values[r][s][k][l]}`.
 */
enum TlStatus tl_table_from_json(const char *json, struct TlTable **result);

/**
 * A built-in table, or the table of a built-in scenario.
 */
enum TlStatus tl_table_preset(const char *name, struct TlTable **result);

void tl_table_free(struct TlTable *t);

enum TlStatus tl_table_get(const struct TlTable *t,
                           size_t r,
                           size_t s,
                           size_t k,
                           size_t l,
                           double *value);

enum TlStatus tl_table_to_json(const struct TlTable *t, char **json);

/**
 * Is the table a mixture of deterministic tables? `residual` may be null.
 */
enum TlStatus tl_table_hv_feasible(const struct TlTable *t, bool *feasible, double *residual);

/**
 * Builds the generalized-measurement model of the table and reports how
 * far its statistics are from the table.
 */
enum TlStatus tl_table_round_trip(const struct TlTable *t, double *residual);

/**
 * Quantum realizability of the row-major `m x n` correlators `c`.
 */
enum TlStatus tl_tsirelson_feasible(const double *c,
                                    size_t m,
                                    size_t n,
                                    bool *feasible,
                                    double *residual);

/**
 * Hidden-variable realizability of the row-major `m x n` correlators `c`.
 */
enum TlStatus tl_hv_correlator_feasible(const double *c,
                                        size_t m,
                                        size_t n,
                                        bool *feasible,
                                        double *residual);

/**
 * Capacity in bits of the binary channel with `P(+1|k) = p_plus[k]`, and
 * the optimal input distribution (2 values, may be null).
 */
enum TlStatus tl_binary_channel_capacity(double p_plus_1,
                                         double p_plus_2,
                                         double *bits,
                                         double *input);

/**
 * Hardy residual norms (3 values) and the paradox probability
 * `P(+1,+1|1,1)` of a 2x2 scenario. `satisfied` may be null.
 */
enum TlStatus tl_hardy_check(const struct TlScenario *sc,
                             double *residuals,
                             double *paradox,
                             bool *satisfied);

/**
 * Maximizes the temporal Hardy probability on `C^dim`. `best` may be null;
 * otherwise it receives the optimal scenario.
 */
enum TlStatus tl_hardy_max_temporal(size_t dim,
                                    size_t restarts,
                                    uint64_t seed,
                                    double *value,
                                    struct TlScenario **best);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TEMPORAL_LAB_H */
