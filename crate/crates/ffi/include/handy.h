#ifndef HANDY_H
#define HANDY_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HandyStatus {
  HANDY_STATUS_OK = 0,
  HANDY_STATUS_NULL_ARGUMENT = 1,
  HANDY_STATUS_INVALID_UTF8 = 2,
  HANDY_STATUS_INVALID_CONFIG = 3,
  HANDY_STATUS_MINING_FAILED = 4,
  HANDY_STATUS_NOT_FOUND = 5,
  HANDY_STATUS_PANIC = 6,
} HandyStatus;

typedef struct HandyConfig HandyConfig;

typedef struct HandyLog HandyLog;

typedef struct HandyMining HandyMining;

typedef struct HandyReport HandyReport;

/**
 * Request outcome counts of a finished run.
 */
typedef struct HandySummary {
  uint64_t requests;
  uint64_t local_hits;
  uint64_t remote_hits;
  uint64_t failures;
  double hit_ratio;
  double latency_mean;
  double energy_total;
  double energy_mean;
} HandySummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failed call on this thread, or null. The
 * pointer stays valid until the next library call on the same thread.
 */
const char *handy_last_error(void);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void handy_string_free(char *s);

/**
 * A configuration holding the defaults.
 */
struct HandyConfig *handy_config_new(void);

/**
 * # Safety
 * `cfg` must come from `handy_config_new` or be null.
 */
void handy_config_free(struct HandyConfig *cfg);

/**
 * Applies `key = value` lines (comments with `#`) on top of `cfg`.
 *
 * # Safety
 * `cfg` must be a live handle and `source` a nul-terminated string.
 */
enum HandyStatus handy_config_apply(struct HandyConfig *cfg, const char *source);

/**
 * # Safety
 * `cfg` must be a live handle; `key` and `value` nul-terminated strings.
 */
enum HandyStatus handy_config_set(struct HandyConfig *cfg, const char *key, const char *value);

/**
 * Current value of `key` as text; free it with `handy_string_free`.
 *
 * # Safety
 * `cfg` must be a live handle, `key` nul-terminated, `out` writable.
 */
enum HandyStatus handy_config_get(const struct HandyConfig *cfg, const char *key, char **out);

/**
 * # Safety
 * `cfg` must be a live handle.
 */
enum HandyStatus handy_config_validate(const struct HandyConfig *cfg);

/**
 * Runs one simulation and stores the report in `*out`.
 *
 * # Safety
 * `cfg` must be a live handle and `out` writable.
 */
enum HandyStatus handy_run(const struct HandyConfig *cfg, struct HandyReport **out);

/**
 * # Safety
 * `r` must come from `handy_run` or be null.
 */
void handy_report_free(struct HandyReport *r);

/**
 * # Safety
 * `r` must be a live handle and `out` writable.
 */
enum HandyStatus handy_report_summary(const struct HandyReport *r, struct HandySummary *out);

/**
 * The report as one CSV record, optionally preceded by the header line.
 *
 * # Safety
 * `r` must be a live handle and `out` writable.
 */
enum HandyStatus handy_report_csv(const struct HandyReport *r, bool header, char **out);

/**
 * An empty request log keeping `capacity` sessions split at gaps of `zeta` s.
 */
struct HandyLog *handy_log_new(size_t capacity, double zeta);

/**
 * # Safety
 * `log` must come from `handy_log_new` or be null.
 */
void handy_log_free(struct HandyLog *log);

/**
 * # Safety
 * `log` must be a live handle.
 */
enum HandyStatus handy_log_request(struct HandyLog *log, uint32_t service, double time);

/**
 * # Safety
 * `log` must be a live handle.
 */
size_t handy_log_sessions(const struct HandyLog *log);

/**
 * Mines the log's sessions with FP-Growth.
 *
 * # Safety
 * `log` must be a live handle and `out` writable.
 */
enum HandyStatus handy_mine(const struct HandyLog *log,
                            uint32_t min_support,
                            struct HandyMining **out);

/**
 * # Safety
 * `m` must come from `handy_mine` or be null.
 */
void handy_mining_free(struct HandyMining *m);

/**
 * Number of frequent itemsets.
 *
 * # Safety
 * `m` must be a live handle.
 */
size_t handy_mining_itemsets(const struct HandyMining *m);

/**
 * Support of the itemset `items[0..len]`; `NotFound` if it is not frequent.
 *
 * # Safety
 * `m` must be a live handle, `items` readable for `len` values, `out`
 * writable.
 */
enum HandyStatus handy_mining_support(const struct HandyMining *m,
                                      const uint32_t *items,
                                      size_t len,
                                      uint32_t *out);

/**
 * Correlation score between two services, 0 when unknown.
 *
 * # Safety
 * `m` must be a live handle or null.
 */
double handy_mining_correlation(const struct HandyMining *m, uint32_t a, uint32_t b);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HANDY_H */
