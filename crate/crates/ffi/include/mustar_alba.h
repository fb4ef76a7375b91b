#ifndef MUSTAR_ALBA_H
#define MUSTAR_ALBA_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  MA_MODE_TAME = 0,
  MA_MODE_PROPER = 1,
  MA_MODE_AUTO = 2,
} MaMode;

typedef enum {
  MA_STATUS_OK = 0,
  /**
   * The call worked but the answer is negative, e.g. a stuck run.
   */
  MA_STATUS_NEGATIVE = 1,
  MA_STATUS_INVALID_INPUT = 2,
  MA_STATUS_NULL_POINTER = 3,
  MA_STATUS_INTERNAL = 4,
} MaStatus;

typedef struct MaAlgebra MaAlgebra;

typedef struct MaInequality MaInequality;

typedef struct MaRun MaRun;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread. Valid until the next call.
 */
const char *ma_last_error(void);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void ma_string_free(char *s);

/**
 * # Safety
 * `text` must be a NUL-terminated string and `out` writable.
 */
MaStatus ma_inequality_parse(const char *text, MaInequality **out);

/**
 * # Safety
 * `i` must come from [`ma_inequality_parse`] or be null.
 */
void ma_inequality_free(MaInequality *i);

/**
 * # Safety
 * `i` must be a live handle or null.
 */
char *ma_inequality_print(const MaInequality *i);

/**
 * Writes the classification as JSON. Returns `Negative` when the level is `None`.
 *
 * # Safety
 * `i` must be a live handle and `out_json` writable.
 */
MaStatus ma_classify(const MaInequality *i, char **out_json);

/**
 * Runs the calculus in one of the [`MaMode`] modes. The handle is produced
 * for stuck runs too, in which case the status is `Negative`.
 *
 * # Safety
 * `i` must be a live handle and `out` writable.
 */
MaStatus ma_run(const MaInequality *i, int32_t mode, MaRun **out);

/**
 * # Safety
 * `r` must come from [`ma_run`] or be null.
 */
void ma_run_free(MaRun *r);

/**
 * # Safety
 * `r` must be a live handle or null.
 */
bool ma_run_succeeded(const MaRun *r);

/**
 * # Safety
 * `r` must be a live handle or null.
 */
char *ma_run_json(const MaRun *r);

/**
 * # Safety
 * `r` must be a live handle or null.
 */
char *ma_run_text(const MaRun *r, bool with_trace);

/**
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable.
 */
MaStatus ma_algebra_load_json(const char *json, MaAlgebra **out);

size_t ma_battery_len(void);

/**
 * # Safety
 * `out` must be writable.
 */
MaStatus ma_battery_get(size_t index, MaAlgebra **out);

/**
 * # Safety
 * `a` must come from this library or be null.
 */
void ma_algebra_free(MaAlgebra *a);

/**
 * # Safety
 * `a` must be a live handle or null.
 */
size_t ma_algebra_size(const MaAlgebra *a);

/**
 * # Safety
 * Handles must be live and `valid` writable.
 */
MaStatus ma_check_inequality(const MaAlgebra *a, const MaInequality *i, bool *valid);

/**
 * Validity of the pure system of a successful run.
 *
 * # Safety
 * Handles must be live and `valid` writable.
 */
MaStatus ma_check_run(const MaAlgebra *a, const MaRun *r, bool *valid);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* MUSTAR_ALBA_H */
