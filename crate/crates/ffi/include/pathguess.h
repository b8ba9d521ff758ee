/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef PATHGUESS_H
#define PATHGUESS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result codes.
 */
typedef enum PgStatus {
  PG_STATUS_OK = 0,
  /*
   A required pointer was null.
   */
  PG_STATUS_NULL_POINTER = 1,
  /*
   An argument or model failed validation.
   */
  PG_STATUS_INVALID_ARGUMENT = 2,
  /*
   Text input (JSON, UTF-8) could not be parsed.
   */
  PG_STATUS_PARSE = 3,
  /*
   The sample is shorter than the span of the index sets.
   */
  PG_STATUS_NO_TRAINING_WINDOWS = 4,
  /*
   The caller's buffer is too small.
   */
  PG_STATUS_BUFFER_TOO_SMALL = 5,
  /*
   A computation failed at run time (budget, ergodicity, I/O).
   */
  PG_STATUS_RUNTIME = 6,
  /*
   A panic was caught at the boundary.
   */
  PG_STATUS_PANIC = 7,
} PgStatus;

/*
 A fitted guess rule.
 */
typedef struct PgGuessRule PgGuessRule;

/*
 A process model.
 */
typedef struct PgModel PgModel;

/*
 A categorical sample.
 */
typedef struct PgSample PgSample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failure on this thread, or null. The pointer stays
 valid until the next failing call on the same thread.
 */
const char *pg_last_error(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *pg_version(void);

/*
 Parses a model from its JSON description, e.g.
 `{"family": "markov", "transitions": [[0.9, 0.1], [0.2, 0.8]]}`.

 # Safety
 `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum PgStatus pg_model_from_json(const char *json, struct PgModel **out);

/*
 # Safety
 `model` must come from [`pg_model_from_json`] and not be used afterwards.
 */
void pg_model_free(struct PgModel *model);

/*
 Simulates `n` symbols of `model` from `seed` with the default burn-in.

 # Safety
 `model` must be a live handle and `out` a valid pointer.
 */
enum PgStatus pg_simulate(const struct PgModel *model,
                          size_t n,
                          uint64_t seed,
                          struct PgSample **out);

/*
 Builds a sample from `len` symbol ids.

 # Safety
 `ids` must point to `len` readable values and `out` be a valid pointer.
 */
enum PgStatus pg_sample_from_ids(const uint32_t *ids, size_t len, struct PgSample **out);

/*
 Number of symbols in `sample`, or 0 for a null handle.

 # Safety
 `sample` must be null or a live handle.
 */
size_t pg_sample_len(const struct PgSample *sample);

/*
 Copies the symbol ids of `sample` into `buf`. `*written` receives the
 sample length; if it exceeds `cap` nothing is copied and
 `PG_STATUS_BUFFER_TOO_SMALL` is returned.

 # Safety
 `buf` must have room for `cap` values; `written` must be valid.
 */
enum PgStatus pg_sample_ids(const struct PgSample *sample,
                            uint32_t *buf,
                            size_t cap,
                            size_t *written);

/*
 # Safety
 `sample` must come from this library and not be used afterwards.
 */
void pg_sample_free(struct PgSample *sample);

/*
 Counts the pattern pairs of `sample` for the data offsets `data` and
 guess offsets `guess`, and fits the argmax guess rule.

 # Safety
 The offset arrays must hold the given number of values; `out` must be valid.
 */
enum PgStatus pg_fit(const struct PgSample *sample,
                     const int64_t *data,
                     size_t data_len,
                     const int64_t *guess,
                     size_t guess_len,
                     struct PgGuessRule **out);

/*
 Number of symbols the rule expects in a data pattern.

 # Safety
 `rule` must be null or a live handle.
 */
size_t pg_rule_data_len(const struct PgGuessRule *rule);

/*
 Number of symbols in a guessed pattern.

 # Safety
 `rule` must be null or a live handle.
 */
size_t pg_rule_guess_len(const struct PgGuessRule *rule);

/*
 Writes the guess for data pattern `b` into `out` (which must hold
 [`pg_rule_guess_len`] values). Unseen patterns receive the fallback guess.

 # Safety
 `b` must hold `b_len` values and `out` have room for `out_cap` values.
 */
enum PgStatus pg_rule_guess(const struct PgGuessRule *rule,
                            const uint32_t *b,
                            size_t b_len,
                            uint32_t *out,
                            size_t out_cap);

/*
 Serializes the rule as JSON. Release the string with [`pg_string_free`].

 # Safety
 `rule` must be a live handle and `out` a valid pointer.
 */
enum PgStatus pg_rule_to_json(const struct PgGuessRule *rule, char **out);

/*
 Exact excess risk of `rule` under `model`.

 # Safety
 Both handles must be live and `out` valid.
 */
enum PgStatus pg_excess_risk(const struct PgModel *model,
                             const struct PgGuessRule *rule,
                             double *out);

/*
 # Safety
 `rule` must come from [`pg_fit`] and not be used afterwards.
 */
void pg_rule_free(struct PgGuessRule *rule);

/*
 # Safety
 `s` must come from this library and not be used afterwards.
 */
void pg_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PATHGUESS_H */
