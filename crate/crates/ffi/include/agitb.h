/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef AGITB_H
#define AGITB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define AGITB_OK 0

/**
 * The run completed and at least one axiom test did not pass.
 */
#define AGITB_AXIOM_FAILED 1

#define AGITB_USAGE 2

/**
 * The model lacks a capability the harness needs (fingerprint or clone).
 */
#define AGITB_INCOMPATIBLE 3

#define AGITB_NULL_POINTER 4

#define AGITB_PANIC 5

/**
 * Opaque model factory.
 */
typedef struct AgitbFactory AgitbFactory;

/**
 * Opaque run report.
 */
typedef struct AgitbReport AgitbReport;

/**
 * Run parameters. Fields not listed keep their defaults.
 */
typedef struct AgitbConfig {
  uint32_t input_size;
  uint32_t pattern_period;
  /**
   * Zero selects the value implied by `smoke`.
   */
  uint64_t simulated_infinity;
  uint32_t runs_per_trial;
  uint32_t rho;
  uint64_t master_seed;
  bool smoke;
  bool early_exit;
  bool skip_timing;
  /**
   * Worker threads; zero uses all cores.
   */
  uint32_t threads;
} AgitbConfig;

/**
 * Callbacks implementing a model. `new_blank` may be called from several
 * threads at once, and distinct states may be driven concurrently; one
 * state is only ever used by one thread at a time.
 */
typedef struct AgitbModelVTable {
  /**
   * Fresh uninformed state. Must not return null.
   */
  void *(*new_blank)(void *user_data);
  uint64_t (*predict)(const void *state);
  void (*update)(void *state, uint64_t input);
  /**
   * Writes 32 bytes to `out`. Returns false when unsupported.
   */
  bool (*fingerprint)(const void *state, uint8_t *out);
  /**
   * Independent copy, or null when unsupported.
   */
  void *(*clone)(const void *state);
  void (*destroy)(void *state);
} AgitbModelVTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next failing call on the same thread.
 */
const char *agitb_last_error_message(void);

/**
 * Fills `out` with the full-scale defaults.
 */
int32_t agitb_config_default(struct AgitbConfig *out);

/**
 * Built-in fixture (e.g. `"memoriser_bounded"`) or registered model by
 * name.
 */
int32_t agitb_factory_fixture(const char *name, uint32_t input_bits, struct AgitbFactory **out);

/**
 * Factory over caller-supplied callbacks. `new_blank`, `predict`,
 * `update` and `destroy` are required; `fingerprint` and `clone` may be
 * null, in which case runs fail with `AGITB_INCOMPATIBLE`. `user_data`
 * must outlive the factory.
 */
int32_t agitb_factory_from_callbacks(const struct AgitbModelVTable *vtable,
                                     void *user_data,
                                     const char *descriptor,
                                     uint32_t input_bits,
                                     struct AgitbFactory **out);

void agitb_factory_free(struct AgitbFactory *factory);

/**
 * Runs all twelve tests. On `AGITB_OK` or `AGITB_AXIOM_FAILED` a report is
 * stored in `out`; on any other status `out` is left untouched.
 */
int32_t agitb_run_all(const struct AgitbFactory *factory,
                      const struct AgitbConfig *config,
                      struct AgitbReport **out);

bool agitb_report_passed(const struct AgitbReport *report);

/**
 * 1 if test `axiom_id` passed, 0 if it failed or was skipped, -1 if the
 * report is null or has no such test.
 */
int32_t agitb_report_test_passed(const struct AgitbReport *report, uint32_t axiom_id);

/**
 * JSON text of the report; release with `agitb_string_free`.
 */
char *agitb_report_to_json(const struct AgitbReport *report);

void agitb_report_free(struct AgitbReport *report);

void agitb_string_free(char *s);

/**
 * Number of admissible sequences as a decimal string, or null on invalid
 * arguments. Release with `agitb_string_free`.
 */
char *agitb_count_admissible(uint32_t input_bits, uint32_t length, bool cyclic);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AGITB_H */
