#ifndef RIESZMIX_H
#define RIESZMIX_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Report flavour for `rm_report`.
 */
typedef enum RmCommand {
  RmCommand_Decide = 0,
  RmCommand_Analyze = 1,
  RmCommand_Probe = 2,
} RmCommand;

/**
 * Result code of every fallible call.
 */
typedef enum RmStatus {
  RmStatus_Ok = 0,
  RmStatus_NullPointer = 1,
  RmStatus_InvalidUtf8 = 2,
  /**
   * Problem file or argument rejected; see `rm_last_error`.
   */
  RmStatus_InputError = 3,
  RmStatus_ComputationError = 4,
  RmStatus_Panic = 5,
} RmStatus;

/**
 * Verdict of a decision, numerically equal to the CLI exit codes.
 */
typedef enum RmVerdict {
  RmVerdict_Bounded = 0,
  RmVerdict_Unbounded = 10,
  RmVerdict_OutsideTheoremScope = 20,
} RmVerdict;

/**
 * Opaque parsed problem.
 */
typedef struct RmProblem RmProblem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses a TOML problem description. On success `*out` owns a new handle.
 *
 * # Safety
 * `toml` must be a NUL-terminated string and `out` a valid pointer.
 */
enum RmStatus rm_problem_parse(const char *toml, struct RmProblem **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `p` must come from `rm_problem_parse` and not be used afterwards.
 */
void rm_problem_free(struct RmProblem *p);

/**
 * Decides boundedness.
 *
 * # Safety
 * `p` must be a live handle and `verdict` a valid pointer.
 */
enum RmStatus rm_decide(const struct RmProblem *p, enum RmVerdict *verdict);

/**
 * Builds the JSON report the CLI would write for `command` with `seed`.
 * `*json` receives a string to release with `rm_string_free`.
 *
 * # Safety
 * `p` must be a live handle and `json` a valid pointer.
 */
enum RmStatus rm_report(const struct RmProblem *p,
                        enum RmCommand command,
                        uint64_t seed,
                        char **json);

/**
 * Runs the property suites. `*passed` is set to whether all passed; when
 * `summary` is non-null it receives the printed summary.
 *
 * # Safety
 * `passed` must be valid; `summary` may be null.
 */
enum RmStatus rm_selftest(uint64_t seed, bool *passed, char **summary);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void rm_string_free(char *s);

/**
 * Message of the last failure on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *rm_last_error(void);

/**
 * Library version string (static).
 */
const char *rm_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RIESZMIX_H */
