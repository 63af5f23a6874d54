#ifndef OMNISCOPE_H
#define OMNISCOPE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

enum OmniscopeStatus
#ifdef __cplusplus
  : int32_t
#endif // __cplusplus
 {
  OMNISCOPE_STATUS_OK = 0,
  OMNISCOPE_STATUS_NULL_ARGUMENT = 1,
  OMNISCOPE_STATUS_INVALID_UTF8 = 2,
  OMNISCOPE_STATUS_PARSE_ERROR = 3,
  OMNISCOPE_STATUS_SCHEMA_ERROR = 4,
  OMNISCOPE_STATUS_UNKNOWN_WORLD = 5,
  OMNISCOPE_STATUS_UNSUPPORTED_CLASS = 6,
  OMNISCOPE_STATUS_BOUNDS_TOO_LARGE = 7,
  OMNISCOPE_STATUS_PRECONDITION = 8,
  OMNISCOPE_STATUS_INTERNAL = 9,
};
#ifndef __cplusplus
typedef int32_t OmniscopeStatus;
#endif // __cplusplus

// A parsed formula.
typedef struct OmniscopeFormula OmniscopeFormula;

// A validated epistemic structure.
typedef struct OmniscopeStructure OmniscopeStructure;

// The outcome of a satisfiability query.
typedef struct OmniscopeVerdict OmniscopeVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread; valid until the next call.
const char *omniscope_last_error(void);

// # Safety
// `s` must come from this library or be null.
void omniscope_string_free(char *s);

// # Safety
// `src` must be a NUL-terminated string; `out` must be writable.
OmniscopeStatus omniscope_formula_parse(const char *src, struct OmniscopeFormula **out);

// Canonical text of a formula, or null for a null handle.
//
// # Safety
// `f` must be a live formula handle or null.
char *omniscope_formula_render(const struct OmniscopeFormula *f);

// # Safety
// `f` must come from `omniscope_formula_parse` or be null.
void omniscope_formula_free(struct OmniscopeFormula *f);

// Loads and validates a JSON structure document.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
OmniscopeStatus omniscope_structure_load(const char *json, struct OmniscopeStructure **out);

// # Safety
// `s` must be a live structure handle; `out` must be writable.
OmniscopeStatus omniscope_structure_save(const struct OmniscopeStructure *s, char **out);

// # Safety
// `s` must come from this library or be null.
void omniscope_structure_free(struct OmniscopeStructure *s);

// Truth of `f` at `world`.
//
// # Safety
// Handles must be live, `world` NUL-terminated and `out` writable.
OmniscopeStatus omniscope_holds(const struct OmniscopeStructure *s,
                                const char *world,
                                const struct OmniscopeFormula *f,
                                bool *out);

// Decides satisfiability of `f` in the class named by `tag`.
//
// # Safety
// `f` must be live, `tag` NUL-terminated and `out` writable.
OmniscopeStatus omniscope_decide(const struct OmniscopeFormula *f,
                                 const char *tag,
                                 struct OmniscopeVerdict **out);

// # Safety
// `v` must be a live verdict handle or null.
bool omniscope_verdict_satisfiable(const struct OmniscopeVerdict *v);

// Copies the witness structure out; writes null for UNSAT verdicts.
//
// # Safety
// `v` must be live; `structure` and `world` must be writable.
OmniscopeStatus omniscope_verdict_witness(const struct OmniscopeVerdict *v,
                                          struct OmniscopeStructure **structure,
                                          char **world);

// # Safety
// `v` must come from `omniscope_decide` or be null.
void omniscope_verdict_free(struct OmniscopeVerdict *v);

// Whether `message` follows from the `n` intercepted messages.
//
// # Safety
// `intercepted` must point to `n` NUL-terminated strings.
OmniscopeStatus omniscope_dy_derives(const char *const *intercepted,
                                     size_t n,
                                     const char *message,
                                     bool *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OMNISCOPE_H */
