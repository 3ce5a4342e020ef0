#ifndef EDGEREM_H
#define EDGEREM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum EdgeremStatus {
  EDGEREM_STATUS_OK = 0,
  EDGEREM_STATUS_NULL_ARGUMENT = 1,
  EDGEREM_STATUS_INVALID_INPUT = 2,
  EDGEREM_STATUS_VERIFICATION_FAILED = 4,
  EDGEREM_STATUS_RESOURCE_LIMIT = 5,
  EDGEREM_STATUS_PANIC = 6,
} EdgeremStatus;

// A code together with the instance it runs on.
typedef struct EdgeremCode EdgeremCode;

// A validated network instance.
typedef struct EdgeremInstance EdgeremInstance;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the last failure on this thread, or null. Valid until
// the next call into the library on the same thread.
const char *edgerem_last_error(void);

// Releases a string returned by the library.
//
// # Safety
// `s` must be null or a string returned by this library, not yet freed.
void edgerem_string_free(char *s);

// Parses and validates an instance document.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum EdgeremStatus edgerem_instance_from_json(const char *json, struct EdgeremInstance **out);

// # Safety
// `inst` must be null or a handle from this library, not yet freed.
void edgerem_instance_free(struct EdgeremInstance *inst);

// Vertex count, or 0 for a null handle.
//
// # Safety
// `inst` must be null or a live handle.
size_t edgerem_instance_num_vertices(const struct EdgeremInstance *inst);

// Edge count, or 0 for a null handle.
//
// # Safety
// `inst` must be null or a live handle.
size_t edgerem_instance_num_edges(const struct EdgeremInstance *inst);

// Instance document as JSON.
//
// # Safety
// `inst` must be a live handle; `out` must be writable.
enum EdgeremStatus edgerem_instance_to_json(const struct EdgeremInstance *inst, char **out);

// Loads a code file (table, routing or descriptor form) written for `inst`.
//
// # Safety
// `inst` must be a live handle, `json` NUL-terminated, `out` writable.
enum EdgeremStatus edgerem_code_load(const struct EdgeremInstance *inst,
                                     const char *json,
                                     struct EdgeremCode **out);

// # Safety
// `code` must be null or a handle from this library, not yet freed.
void edgerem_code_free(struct EdgeremCode *code);

// Copies the instance a code runs on into a new handle.
//
// # Safety
// `code` must be a live handle; `out` must be writable.
enum EdgeremStatus edgerem_code_instance(const struct EdgeremCode *code,
                                         struct EdgeremInstance **out);

// Measures the error of `code` on the instance it was loaded for.
// `epsilon` defaults to "0" and `mode` to "exhaustive" when null. The report
// is written even when the check fails.
//
// # Safety
// `code` must be a live handle; strings NUL-terminated or null; `report` writable.
enum EdgeremStatus edgerem_check(const struct EdgeremCode *code,
                                 const char *epsilon,
                                 const char *mode,
                                 char **report);

// Edge-removal report for adding `(u, u2)` of capacity `lambda` to `inst`.
// `rates` (comma-separated) and `code` (a code on the instance with the edge
// added) are optional.
//
// # Safety
// `inst` must be a live handle, `code` null or live, strings NUL-terminated
// (or null where optional), `report` writable.
enum EdgeremStatus edgerem_analyze(const struct EdgeremInstance *inst,
                                   const char *u,
                                   const char *u2,
                                   const char *lambda,
                                   const char *rates,
                                   const struct EdgeremCode *code,
                                   char **report);

// Applies a JSON chain of `{op, params, seed}` steps to `code`.
//
// # Safety
// `code` must be a live handle, `chain` NUL-terminated, `out` writable.
enum EdgeremStatus edgerem_transform(const struct EdgeremCode *code,
                                     const char *chain,
                                     struct EdgeremCode **out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* EDGEREM_H */
