#ifndef COALP_H
#define COALP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CoalpFormat {
  COALP_FORMAT_ASCII = 0,
  COALP_FORMAT_DOT = 1,
  COALP_FORMAT_JSON = 2,
} CoalpFormat;

// Result of every fallible call.
typedef enum CoalpStatus {
  COALP_STATUS_OK = 0,
  // A required pointer argument was NULL.
  COALP_STATUS_NULL_ARGUMENT = 1,
  // A string argument was not valid UTF-8.
  COALP_STATUS_INVALID_UTF8 = 2,
  // Program or goal text did not parse, or used a symbol inconsistently.
  COALP_STATUS_PARSE_ERROR = 3,
  // A goal or arrow did not fit the required arity.
  COALP_STATUS_ARITY_ERROR = 4,
  // A bound or other argument was out of range.
  COALP_STATUS_INVALID_ARGUMENT = 5,
  // The library panicked; this is a bug.
  COALP_STATUS_INTERNAL = 6,
} CoalpStatus;

typedef enum CoalpStrategy {
  COALP_STRATEGY_DEPTH_FIRST = 0,
  COALP_STRATEGY_ITERATIVE_DEEPENING = 1,
} CoalpStrategy;

typedef enum CoalpVerdict {
  COALP_VERDICT_PROVED = 0,
  COALP_VERDICT_FAILED = 1,
  COALP_VERDICT_UNKNOWN = 2,
} CoalpVerdict;

// A parsed program.
typedef struct CoalpProgram CoalpProgram;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses program text. On success `*out` receives a handle owned by the
// caller.
//
// # Safety
// `source` must be NULL or a NUL-terminated string; `out` must be NULL or
// valid for writes.
enum CoalpStatus coalp_program_parse(const char *source, struct CoalpProgram **out);

// Releases a program handle. NULL is ignored.
//
// # Safety
// `program` must be NULL or a handle from [`coalp_program_parse`] that has
// not been freed.
void coalp_program_free(struct CoalpProgram *program);

// Number of clauses, or 0 for NULL.
//
// # Safety
// `program` must be NULL or a live handle.
size_t coalp_program_clause_count(const struct CoalpProgram *program);

// Term-matching proof search for `goal` with at most `depth` resolution
// layers. When the verdict is `Proved` and `proof` is not NULL, `*proof`
// receives the proof tree as ASCII text; otherwise it is set to NULL.
//
// # Safety
// `program` must be a live handle, `goal` a NUL-terminated string,
// `verdict` valid for writes and `proof` NULL or valid for writes.
enum CoalpStatus coalp_prove(const struct CoalpProgram *program,
                             const char *goal,
                             size_t depth,
                             enum CoalpVerdict *verdict,
                             char **proof);

// SLD resolution. `*answers` receives one answer substitution per line,
// written with the goal's variable names; `*exhausted` is set when the
// step bound cut the search short.
//
// # Safety
// `program` must be a live handle, `goal` a NUL-terminated string, and
// `answers` and `exhausted` valid for writes.
enum CoalpStatus coalp_solve(const struct CoalpProgram *program,
                             const char *goal,
                             size_t max_steps,
                             size_t max_answers,
                             enum CoalpStrategy strategy,
                             char **answers,
                             bool *exhausted);

// Renders the coinductive tree of `goal` cut after `depth` or-layers.
//
// # Safety
// `program` must be a live handle, `goal` a NUL-terminated string and
// `out` valid for writes.
enum CoalpStatus coalp_tree(const struct CoalpProgram *program,
                            const char *goal,
                            size_t depth,
                            enum CoalpFormat format,
                            char **out);

// Writes `non-existential` or one line per clause with body-only
// variables.
//
// # Safety
// `program` must be a live handle and `out` valid for writes.
enum CoalpStatus coalp_classify(const struct CoalpProgram *program, char **out);

// Message for the last failed call on this thread, or NULL after a
// successful call. The pointer stays valid until the next call into the
// library on this thread.
const char *coalp_last_error(void);

// Releases a string returned by the library. NULL is ignored.
//
// # Safety
// `s` must be NULL or a string from this library that has not been freed.
void coalp_string_free(char *s);

// Library version, a static string.
const char *coalp_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COALP_H */
