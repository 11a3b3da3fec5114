#ifndef TNCB_H
#define TNCB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Initial tree: worst-case comb in bag order.
#define TNCB_INIT_RIGHT 0

// Initial tree: random shape from the seed.
#define TNCB_INIT_RANDOM 1

// Initial tree: mirror the given bracketing.
#define TNCB_INIT_MIRROR 2

// Keep rewriting past n-1 steps.
#define TNCB_FLAG_UNBOUNDED 1

// First matching rule wins on ambiguous combinations.
#define TNCB_FLAG_LENIENT 2

typedef enum TncbStatus {
  TNCB_STATUS_OK = 0,
  TNCB_STATUS_NULL_ARGUMENT = 1,
  TNCB_STATUS_INVALID_UTF8 = 2,
  TNCB_STATUS_PARSE_ERROR = 3,
  TNCB_STATUS_INPUT_ERROR = 4,
  TNCB_STATUS_ASSUMPTION_VIOLATION = 5,
  TNCB_STATUS_PANIC = 6,
} TncbStatus;

typedef struct TncbBag TncbBag;

typedef struct TncbGrammar TncbGrammar;

typedef struct TncbResult TncbResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty if none. Valid
// until the next failing call on the same thread.
const char *tncb_last_error(void);

// Library version, static storage.
const char *tncb_version(void);

// Parse grammar source text.
//
// # Safety
// `source` must be a NUL-terminated string and `out` a valid pointer.
enum TncbStatus tncb_grammar_parse(const char *source, struct TncbGrammar **out);

// # Safety
// `grammar` must come from `tncb_grammar_parse` and not be used again;
// null is ignored.
void tncb_grammar_free(struct TncbGrammar *grammar);

// Parse a bag from its JSON form.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum TncbStatus tncb_bag_parse_json(const char *json, struct TncbBag **out);

// Number of signs in the bag; 0 for null.
//
// # Safety
// `bag` must be null or a live handle.
size_t tncb_bag_len(const struct TncbBag *bag);

// # Safety
// `bag` must come from `tncb_bag_parse_json` and not be used again; null
// is ignored.
void tncb_bag_free(struct TncbBag *bag);

// Run the generator. `bracketing` is only read for `TNCB_INIT_MIRROR`
// and may otherwise be null. `flags` is a combination of `TNCB_FLAG_*`.
// A failed generation with leftover fragments is still `Ok`; inspect the
// result.
//
// # Safety
// `grammar` and `bag` must be live handles, `bracketing` null or a
// NUL-terminated string, `out` a valid pointer.
enum TncbStatus tncb_generate(const struct TncbGrammar *grammar,
                              const struct TncbBag *bag,
                              uint32_t init,
                              uint64_t seed,
                              const char *bracketing,
                              uint32_t flags,
                              struct TncbResult **out);

// # Safety
// `r` must be null or a live result handle.
bool tncb_result_succeeded(const struct TncbResult *r);

// Realized sentence, or null when generation failed.
//
// # Safety
// `r` must be null or a live result handle.
const char *tncb_result_orth(const struct TncbResult *r);

// # Safety
// `r` must be null or a live result handle.
size_t tncb_result_rewrites(const struct TncbResult *r);

// # Safety
// `r` must be null or a live result handle.
uint64_t tncb_result_combine_calls(const struct TncbResult *r);

// Number of leftover fragments; 0 on success.
//
// # Safety
// `r` must be null or a live result handle.
size_t tncb_result_fragment_count(const struct TncbResult *r);

// Fragment `i` in scan order, or null when out of range.
//
// # Safety
// `r` must be null or a live result handle.
const char *tncb_result_fragment(const struct TncbResult *r, size_t i);

// Move trace as a JSON array.
//
// # Safety
// `r` must be null or a live result handle.
const char *tncb_result_trace_json(const struct TncbResult *r);

// # Safety
// `r` must come from `tncb_generate` and not be used again; null is
// ignored.
void tncb_result_free(struct TncbResult *r);

// Every realization of the bag, as a JSON array of strings, by exhaustive
// search (bags of at most 10 signs). Release `*out` with
// `tncb_string_free`.
//
// # Safety
// `grammar` and `bag` must be live handles, `out` a valid pointer.
enum TncbStatus tncb_realizations_json(const struct TncbGrammar *grammar,
                                       const struct TncbBag *bag,
                                       char **out);

// # Safety
// `s` must come from a `char **` out parameter of this library and not be
// used again; null is ignored.
void tncb_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TNCB_H */
