#ifndef QBNET_H
#define QBNET_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every call.
typedef enum QbnetStatus {
  QBNET_STATUS_OK = 0,
  QBNET_STATUS_NULL_ARGUMENT = 1,
  QBNET_STATUS_INVALID_UTF8 = 2,
  QBNET_STATUS_PARSE = 3,
  QBNET_STATUS_INVALID_NET = 4,
  QBNET_STATUS_INVALID_QUERY = 5,
  QBNET_STATUS_CONTRADICTORY_EVIDENCE = 6,
  QBNET_STATUS_CYCLIC_GRAPH = 7,
  QBNET_STATUS_STATE_SPACE_TOO_LARGE = 8,
  QBNET_STATUS_UNKNOWN_NAME = 9,
  QBNET_STATUS_INVALID_PARAMS = 10,
  QBNET_STATUS_IO = 11,
  QBNET_STATUS_BUFFER_TOO_SMALL = 12,
  QBNET_STATUS_INTERNAL = 13,
} QbnetStatus;

// How a conditional is evaluated.
typedef enum QbnetMode {
  // Probabilities. Quantum nets are read through their parent classical net.
  QBNET_MODE_CLASSICAL = 0,
  // Amplitudes, quantum nets only.
  QBNET_MODE_QUANTUM = 1,
  // Path enumeration in the net's own kind.
  QBNET_MODE_PATH_SUM = 2,
} QbnetMode;

typedef enum QbnetKernel {
  QBNET_KERNEL_EXACT = 0,
  QBNET_KERNEL_GAUSSIAN = 1,
} QbnetKernel;

// Opaque net handle.
typedef struct QbnetNet QbnetNet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failure on this thread, or null. The pointer stays
// valid until the next failing call on the same thread.
const char *qbnet_last_error(void);

// Parses a net from its text form.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
enum QbnetStatus qbnet_net_from_text(const char *text, struct QbnetNet **out);

// Loads a net file.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a valid pointer.
enum QbnetStatus qbnet_net_from_file(const char *path, struct QbnetNet **out);

// Builds a catalog net. `params` holds `name=value` items and may be null.
//
// # Safety
// `id` must be a NUL-terminated string, `params` null or one, and `out` a
// valid pointer.
enum QbnetStatus qbnet_catalog_build(const char *id, const char *params, struct QbnetNet **out);

// Releases a net. Null is ignored.
//
// # Safety
// `net` must come from this library and not be used afterwards.
void qbnet_net_free(struct QbnetNet *net);

// Writes 1 for a quantum net and 0 for a classical one.
//
// # Safety
// `net` must be a live handle and `out` a valid pointer.
enum QbnetStatus qbnet_net_is_quantum(const struct QbnetNet *net, int *out);

// Text form of a net. Release with [`qbnet_string_free`].
//
// # Safety
// `net` must be a live handle and `out` a valid pointer.
enum QbnetStatus qbnet_net_to_text(const struct QbnetNet *net, char **out);

// Releases a string from this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be used afterwards.
void qbnet_string_free(char *s);

// Counts validation problems. When `report` is not null it receives one
// line per problem, to be released with [`qbnet_string_free`].
//
// # Safety
// `net` must be a live handle, `count` a valid pointer and `report` null
// or valid.
enum QbnetStatus qbnet_validate(const struct QbnetNet *net, size_t *count, char **report);

// `P(hypothesis | evidence)`. The hypothesis is a list of sharp
// `component=value` items; evidence items may be sets.
//
// # Safety
// `net` must be a live handle, `hypothesis` a NUL-terminated string,
// `evidence` null or one, and `out` a valid pointer.
enum QbnetStatus qbnet_conditional(const struct QbnetNet *net,
                                   enum QbnetMode mode,
                                   const char *hypothesis,
                                   const char *evidence,
                                   double *out);

// Non-additivity factor of the hypothesis components under the evidence.
// Quantum nets only.
//
// # Safety
// `net` must be a live handle, `components` a NUL-terminated string,
// `evidence` null or one, and `out` a valid pointer.
enum QbnetStatus qbnet_f_qna(const struct QbnetNet *net,
                             const char *components,
                             const char *evidence,
                             double *out);

// Weight of a constraint: the filtered probability sum for classical nets
// and the squared coherent sum for quantum nets.
//
// # Safety
// `net` must be a live handle, `constraint` null or a NUL-terminated
// string, and `out` a valid pointer.
enum QbnetStatus qbnet_chi(const struct QbnetNet *net, const char *constraint, double *out);

// Free particle on a periodic lattice of `nx` sites, started at the middle
// site and stepped `nt` times. Writes `nx` amplitudes to `out` as
// interleaved real and imaginary parts, so `out` must hold `2 * capacity`
// doubles. `len` receives `nx` even when the buffer is too small.
//
// # Safety
// `out` must point to `2 * capacity` doubles and `len` be a valid pointer.
enum QbnetStatus qbnet_lattice_propagate(size_t nx,
                                         double dx,
                                         size_t nt,
                                         double dt,
                                         enum QbnetKernel kernel,
                                         double *out,
                                         size_t capacity,
                                         size_t *len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QBNET_H */
