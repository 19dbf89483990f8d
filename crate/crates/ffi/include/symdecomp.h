#ifndef SYMDECOMP_H
#define SYMDECOMP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SdStatus {
  SD_STATUS_OK = 0,
  SD_STATUS_INVALID_INPUT = 1,
  SD_STATUS_QUBIT_MISMATCH = 2,
  SD_STATUS_WRONG_QUBIT_COUNT = 3,
  SD_STATUS_SINGULAR_MAP = 4,
  SD_STATUS_ZERO_STATE = 5,
  SD_STATUS_NON_GENERIC = 6,
  SD_STATUS_SOLVER_FAILURE = 7,
  SD_STATUS_TIE_BREAK_UNSTABLE = 8,
  SD_STATUS_INSUFFICIENT_TERMS = 9,
  SD_STATUS_PARSE_ERROR = 10,
  SD_STATUS_NULL_POINTER = 11,
  SD_STATUS_OUT_OF_RANGE = 12,
  SD_STATUS_PANIC = 13,
} SdStatus;

typedef enum SdMode {
  SD_MODE_LU = 0,
  SD_MODE_IL = 1,
} SdMode;

/**
 * Opaque coherent state decomposition with its diagnostics.
 */
typedef struct SdDecomposition SdDecomposition;

/**
 * Opaque symmetric state.
 */
typedef struct SdState SdState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer is
 * valid until the next library call on the same thread.
 */
const char *sd_last_error_message(void);

/**
 * Library version as a static nul-terminated string.
 */
const char *sd_version(void);

/**
 * Creates a state from `n_qubits + 1` Dicke amplitudes given as separate
 * real and imaginary arrays. The amplitudes are stored as given.
 *
 * # Safety
 * `re` and `im` must point to `n_qubits + 1` readable doubles; `out` must be
 * writable.
 */
enum SdStatus sd_state_new(size_t n_qubits,
                           const double *re,
                           const double *im,
                           struct SdState **out);

/**
 * Parses the text state file format, normalizing as the command-line tool does.
 *
 * # Safety
 * `text` must be a nul-terminated string; `out` must be writable.
 */
enum SdStatus sd_state_parse(const char *text, struct SdState **out);

/**
 * `(|0...0> + |1...1>)/sqrt(2)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum SdStatus sd_state_ghz(size_t n_qubits, struct SdState **out);

/**
 * Releases a state. Null is ignored.
 *
 * # Safety
 * `state` must be null or a handle not yet freed.
 */
void sd_state_free(struct SdState *state);

/**
 * Number of qubits, or 0 for a null handle.
 *
 * # Safety
 * `state` must be null or a live handle.
 */
size_t sd_state_n_qubits(const struct SdState *state);

/**
 * Dicke amplitude `k`.
 *
 * # Safety
 * `state` must be a live handle; `re` and `im` must be writable.
 */
enum SdStatus sd_state_amplitude(const struct SdState *state, size_t k, double *re, double *im);

/**
 * Decomposes `state` into spin coherent states; `tol` bounds the
 * reconstruction fidelity deficit.
 *
 * # Safety
 * `state` must be a live handle; `out` must be writable.
 */
enum SdStatus sd_decompose(const struct SdState *state, double tol, struct SdDecomposition **out);

/**
 * Releases a decomposition. Null is ignored.
 *
 * # Safety
 * `d` must be null or a handle not yet freed.
 */
void sd_decomposition_free(struct SdDecomposition *d);

/**
 * Number of terms, or 0 for a null handle.
 *
 * # Safety
 * `d` must be null or a live handle.
 */
size_t sd_decomposition_len(const struct SdDecomposition *d);

/**
 * Whether the first two nodes are antipodal.
 *
 * # Safety
 * `d` must be null or a live handle.
 */
bool sd_decomposition_is_paired(const struct SdDecomposition *d);

/**
 * Term `i`: coefficient and node angles `(theta, phi)`.
 *
 * # Safety
 * `d` must be a live handle; all output pointers must be writable.
 */
enum SdStatus sd_decomposition_term(const struct SdDecomposition *d,
                                    size_t i,
                                    double *re,
                                    double *im,
                                    double *theta,
                                    double *phi);

/**
 * Fidelity deficit of the reconstruction, or NaN for a null handle.
 *
 * # Safety
 * `d` must be null or a live handle.
 */
double sd_decomposition_fidelity_deficit(const struct SdDecomposition *d);

/**
 * Schmidt rank `r` (terms above `zero_tol`) and measure `log2 r`.
 *
 * # Safety
 * `d` must be a live handle; `rank` and `measure` must be writable.
 */
enum SdStatus sd_schmidt_measure(const struct SdDecomposition *d,
                                 double zero_tol,
                                 size_t *rank,
                                 double *measure);

/**
 * Whether two states share an LU or IL canonical form within `tol`.
 *
 * # Safety
 * `a` and `b` must be live handles; `out` must be writable.
 */
enum SdStatus sd_equivalent(const struct SdState *a,
                            const struct SdState *b,
                            enum SdMode mode,
                            double tol,
                            bool *out);

/**
 * Three-qubit tangle: the hyperdeterminant value and the two closed-form
 * values, which are NaN when the state has no two-term decomposition.
 *
 * # Safety
 * `state` must be a live handle; the output pointers must be writable.
 */
enum SdStatus sd_three_tangle(const struct SdState *state,
                              double *tau_oracle,
                              double *tau_decomp,
                              double *tau_canonical);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SYMDECOMP_H */
