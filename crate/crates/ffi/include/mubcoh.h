#ifndef MUBCOH_H
#define MUBCOH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result of every fallible call.
 */
typedef enum MubcohStatus {
  MUBCOH_STATUS_OK = 0,
  MUBCOH_STATUS_NULL_POINTER = 1,
  MUBCOH_STATUS_INVALID_ARGUMENT = 2,
  MUBCOH_STATUS_UNSUPPORTED_DIMENSION = 3,
  MUBCOH_STATUS_INVALID_STATE = 4,
  MUBCOH_STATUS_DOMAIN = 5,
  MUBCOH_STATUS_PARSE = 6,
  MUBCOH_STATUS_NOT_UNBIASED = 7,
  MUBCOH_STATUS_IO = 8,
  MUBCOH_STATUS_BUFFER_TOO_SMALL = 9,
  MUBCOH_STATUS_PANIC = 10,
} MubcohStatus;

/*
 Opaque set of bases.
 */
typedef struct MubcohMubSet MubcohMubSet;

/*
 Opaque pure or mixed state.
 */
typedef struct MubcohState MubcohState;

/*
 One row of the crossover table.
 */
typedef struct MubcohTable1Row {
  uintptr_t m1;
  uintptr_t d_low;
  uintptr_t d_high;
} MubcohTable1Row;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version as a static nul-terminated string.
 */
const char *mubcoh_version(void);

/*
 Copies the calling thread's last error message into `buf`.

 Returns the number of bytes needed including the terminating nul, or 0
 when no error is recorded. Nothing is written unless the message fits.

 # Safety

 Pointer arguments follow the conventions in the crate documentation.
 */
uintptr_t mubcoh_last_error_message(char *buf, uintptr_t len);

/*
 Builds the complete set of `d + 1` bases for `d = 2` or an odd prime power.

 # Safety

 Pointer arguments follow the conventions in the crate documentation.
 */
enum MubcohStatus mubcoh_mub_construct(uintptr_t d, struct MubcohMubSet **out);

/*
 Parses a nul-terminated JSON MUB document.

 # Safety

 Pointer arguments follow the conventions in the crate documentation.
 */
enum MubcohStatus mubcoh_mub_from_json(const char *json, struct MubcohMubSet **out);

/*
 Serializes to JSON. See [`mubcoh_last_error_message`] for the buffer
 protocol: `needed` receives the size including the nul.

 # Safety

 Pointer arguments follow the conventions in the crate documentation.
 */
enum MubcohStatus mubcoh_mub_to_json(const struct MubcohMubSet *set,
                                     char *buf,
                                     uintptr_t len,
                                     uintptr_t *needed);

/*
 Keeps the first `m` bases.

 # Safety

 Pointer arguments follow the conventions in the crate documentation.
 */
enum MubcohStatus mubcoh_mub_truncated(const struct MubcohMubSet *set,
                                       uintptr_t m,
                                       struct MubcohMubSet **out);

/*
 Dimension, or 0 for a null handle.

 # Safety

 Pointer arguments follow the conventions in the crate documentation.
 */
uintptr_t mubcoh_mub_dim(const struct MubcohMubSet *set);

/*
 Number of bases, or 0 for a null handle.

 # Safety

 Pointer arguments follow the conventions in the crate documentation.
 */
uintptr_t mubcoh_mub_len(const struct MubcohMubSet *set);

/*
 Copies basis `index` as a column-major interleaved `2·d·d` array.

 # Safety

 Pointer arguments follow the conventions in the crate documentation.
 */
enum MubcohStatus mubcoh_mub_basis(const struct MubcohMubSet *set,
                                   uintptr_t index,
                                   double *out,
                                   uintptr_t len);

/*
 Worst orthonormality and unbiasedness deviations and whether both are
 within `tol`. Any output pointer may be null.

 # Safety

 Pointer arguments follow the conventions in the crate documentation.
 */
enum MubcohStatus mubcoh_mub_verify(const struct MubcohMubSet *set,
                                    double tol,
                                    double *orthonormality,
                                    double *unbiasedness,
                                    bool *passed);

/*
 Releases a set; null is ignored.

 # Safety

 Pointer arguments follow the conventions in the crate documentation.
 */
void mubcoh_mub_free(struct MubcohMubSet *set);

/*
 Pure state from `d` interleaved amplitudes (`2·d` doubles), normalized
 to within 1e-12.

 # Safety

 Pointer arguments follow the conventions in the crate documentation.
 */
enum MubcohStatus mubcoh_state_pure(uintptr_t d,
                                    const double *amplitudes,
                                    struct MubcohState **out);

/*
 Density matrix from a column-major interleaved `2·d·d` array.

 # Safety

 Pointer arguments follow the conventions in the crate documentation.
 */
enum MubcohStatus mubcoh_state_density(uintptr_t d,
                                       const double *entries,
                                       struct MubcohState **out);

/*
 Seeded Haar-random pure state.

 # Safety

 Pointer arguments follow the conventions in the crate documentation.
 */
enum MubcohStatus mubcoh_state_random_pure(uintptr_t d, uint64_t seed, struct MubcohState **out);

/*
 Seeded Ginibre state of the given rank.

 # Safety

 Pointer arguments follow the conventions in the crate documentation.
 */
enum MubcohStatus mubcoh_state_random_density(uintptr_t d,
                                              uintptr_t rank,
                                              uint64_t seed,
                                              struct MubcohState **out);

/*
 `I/d`.

 # Safety

 Pointer arguments follow the conventions in the crate documentation.
 */
enum MubcohStatus mubcoh_state_maximally_mixed(uintptr_t d, struct MubcohState **out);

/*
 Dimension, or 0 for a null handle.

 # Safety

 Pointer arguments follow the conventions in the crate documentation.
 */
uintptr_t mubcoh_state_dim(const struct MubcohState *state);

/*
 Copies the density matrix as a column-major interleaved `2·d·d` array.

 # Safety

 Pointer arguments follow the conventions in the crate documentation.
 */
enum MubcohStatus mubcoh_state_matrix(const struct MubcohState *state, double *out, uintptr_t len);

/*
 `tr ρ²`

 # Safety

 Pointer arguments follow the conventions in the crate documentation.
 */
enum MubcohStatus mubcoh_state_purity(const struct MubcohState *state, double *out);

/*
 Von Neumann entropy in nats.

 # Safety

 Pointer arguments follow the conventions in the crate documentation.
 */
enum MubcohStatus mubcoh_state_entropy(const struct MubcohState *state, double *out);

/*
 Releases a state; null is ignored.

 # Safety

 Pointer arguments follow the conventions in the crate documentation.
 */
void mubcoh_state_free(struct MubcohState *state);

/*
 Outcome probabilities in basis `basis`; `out` holds `d` doubles.

 # Safety

 Pointer arguments follow the conventions in the crate documentation.
 */
enum MubcohStatus mubcoh_probabilities(const struct MubcohMubSet *set,
                                       uintptr_t basis,
                                       const struct MubcohState *state,
                                       double *out,
                                       uintptr_t len);

/*
 Relative entropy of coherence in nats.

 # Safety

 Pointer arguments follow the conventions in the crate documentation.
 */
enum MubcohStatus mubcoh_coherence_relative_entropy(const struct MubcohMubSet *set,
                                                    uintptr_t basis,
                                                    const struct MubcohState *state,
                                                    double *out);

/*
 Geometric coherence of a pure state, `1 - max_i p_i`.

 # Safety

 Pointer arguments follow the conventions in the crate documentation.
 */
enum MubcohStatus mubcoh_coherence_geometric_pure(const struct MubcohMubSet *set,
                                                  uintptr_t basis,
                                                  const struct MubcohState *state,
                                                  double *out);

/*
 Lower and upper estimates of the geometric coherence.

 # Safety

 Pointer arguments follow the conventions in the crate documentation.
 */
enum MubcohStatus mubcoh_coherence_geometric_bounds(const struct MubcohMubSet *set,
                                                    uintptr_t basis,
                                                    const struct MubcohState *state,
                                                    double *lower,
                                                    double *upper);

/*
 Geometric coherence by multi-start optimization over incoherent states.

 # Safety

 Pointer arguments follow the conventions in the crate documentation.
 */
enum MubcohStatus mubcoh_coherence_geometric_numeric(const struct MubcohMubSet *set,
                                                     uintptr_t basis,
                                                     const struct MubcohState *state,
                                                     uintptr_t starts,
                                                     uint64_t seed,
                                                     double *out);

/*
 Right-hand side of the bound named `bound_id` (for example `"prop1"`).
 `mim6` needs concrete bases; use [`mubcoh_mim6_rhs`].

 # Safety

 Pointer arguments follow the conventions in the crate documentation.
 */
enum MubcohStatus mubcoh_bound_rhs(const char *bound_id,
                                   uintptr_t d,
                                   uintptr_t m,
                                   double purity,
                                   double entropy,
                                   double *out);

/*
 Max-overlap bound for the first `m` bases of `set` at the outcome
 `indices[t]` of each basis.

 # Safety

 Pointer arguments follow the conventions in the crate documentation.
 */
enum MubcohStatus mubcoh_mim6_rhs(const struct MubcohMubSet *set,
                                  uintptr_t m,
                                  const uintptr_t *indices,
                                  double *out);

/*
 Smallest `M ≥ 2` at which the pure-state averaged-coherence bound
 reaches `(ln d)/M`; 0 when `d < 2`.
 */
uintptr_t mubcoh_crossover_m(uintptr_t d);

/*
 Crossover intervals for `2 ≤ d ≤ d_max`. `count` receives the number of
 rows; rows are written only when `capacity` suffices.

 # Safety

 Pointer arguments follow the conventions in the crate documentation.
 */
enum MubcohStatus mubcoh_table1(uintptr_t d_max,
                                struct MubcohTable1Row *rows,
                                uintptr_t capacity,
                                uintptr_t *count);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MUBCOH_H */
