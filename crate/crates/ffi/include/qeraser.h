#ifndef QERASER_H
#define QERASER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QeStatus {
  QE_STATUS_OK = 0,
  QE_STATUS_NULL_POINTER = 1,
  QE_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Input is not a valid correlation matrix, state or decomposition.
   */
  QE_STATUS_INVALID = 3,
  QE_STATUS_NO_DECOMPOSITION = 4,
  QE_STATUS_VERIFICATION_FAILED = 5,
  QE_STATUS_RECOVERY_FAILED = 6,
  QE_STATUS_PANIC = 7,
} QeStatus;

typedef struct QeChannel QeChannel;

typedef struct QeDecomposition QeDecomposition;

typedef struct QeState QeState;

/**
 * Entropies in bits. Fields tied to a decomposition are NaN, or -1 for
 * flags, when none was supplied.
 */
typedef struct QeBounds {
  size_t dim;
  size_t rank;
  double s_xi_over_d;
  double s_ex_maximal;
  double two_log_rank;
  double h_p;
  int32_t lower_bound_satisfied;
  int32_t upper_bound_satisfied;
  int32_t orthogonal_family;
} QeBounds;

typedef struct QeLedger {
  double stored_bits;
  double extracted_bits;
} QeLedger;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`) and returns the full message length excluding the NUL.
 * Returns 0 when there is no error.
 *
 * # Safety
 * `buf` must be NULL or point to `len` writable bytes.
 */
size_t qe_last_error(char *buf, size_t len);

/**
 * Validates a correlation matrix and wraps it as a channel.
 *
 * # Safety
 * `re` and `im` must each point to `dim * dim` readable doubles; `out` must be writable.
 */
enum QeStatus qe_channel_new(size_t dim,
                             const double *re,
                             const double *im,
                             struct QeChannel **out);

/**
 * # Safety
 * `ch` must be NULL or a handle from [`qe_channel_new`] not yet freed.
 */
void qe_channel_free(struct QeChannel *ch);

/**
 * Dimension of the channel, or 0 for NULL.
 *
 * # Safety
 * `ch` must be NULL or a live channel handle.
 */
size_t qe_channel_dim(const struct QeChannel *ch);

/**
 * Whether every off-diagonal |ξ_kl| is below 1.
 *
 * # Safety
 * `ch` must be a live channel handle and `out` writable.
 */
enum QeStatus qe_channel_is_complete(const struct QeChannel *ch, bool *out);

/**
 * Validates a density matrix.
 *
 * # Safety
 * `re` and `im` must each point to `dim * dim` readable doubles; `out` must be writable.
 */
enum QeStatus qe_state_new(size_t dim, const double *re, const double *im, struct QeState **out);

/**
 * # Safety
 * `st` must be NULL or a state handle not yet freed.
 */
void qe_state_free(struct QeState *st);

/**
 * Dimension of the state, or 0 for NULL.
 *
 * # Safety
 * `st` must be NULL or a live state handle.
 */
size_t qe_state_dim(const struct QeState *st);

/**
 * Copies the entries, row-major, into `re` and `im` (each of length `len ≥ dim²`).
 *
 * # Safety
 * `st` must be a live state handle; `re` and `im` must hold `len` doubles.
 */
enum QeStatus qe_state_entries(const struct QeState *st, double *re, double *im, size_t len);

/**
 * Applies the channel `steps` times (Schrödinger picture).
 *
 * # Safety
 * `ch` and `st` must be live handles; `out` must be writable.
 */
enum QeStatus qe_channel_apply(const struct QeChannel *ch,
                               const struct QeState *st,
                               uint32_t steps,
                               struct QeState **out);

/**
 * Entropy exchange S(ρ∞) of the channel on `st`, in bits.
 *
 * # Safety
 * `ch` and `st` must be live handles; `out` must be writable.
 */
enum QeStatus qe_entropy_exchange(const struct QeChannel *ch,
                                  const struct QeState *st,
                                  double *out);

/**
 * Random-unitary decomposition: closed form for d = 2 and ξ = I, otherwise
 * a seeded numerical search with `restarts` restarts (0 means the default).
 *
 * # Safety
 * `ch` must be a live handle; `out` must be writable.
 */
enum QeStatus qe_decompose(const struct QeChannel *ch,
                           uint64_t seed,
                           size_t restarts,
                           struct QeDecomposition **out);

/**
 * Builds a decomposition from `terms` weights and `terms * dim` phases (radians, row per term).
 *
 * # Safety
 * `weights` must hold `terms` doubles, `phases` `terms * dim` doubles; `out` must be writable.
 */
enum QeStatus qe_decomposition_new(size_t dim,
                                   size_t terms,
                                   const double *weights,
                                   const double *phases,
                                   struct QeDecomposition **out);

/**
 * # Safety
 * `dec` must be NULL or a decomposition handle not yet freed.
 */
void qe_decomposition_free(struct QeDecomposition *dec);

/**
 * Number of terms, or 0 for NULL.
 *
 * # Safety
 * `dec` must be NULL or a live handle.
 */
size_t qe_decomposition_terms(const struct QeDecomposition *dec);

/**
 * Shannon entropy of the weights in bits, NaN for NULL.
 *
 * # Safety
 * `dec` must be NULL or a live handle.
 */
double qe_decomposition_entropy(const struct QeDecomposition *dec);

/**
 * Copies weights (`terms` values) and phases (`terms * dim`, row per term).
 *
 * # Safety
 * `dec` must be a live handle; `weights` must hold `weights_len` doubles and
 * `phases` `phases_len` doubles.
 */
enum QeStatus qe_decomposition_data(const struct QeDecomposition *dec,
                                    double *weights,
                                    size_t weights_len,
                                    double *phases,
                                    size_t phases_len);

/**
 * Simulates measuring the environment and undoing the heralded unitary.
 * On success `residual` receives ‖recovered − ρ‖_F and `recovered` (if not
 * NULL) a new state handle.
 *
 * # Safety
 * `ch`, `dec` and `st` must be live handles; `residual` must be writable;
 * `recovered` must be NULL or writable.
 */
enum QeStatus qe_correct(const struct QeChannel *ch,
                         const struct QeDecomposition *dec,
                         const struct QeState *st,
                         double *residual,
                         struct QeState **recovered);

/**
 * Entropy bounds; `dec` may be NULL.
 *
 * # Safety
 * `ch` must be a live handle, `dec` NULL or live, `out` writable.
 */
enum QeStatus qe_bounds(const struct QeChannel *ch,
                        const struct QeDecomposition *dec,
                        struct QeBounds *out);

/**
 * Information ledger of the d-slit eraser, in bits.
 *
 * # Safety
 * `out` must be writable.
 */
enum QeStatus qe_eraser_ledger(size_t d, struct QeLedger *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QERASER_H */
