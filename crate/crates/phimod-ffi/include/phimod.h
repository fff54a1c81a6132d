#ifndef PHIMOD_H
#define PHIMOD_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes; the first four match the CLI exit codes.
 */
typedef enum {
  PHIMOD_STATUS_OK = 0,
  PHIMOD_STATUS_MISMATCH = 1,
  PHIMOD_STATUS_LIFT_FAILED = 2,
  PHIMOD_STATUS_BAD_INPUT = 3,
  PHIMOD_STATUS_NULL_POINTER = 4,
  PHIMOD_STATUS_INTERNAL = 5,
} PhimodStatus;

/**
 * A combination of H-series with Laurent polynomial coefficients.
 */
typedef struct PhimodHCombo PhimodHCombo;

/**
 * A solved generating function: polynomial in Φ over Laurent polynomials mod p^γ.
 */
typedef struct PhimodSolution PhimodSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Bytes needed for the last error message including the NUL; 0 when none.
 */
size_t phimod_last_error_length(void);

/**
 * Copy the last error message into `buf` (truncated, always NUL-terminated).
 * Returns the number of bytes written excluding the NUL.
 *
 * # Safety
 * `buf` must be valid for `len` bytes or null.
 */
size_t phimod_last_error_message(char *buf, size_t len);

/**
 * Release a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void phimod_string_free(char *s);

/**
 * Solve a built-in equation (noncrossing, kreweras, fusscatalan, blossom,
 * gessel_f1 … gessel_f5) modulo p^(p^alpha). `p = 0` and `k = 0` select defaults.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` a valid pointer.
 */
PhimodStatus phimod_solve_builtin(const char *name,
                                  uint64_t p,
                                  uint64_t k,
                                  uint32_t alpha,
                                  PhimodSolution **out);

/**
 * Solve P(z, F) = 0 given as text in z and F, with the listed initial terms.
 *
 * # Safety
 * `poly` must be NUL-terminated; `initial` valid for `n_initial` values; `out` valid.
 */
PhimodStatus phimod_solve_equation(const char *poly,
                                   uint64_t p,
                                   uint32_t scale_d,
                                   uint32_t step_h,
                                   const int64_t *initial,
                                   size_t n_initial,
                                   uint32_t alpha,
                                   PhimodSolution **out);

/**
 * Read a solution from its JSON form.
 *
 * # Safety
 * `json` must be NUL-terminated; `out` valid.
 */
PhimodStatus phimod_solution_from_json(const char *json, PhimodSolution **out);

/**
 * JSON form of a solution; free with `phimod_string_free`.
 *
 * # Safety
 * `sol` must be a live handle; `out` valid.
 */
PhimodStatus phimod_solution_to_json(const PhimodSolution *sol, char **out);

/**
 * Human-readable form "a_0 + a_1 Φ(z) + …"; free with `phimod_string_free`.
 *
 * # Safety
 * `sol` must be a live handle; `out` valid.
 */
PhimodStatus phimod_solution_to_string(const PhimodSolution *sol, char **out);

/**
 * The modulus p^γ the solution is known to.
 *
 * # Safety
 * `sol` must be a live handle; `out` valid.
 */
PhimodStatus phimod_solution_modulus(const PhimodSolution *sol, uint64_t *out);

/**
 * Coefficient of z^n (n in decimal, any size), reduced modulo `modulus`
 * (0 = the solution's modulus).
 *
 * # Safety
 * `sol` must be a live handle; `n` NUL-terminated; `out` valid.
 */
PhimodStatus phimod_solution_coeff(const PhimodSolution *sol,
                                   const char *n,
                                   uint64_t modulus,
                                   uint64_t *out);

/**
 * Residues of the coefficients of z^0 … z^{len−1} modulo `modulus` into `buf`.
 *
 * # Safety
 * `sol` must be a live handle; `buf` valid for `len` values.
 */
PhimodStatus phimod_solution_classify(const PhimodSolution *sol,
                                      uint64_t modulus,
                                      uint64_t *buf,
                                      size_t len);

/**
 * Compare with the exact values of a built-in sequence for n ≤ n_max.
 * Returns Mismatch and sets `first_bad` to the first differing n when they disagree.
 *
 * # Safety
 * `sol` must be a live handle; `name` NUL-terminated; `first_bad` valid or null.
 */
PhimodStatus phimod_solution_verify(const PhimodSolution *sol,
                                    const char *name,
                                    uint64_t p,
                                    uint64_t k,
                                    uint64_t n_max,
                                    uint64_t modulus,
                                    uint64_t *first_bad);

/**
 * Release a solution.
 *
 * # Safety
 * `sol` must come from this library and not be freed twice.
 */
void phimod_solution_free(PhimodSolution *sol);

/**
 * Φ^K modulo p^γ in the reduced H-basis.
 *
 * # Safety
 * `out` must be valid.
 */
PhimodStatus phimod_expand_phi(uint64_t p, uint32_t gamma, uint64_t k, PhimodHCombo **out);

/**
 * Coefficient of z^n.
 *
 * # Safety
 * `h` must be a live handle; `n` NUL-terminated; `out` valid.
 */
PhimodStatus phimod_hcombo_coeff(const PhimodHCombo *h, const char *n, uint64_t *out);

/**
 * Number of H-terms (the free part not counted).
 *
 * # Safety
 * `h` must be a live handle; `out` valid.
 */
PhimodStatus phimod_hcombo_num_terms(const PhimodHCombo *h, size_t *out);

/**
 * Text form such as "2 H_{1,1} + H_2"; free with `phimod_string_free`.
 *
 * # Safety
 * `h` must be a live handle; `out` valid.
 */
PhimodStatus phimod_hcombo_to_string(const PhimodHCombo *h, char **out);

/**
 * Release an H-combination.
 *
 * # Safety
 * `h` must come from this library and not be freed twice.
 */
void phimod_hcombo_free(PhimodHCombo *h);

/**
 * Whether A(z, Φ(z)) ≡ 0 mod p^γ, decided exactly; `degree` receives deg_t A.
 *
 * # Safety
 * `poly` NUL-terminated; `vanishes` valid; `degree` valid or null.
 */
PhimodStatus phimod_minpoly_verify(const char *poly,
                                   uint64_t p,
                                   uint32_t gamma,
                                   bool *vanishes,
                                   uint32_t *degree);

/**
 * Least d with v_p(d!) ≥ γ.
 *
 * # Safety
 * `out` must be valid.
 */
PhimodStatus phimod_degree_lower_bound(uint64_t p, uint32_t gamma, uint64_t *out);

/**
 * Library version, static storage.
 */
const char *phimod_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PHIMOD_H */
