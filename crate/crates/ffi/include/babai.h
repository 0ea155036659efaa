#ifndef BABAI_H
#define BABAI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BabaiStatus {
  BABAI_STATUS_OK = 0,
  BABAI_STATUS_NULL_POINTER = 1,
  BABAI_STATUS_INVALID_ARGUMENT = 2,
  BABAI_STATUS_PARSE = 3,
  BABAI_STATUS_PRECONDITION = 4,
  BABAI_STATUS_GEOMETRY = 5,
  BABAI_STATUS_NUMERIC = 6,
  BABAI_STATUS_PANIC = 7,
} BabaiStatus;

/**
 * Opaque lattice handle.
 */
typedef struct BabaiLattice BabaiLattice;

/**
 * Opaque protocol handle.
 */
typedef struct BabaiProtocol BabaiProtocol;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message into `buf` (NUL
 * terminated, truncated to `len - 1` bytes). Returns the full message
 * length in bytes, excluding the terminator.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t babai_last_error_message(char *buf, size_t len);

/**
 * Parses a lattice from its JSON description.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum BabaiStatus babai_lattice_from_json(const char *json, struct BabaiLattice **out);

/**
 * Looks up a named lattice (`Z3`, `FCC`, `BCC`, `A2`, ...).
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum BabaiStatus babai_lattice_from_catalog(const char *name, struct BabaiLattice **out);

/**
 * # Safety
 * `lat` must be null or a handle from this library not yet freed.
 */
void babai_lattice_free(struct BabaiLattice *lat);

/**
 * # Safety
 * `lat` must be a live handle; `out` must be writable.
 */
enum BabaiStatus babai_lattice_dimension(const struct BabaiLattice *lat, size_t *out);

/**
 * Writes the upper-triangular form row-major into `out` (`n * n` doubles).
 *
 * # Safety
 * `lat` must be a live handle; `out` must hold `len` doubles.
 */
enum BabaiStatus babai_lattice_triangular(const struct BabaiLattice *lat, double *out, size_t len);

/**
 * Nearest-plane (Babai) point of `x`. `point_out` and `dist2_out` may be null.
 *
 * # Safety
 * `x` and `u_out` must hold `n` elements, `point_out` (if non-null) `n` doubles.
 */
enum BabaiStatus babai_nearest_plane(const struct BabaiLattice *lat,
                                     const double *x,
                                     size_t n,
                                     int64_t *u_out,
                                     double *point_out,
                                     double *dist2_out);

/**
 * Exact closest lattice point of `x` (n <= 8).
 *
 * # Safety
 * Same as [`babai_nearest_plane`].
 */
enum BabaiStatus babai_closest_point(const struct BabaiLattice *lat,
                                     const double *x,
                                     size_t n,
                                     int64_t *u_out,
                                     double *point_out,
                                     double *dist2_out);

/**
 * Error probability for the basis `{(1,0), (a,b)}`.
 *
 * # Safety
 * `p_e_out` must be writable.
 */
enum BabaiStatus babai_perr_closed_form_2d(double a, double b, double *p_e_out);

/**
 * Exact 3-D error probability. With `search_permutations` non-zero the
 * smallest value over the six column orders is returned.
 *
 * # Safety
 * `lat` must be a live handle; `p_e_out` must be writable.
 */
enum BabaiStatus babai_perr_polyhedral_3d(const struct BabaiLattice *lat,
                                          int32_t search_permutations,
                                          double *p_e_out);

/**
 * Monte Carlo error probability under uniform input on the Voronoi cell.
 * `std_error_out` may be null. `workers == 0` uses the default.
 *
 * # Safety
 * `lat` must be a live handle; `p_e_out` must be writable.
 */
enum BabaiStatus babai_perr_mc_uniform(const struct BabaiLattice *lat,
                                       uint64_t samples,
                                       uint64_t seed,
                                       size_t workers,
                                       double *p_e_out,
                                       double *std_error_out);

/**
 * Builds the distributed protocol. `source` is e.g. `uniform:A=5` or
 * `gaussian:sigma=0.1`; with `full_sets` non-zero every residue is allowed.
 *
 * # Safety
 * `lat` must be a live handle, `source` NUL-terminated, `out` writable.
 */
enum BabaiStatus babai_protocol_new(const struct BabaiLattice *lat,
                                    const char *source,
                                    int32_t full_sets,
                                    struct BabaiProtocol **out);

/**
 * # Safety
 * `p` must be null or a handle from this library not yet freed.
 */
void babai_protocol_free(struct BabaiProtocol *p);

/**
 * Sensor `m` (1-based) encodes its triangular-frame coordinate `x_m`.
 *
 * # Safety
 * `p` must be a live handle; `u_tilde_out` and `s_out` must be writable.
 */
enum BabaiStatus babai_protocol_encode(const struct BabaiProtocol *p,
                                       size_t m,
                                       double x_m,
                                       int64_t *u_tilde_out,
                                       int64_t *s_out);

/**
 * Decodes one message per sensor; `u_tilde[m-1]`, `s[m-1]` belong to sensor `m`.
 *
 * # Safety
 * `u_tilde`, `s` and `u_out` must hold `n` elements.
 */
enum BabaiStatus babai_protocol_decode(const struct BabaiProtocol *p,
                                       const int64_t *u_tilde,
                                       const int64_t *s,
                                       size_t n,
                                       int64_t *u_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BABAI_H */
