#ifndef BIHARM_H
#define BIHARM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BiharmStatus {
  BIHARM_STATUS_OK = 0,
  BIHARM_STATUS_NULL_POINTER = 1,
  BIHARM_STATUS_INVALID_ARGUMENT = 2,
  BIHARM_STATUS_ON_BOUNDARY = 3,
  BIHARM_STATUS_OUTSIDE_DOMAIN = 4,
  BIHARM_STATUS_NUMERICAL = 5,
  BIHARM_STATUS_PANIC = 6,
} BiharmStatus;

// Boundary of a rounded rectangle with optional circular obstacles. The
// factored system is built on first use and shared with every solution.
typedef struct BiharmDomain BiharmDomain;

// Solved layer densities, plus the free-space part for Green's functions.
typedef struct BiharmSolution BiharmSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Creates the rounded rectangle `[0, a] × [0, b]` with corner rounding `h`,
// discretized with `outer_panels` panels, and `n_circles` circular holes
// with `circle_panels` panels each. `centers` holds `x0, y0, x1, y1, ...`.
//
// # Safety
// `centers` and `radii` must hold `2 * n_circles` and `n_circles` doubles
// (either may be null when `n_circles` is 0); `out` must be writable.
enum BiharmStatus biharm_domain_new(double a,
                                    double b,
                                    double h,
                                    size_t outer_panels,
                                    const double *centers,
                                    const double *radii,
                                    size_t n_circles,
                                    size_t circle_panels,
                                    struct BiharmDomain **out);

// # Safety
// `dom` must be null or a handle from [`biharm_domain_new`] not yet freed.
void biharm_domain_free(struct BiharmDomain *dom);

// Number of unknowns in the block system (densities, constant, charges).
//
// # Safety
// `dom` must be a live domain handle and `out` writable.
enum BiharmStatus biharm_domain_system_size(const struct BiharmDomain *dom, size_t *out);

// Writes 1 to `inside` if `(x, y)` lies in the domain, else 0.
//
// # Safety
// `dom` must be a live domain handle and `inside` writable.
enum BiharmStatus biharm_domain_contains(const struct BiharmDomain *dom,
                                         double x,
                                         double y,
                                         int32_t *inside);

// Solves with clamped data taken from `w = Σ q_j r_j² log r_j` for sources
// `(x_j, y_j)` outside the domain.
//
// # Safety
// `sources` must hold `2 * n` doubles and `strengths` `n`; `out` writable.
enum BiharmStatus biharm_solve_manufactured(const struct BiharmDomain *dom,
                                            const double *sources,
                                            const double *strengths,
                                            size_t n,
                                            struct BiharmSolution **out);

// Green's function of the clamped plate for unit point loads at `loads`.
//
// # Safety
// `loads` must hold `2 * n` doubles; `out` writable.
enum BiharmStatus biharm_solve_greens(const struct BiharmDomain *dom,
                                      const double *loads,
                                      size_t n,
                                      struct BiharmSolution **out);

// Evaluates `w` at `n` interior points `xy`, writing `n` values to `w`.
//
// # Safety
// `xy` must hold `2 * n` doubles and `w` room for `n`.
enum BiharmStatus biharm_solution_eval(const struct BiharmSolution *sol,
                                       const double *xy,
                                       size_t n,
                                       double *w);

// Copies the charge strengths `c₀, c₁..c_N` (one more than the number of
// holes) into `out`, which must have room for `len` values.
//
// # Safety
// `out` must have room for `len` doubles.
enum BiharmStatus biharm_solution_charges(const struct BiharmSolution *sol,
                                          double *out,
                                          size_t len);

// # Safety
// `sol` must be null or a live solution handle.
void biharm_solution_free(struct BiharmSolution *sol);

// Copies the last error message of this thread, NUL terminated and
// truncated to `len` bytes, into `buf`. Returns the full message length.
//
// # Safety
// `buf` must be null or have room for `len` bytes.
size_t biharm_last_error(char *buf, size_t len);

// Static description of a status code.
const char *biharm_status_str(enum BiharmStatus s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BIHARM_H */
