#ifndef FLATLINE_H
#define FLATLINE_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum FlNorm {
  FL_NORM_EUCLID = 0,
  FL_NORM_SUP = 1,
} FlNorm;

typedef enum FlStatus {
  FL_STATUS_OK = 0,
  FL_STATUS_NULL_POINTER = 1,
  FL_STATUS_INVALID_UTF8 = 2,
  FL_STATUS_PARSE = 3,
  FL_STATUS_INVALID_SURFACE = 4,
  FL_STATUS_HYPOTHESIS = 5,
  FL_STATUS_VERTICAL_SADDLE_CONNECTION = 6,
  FL_STATUS_BUDGET_EXCEEDED = 7,
  FL_STATUS_OUT_OF_RANGE = 8,
  FL_STATUS_PRECISION_EXHAUSTED = 9,
  FL_STATUS_USAGE = 10,
  FL_STATUS_IO = 11,
  FL_STATUS_PANIC = 12,
  FL_STATUS_BUFFER_TOO_SMALL = 13,
} FlStatus;

typedef enum FlVerdict {
  FL_VERDICT_UE = 0,
  FL_VERDICT_UE_EVIDENCE = 1,
  FL_VERDICT_NONERGODIC_EVIDENCE = 2,
  FL_VERDICT_PERIODIC = 3,
  FL_VERDICT_INCONCLUSIVE = 4,
} FlVerdict;

/**
 * Shortest slits and loops of a slit-torus direction with its verdict.
 */
typedef struct FlAnalysis FlAnalysis;

/**
 * A translation surface.
 */
typedef struct FlSurface FlSurface;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version, a static NUL-terminated string.
 */
const char *fl_version(void);

/**
 * Message of the last failure on this thread; empty if none.
 */
const char *fl_last_error(void);

/**
 * Builds a surface from its JSON description.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable.
 */
enum FlStatus fl_surface_from_json(const char *json, struct FlSurface **out);

/**
 * The double cover of the square torus branched over the ends of a
 * horizontal slit of length `lambda`.
 *
 * # Safety
 * `out` must be writable.
 */
enum FlStatus fl_slit_torus(double lambda, struct FlSurface **out);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards. Null is
 * ignored.
 */
void fl_surface_free(struct FlSurface *s);

/**
 * # Safety
 * `s` must be a live surface and `out` writable.
 */
enum FlStatus fl_surface_area(const struct FlSurface *s, double *out);

/**
 * # Safety
 * `s` must be a live surface and `out` writable.
 */
enum FlStatus fl_surface_genus(const struct FlSurface *s, size_t *out);

/**
 * New surface `diag(e^{t/2}, e^{-t/2}) · s`.
 *
 * # Safety
 * `s` must be a live surface and `out` writable.
 */
enum FlStatus fl_surface_apply_flow(const struct FlSurface *s, double t, struct FlSurface **out);

/**
 * New surface with the direction `(dx, dy)` turned vertical.
 *
 * # Safety
 * `s` must be a live surface and `out` writable.
 */
enum FlStatus fl_surface_rotate_to_vertical(const struct FlSurface *s,
                                            double dx,
                                            double dy,
                                            struct FlSurface **out);

/**
 * Length of the shortest saddle connection.
 *
 * # Safety
 * `s` must be a live surface and `out` writable.
 */
enum FlStatus fl_surface_l1(const struct FlSurface *s, enum FlNorm norm, double *out);

/**
 * Number of singularities strictly inside circumdisks of the Delaunay
 * triangulation, with the given margin. Zero certifies it.
 *
 * # Safety
 * `s` must be a live surface and `out` writable.
 */
enum FlStatus fl_delaunay_violations(const struct FlSurface *s, double margin, size_t *out);

/**
 * Writes `t_0, ..., t_n` of `t_{k+1} = t_k + eps log t_{k+1}` to `out`,
 * which must hold `n + 1` values.
 *
 * # Safety
 * `out` must be writable for `out_len` doubles.
 */
enum FlStatus fl_time_sequence(double eps, double t0, size_t n, double *out, size_t out_len);

/**
 * Analyzes the direction of slope `slope` on the slit torus of slit
 * `lambda`. Both are strings in the forms `p/q`, decimal, `golden`,
 * `sqrt(N)±M`, evaluated to `digits` decimals when irrational.
 *
 * # Safety
 * `lambda` and `slope` must be NUL-terminated strings and `out` writable.
 */
enum FlStatus fl_slit_analyze(const char *lambda,
                              const char *slope,
                              size_t entries,
                              uint32_t digits,
                              struct FlAnalysis **out);

/**
 * # Safety
 * `a` must be a live analysis and `out` writable.
 */
enum FlStatus fl_analysis_verdict(const struct FlAnalysis *a, enum FlVerdict *out);

/**
 * Number of minima found.
 *
 * # Safety
 * `a` must be a live analysis and `out` writable.
 */
enum FlStatus fl_analysis_len(const struct FlAnalysis *a, size_t *out);

/**
 * Time of minimum `i` and whether its realizer is a slit.
 *
 * # Safety
 * `a` must be a live analysis; `t` and `is_slit` writable.
 */
enum FlStatus fl_analysis_entry(const struct FlAnalysis *a, size_t i, double *t, bool *is_slit);

/**
 * The full analysis as JSON. Release with `fl_string_free`.
 *
 * # Safety
 * `a` must be a live analysis and `out` writable.
 */
enum FlStatus fl_analysis_to_json(const struct FlAnalysis *a, char **out);

/**
 * # Safety
 * `a` must come from `fl_slit_analyze` and not be used afterwards.
 */
void fl_analysis_free(struct FlAnalysis *a);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void fl_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FLATLINE_H */
