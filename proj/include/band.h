/**
 * band: equilibrium shapes of closed inextensible developable strips.
 *
 * C interface to the solver library. All objects are opaque handles created
 * and destroyed by the library; every fallible call returns a band_status
 * and leaves a human-readable message in band_last_error() (thread local)
 * on failure. Output pointers are written only on BAND_OK.
 */
#ifndef BAND_H
#define BAND_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum band_status {
  BAND_OK = 0,
  BAND_ERR_INVALID_ARGUMENT = 1,
  BAND_ERR_IO = 2,
  BAND_ERR_NUMERIC = 3,
  BAND_ERR_INTERNAL = 4
} band_status;

/** Library version, "major.minor.patch". */
const char* band_version(void);

/** Message of the most recent failure on this thread ("" if none). */
const char* band_last_error(void);

typedef struct band_config band_config;
typedef struct band_profile band_profile;
typedef struct band_curve band_curve;
typedef struct band_result band_result;
typedef struct band_fields band_fields;
typedef struct band_analysis band_analysis;

/* ---------------------------------------------------------------- config */

/** Fresh configuration with library defaults. */
band_config* band_config_create(void);
void band_config_free(band_config* config);

/**
 * Set one option by key. Keys: n, length, A, grad_tol, constraint_tol,
 * seed, init (analytic|circle|file), init_path, moebius (0/1), clamp_w
 * (0/1), perturbation, max_outer, checkpoint_dir, epsilon_schedule
 * (comma-separated), penalty_schedule (mu:iters pairs, comma-separated),
 * smoothing_schedule (comma-separated, annealed H1 bias, 0 disables).
 */
band_status band_config_set(band_config* config, const char* key,
                            const char* value);

/** Current value of a key, formatted into buf (NUL terminated). */
band_status band_config_get(const band_config* config, const char* key,
                            char* buf, size_t bufsize);

/** Apply "key = value" lines from a file; '#' starts a comment. */
band_status band_config_load(band_config* config, const char* path);

/* --------------------------------------------------------------- profile */

/**
 * Profile from nodal curvature K and torsion W arrays (length n each).
 * moebius nonzero marks a half-twisted seam: K is then treated as
 * anti-periodic across the wrap (W stays periodic).
 */
band_status band_profile_create(int n, double length, int moebius,
                                const double* K, const double* W,
                                band_profile** out);
band_status band_profile_load(const char* path, band_profile** out);
band_status band_profile_save(const band_profile* profile, const char* path,
                              const char* comment);
void band_profile_free(band_profile* profile);

int band_profile_nodes(const band_profile* profile);
double band_profile_length(const band_profile* profile);
/** 1 when the profile closes with a half-twisted (anti-periodic K) seam. */
int band_profile_moebius(const band_profile* profile);

/** Copy nodal data into caller arrays of length nodes(); s may be NULL. */
band_status band_profile_get(const band_profile* profile, double* s, double* K,
                             double* W);

/* ---------------------------------------------------------------- curves */

/** Integrate the profile into a framed curve from the pinned initial state. */
band_status band_reconstruct(const band_profile* profile, band_curve** out);

band_status band_curve_load(const char* path, band_curve** out);
band_status band_curve_save(const band_curve* curve, const char* path,
                            const char* comment);
void band_curve_free(band_curve* curve);

int band_curve_nodes(const band_curve* curve);

/** Copy positions into xyz (3 * nodes() doubles, xyzxyz order). */
band_status band_curve_positions(const band_curve* curve, double* xyz);

/** Closure gap norms after one circuit (moebius: half-twist target). */
band_status band_closure(const band_curve* curve, int moebius,
                         double* position_gap, double* frame_gap);

/**
 * Read a plain x,y,z centerline file, resample it to n nodes (n <= 0 picks
 * 256) and build frames suitable for profile extraction.
 */
band_status band_curve_from_centerline(const char* path, int n,
                                       band_curve** out);

/**
 * Recover a (K, W) profile from a framed curve. flagged (optional) receives
 * the number of nodes whose torsion had to be interpolated across
 * vanishing curvature.
 */
band_status band_extract_profile(const band_curve* curve, band_profile** out,
                                 int* flagged);

/* ----------------------------------------------------------------- solve */

/** Run the constrained minimization from the configured starting profile. */
band_status band_solve(const band_config* config, band_result** out);

/** Same, warm-started from an explicit profile (its grid is resampled to n). */
band_status band_solve_from(const band_config* config,
                            const band_profile* start, band_result** out);

void band_result_free(band_result* result);

/** Borrowed references, valid while the result lives. */
const band_profile* band_result_profile(const band_result* result);
const band_curve* band_result_curve(const band_result* result);

int band_result_converged(const band_result* result);
double band_result_energy(const band_result* result);
double band_result_constraint_norm(const band_result* result);
double band_result_grad_norm(const band_result* result);
int band_result_outer_iterations(const band_result* result);
int band_result_inner_iterations(const band_result* result);
const char* band_result_message(const band_result* result);

/**
 * Write the solver report as text: status, final norms, and the
 * per-outer-iteration history (energy, constraint gap, penalty, epsilon).
 */
band_status band_result_save(const band_result* result, const char* path,
                             const char* comment);

/* --------------------------------------------------------------- statics */

/**
 * Force/moment fields and equilibrium residuals of a profile. s_center >= 0
 * masks +-window around that arclength out of the residual norms;
 * s_center < 0 locates the curvature/torsion zero automatically (no mask
 * when there is none). window < 0 selects the default 2% of the length.
 */
band_status band_evaluate_statics(const band_profile* profile, double A,
                                  double epsilon, double s_center,
                                  double window, band_fields** out);

void band_fields_free(band_fields* fields);

/** Fitted integration constant of the tangent force. */
double band_fields_constant(const band_fields* fields);

/** Max / rms residual of balance law `which` in 0..5 over unmasked nodes. */
double band_fields_max_residual(const band_fields* fields, int which);
double band_fields_rms_residual(const band_fields* fields, int which);

band_status band_fields_save(const band_fields* fields, const char* path,
                             const char* comment);

/* -------------------------------------------------------------- analysis */

/** Geometric diagnostics of a solved profile/curve pair. */
band_status band_analyze(const band_profile* profile, const band_curve* curve,
                         band_analysis** out);

void band_analysis_free(band_analysis* analysis);

/**
 * Scalar lookup. Keys: energy, window, singular.found, singular.s,
 * singular.value, singular.max_value, phi.left_deg, phi.right_deg,
 * phi.average_deg, phi.spread_deg, zeros.count, zeros.sign_changes,
 * zeros.touching, axis.rms, axis.rms_rel, axis.degenerate,
 * axis.s_intersection, axis.b_alignment, axis.diameter,
 * triangle.left_angle_deg, triangle.right_angle_deg,
 * triangle.flat_deviation, triangle.patch_size.
 */
band_status band_analysis_get(const band_analysis* analysis, const char* key,
                              double* value);

/** Write the full report as "key: value" text. */
band_status band_analysis_save(const band_analysis* analysis, const char* path,
                               const char* comment);

/* ---------------------------------------------------------------- export */

/** Ruled-strip OBJ mesh of the given width (moebius stitches the seam). */
band_status band_export_mesh(const band_profile* profile,
                             const band_curve* curve, double width, int moebius,
                             const char* path, const char* comment);

/** Closed s,K,W,phi plot table (n + 1 rows). */
band_status band_export_plot(const band_profile* profile, const char* path,
                             const char* comment);

/* -------------------------------------------------------------- selftest */

/**
 * Run the built-in cross-check battery (finite-difference oracles, round
 * trips, discrete identities, a negative control that must fail). Returns
 * the number of failed checks, 0 on a clean pass. log, when non-NULL,
 * receives one line per check.
 */
int band_self_test(int full, void (*log)(const char* line, void* user),
                   void* user);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* BAND_H */
