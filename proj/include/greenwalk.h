/* greenwalk C API: planar Brownian Green's functions, heat kernels,
 * preimage-sum pushforwards, infinite-product identity checks, and a
 * reproducible Monte Carlo occupation sampler.
 *
 * Conventions: every fallible call returns gw_status (GW_OK == 0) and writes
 * results through out-pointers. Objects created by gw_*_new/gw_*_create are
 * opaque and must be released with the matching gw_*_free. All functions are
 * thread-safe; gw_last_error_message() is thread-local.
 */
#ifndef GREENWALK_H
#define GREENWALK_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gw_status {
    GW_OK = 0,
    GW_ERR_OUTSIDE_DOMAIN = 1,
    GW_ERR_SINGULAR_AT_SOURCE = 2,
    GW_ERR_DEGENERATE_TRANSFORM = 3,
    GW_ERR_UNSUPPORTED_MAP = 4,
    GW_ERR_NON_CONVERGED = 5,
    GW_ERR_STEP_TOO_COARSE = 6,
    GW_ERR_BIASED_WINDOW = 7,
    GW_ERR_SOURCE_IMAGE = 8,
    GW_ERR_POLE_IN_PARAMETERS = 9,
    GW_ERR_NONPOSITIVE_TIME = 10,
    GW_ERR_SOURCE_POINT = 11,
    GW_ERR_ORIGIN_EXCLUDED = 12,
    GW_ERR_INVALID_ARGUMENT = 13,
    GW_ERR_IO = 14
} gw_status;

const char* gw_status_name(gw_status status);
/* Detail for the last failing call on this thread; empty string if none. */
const char* gw_last_error_message(void);
const char* gw_version(void);

typedef struct gw_complex { double re, im; } gw_complex;

typedef enum gw_green_kind {
    GW_GREEN_FINITE = 0,
    GW_GREEN_SINGULAR_AT_SOURCE = 1,
    GW_GREEN_INFINITE_WHOLE_PLANE = 2
} gw_green_kind;

typedef struct gw_green_value {
    gw_green_kind kind;
    double value;   /* meaningful only when kind == GW_GREEN_FINITE */
} gw_green_value;

/* ---- closed-form Green's functions ------------------------------------- */

gw_status gw_greens_half_plane(gw_complex z, gw_complex w, gw_green_value* out);
gw_status gw_greens_right_half_plane(gw_complex z, gw_complex w, gw_green_value* out);
gw_status gw_greens_disk(gw_complex a, gw_complex w, gw_green_value* out);
/* Series evaluation; n_pairs <= 0 selects the default (10^4). */
gw_status gw_greens_strip(gw_complex z, gw_complex w, double half_width,
                          int n_pairs, double tail_tol, gw_green_value* out);
gw_status gw_greens_strip_map(gw_complex z, gw_complex w, gw_green_value* out);
gw_status gw_greens_punctured_disk(double source, gw_complex w,
                                   int n_pairs, double tail_tol, gw_green_value* out);
/* Winding stopping time tau_n; the source is fixed at 1. */
gw_status gw_greens_winding(int turns, gw_complex w, gw_green_value* out);
gw_status gw_winding_regular_limit(int turns, double* out);

/* ---- domains ------------------------------------------------------------ */

typedef struct gw_domain gw_domain;

gw_domain* gw_domain_upper_half_plane(void);
gw_domain* gw_domain_right_half_plane(void);
gw_domain* gw_domain_disk(gw_complex center, double radius);   /* NULL if radius <= 0 */
gw_domain* gw_domain_strip(double half_width);                 /* NULL if half_width <= 0 */
gw_domain* gw_domain_punctured_disk(void);
void gw_domain_free(gw_domain* domain);

int gw_domain_contains(const gw_domain* domain, gw_complex z);
double gw_domain_boundary_distance(const gw_domain* domain, gw_complex z);
/* Exact exit-time Green's function of the domain. */
gw_status gw_greens_exit(const gw_domain* domain, gw_complex source, gw_complex w,
                         gw_green_value* out);

/* ---- analytic maps ------------------------------------------------------ */

typedef struct gw_map gw_map;

gw_map* gw_map_power(int exponent);            /* NULL if exponent < 1 */
gw_map* gw_map_exp(void);
gw_map* gw_map_mobius(gw_complex a, gw_complex b, gw_complex c, gw_complex d);
                                               /* NULL if ad - bc == 0 */
gw_map* gw_map_disk_automorphism(gw_complex a); /* NULL if |a| >= 1 */
gw_map* gw_map_tan_quarter_strip(void);
void gw_map_free(gw_map* map);

gw_status gw_map_evaluate(const gw_map* map, gw_complex z, gw_complex* out);
gw_status gw_map_derivative(const gw_map* map, gw_complex z, gw_complex* out);
/* Preimages of w inside the domain, sorted by argument then modulus. Writes up
 * to capacity entries; *count receives the full number available. */
gw_status gw_map_preimages(const gw_map* map, const gw_domain* restrict_to,
                           gw_complex w, gw_complex* points, int* multiplicities,
                           int capacity, int* count);

/* ---- Mobius convenience -------------------------------------------------- */

/* Applies (az+b)/(cz+d); *at_infinity is set when the image is the point at
 * infinity (then out is untouched). z_at_infinity selects the input infinity. */
gw_status gw_mobius_apply(gw_complex a, gw_complex b, gw_complex c, gw_complex d,
                          gw_complex z, int z_at_infinity,
                          gw_complex* out, int* at_infinity);

/* ---- heat kernels -------------------------------------------------------- */

gw_status gw_rho_plane(double t, gw_complex z, gw_complex w, double* out);
gw_status gw_rho_half_plane(double t, gw_complex z, gw_complex w, double* out);
gw_status gw_rho_strip(double t, gw_complex z, gw_complex w, int max_images, double* out);

typedef enum gw_kernel { GW_KERNEL_HALF_PLANE = 0, GW_KERNEL_STRIP = 1 } gw_kernel;

gw_status gw_integrate_kernel(gw_kernel kernel, gw_complex z, gw_complex w,
                              int max_images, double quad_rel_tol, gw_green_value* out);

/* ---- pushforward --------------------------------------------------------- */

typedef struct gw_pushforward gw_pushforward;

/* Copies the map and domain; source must lie inside the base domain. */
gw_pushforward* gw_pushforward_new(const gw_map* map, const gw_domain* base_domain,
                                   gw_complex base_source);
void gw_pushforward_free(gw_pushforward* p);

gw_status gw_pushforward_eval(const gw_pushforward* p, gw_complex w,
                              int weight_multiplicity, gw_green_value* out);
gw_status gw_pushforward_continuity_probe(const gw_pushforward* p, gw_complex critical_value,
                                          double radius, int weight_multiplicity,
                                          double* max_discrepancy);

/* ---- Monte Carlo ---------------------------------------------------------- */

typedef struct gw_mc_config {
    int64_t n_paths;
    double dt;
    uint64_t seed;
    int workers;              /* 0 = available parallelism */
    double angular_cap;       /* (0, pi/4] */
    int bridge_correction;    /* boolean */
    int adaptive_stepping;    /* boolean */
    int64_t max_steps_per_path;
} gw_mc_config;

void gw_mc_config_default(gw_mc_config* cfg);

typedef struct gw_stopping gw_stopping;
gw_stopping* gw_stopping_exit(const gw_domain* domain);
gw_stopping* gw_stopping_winding(int turns);   /* NULL if turns < 1 */
void gw_stopping_free(gw_stopping* rule);

typedef struct gw_grid gw_grid;

gw_status gw_mc_occupation(gw_complex start, const gw_stopping* rule,
                           double x0, double y0, double x1, double y1,
                           int nx, int ny, const gw_mc_config* cfg, gw_grid** out);
void gw_grid_free(gw_grid* grid);

int gw_grid_nx(const gw_grid* grid);
int gw_grid_ny(const gw_grid* grid);
void gw_grid_bounds(const gw_grid* grid, double* x0, double* y0, double* x1, double* y1);
double gw_grid_density(const gw_grid* grid, int ix, int iy);
double gw_grid_stderr(const gw_grid* grid, int ix, int iy);
int64_t gw_grid_n_paths(const gw_grid* grid);
int64_t gw_grid_truncated_paths(const gw_grid* grid);

gw_status gw_grid_write_csv(const gw_grid* grid, const char* path);
gw_status gw_grid_write_stderr_csv(const gw_grid* grid, const char* path);
/* JSON summary (bounds, shape, densities, stderr, config echo). The returned
 * buffer is owned by the library; free it with gw_string_free. */
gw_status gw_grid_summary_json(const gw_grid* grid, gw_complex start,
                               const gw_stopping* rule, const gw_mc_config* cfg,
                               char** out);
void gw_string_free(char* s);

gw_status gw_mc_estimate(gw_complex start, const gw_stopping* rule, gw_complex w,
                         double window_radius, const gw_mc_config* cfg,
                         double* value, double* std_error, int64_t* truncated_paths);

/* ---- identities ----------------------------------------------------------- */

typedef struct gw_identity_report {
    double lhs, rhs, rel_error, tail_bound;
    int n_pairs;
    int pass;
} gw_identity_report;

/* name: mirror | fourHands | sinhProd | coshProd | sinProd | cosProd | tanSq | tanProd */
gw_status gw_identity_verify(const char* name, double a, double b, double c,
                             int n_pairs, gw_identity_report* out);
gw_status gw_identity_report_json(const char* name, double a, double b, double c,
                                  int n_pairs, char** out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* GREENWALK_H */
