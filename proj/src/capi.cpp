#include "greenwalk.h"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <new>
#include <string>

#include "greenwalk/closed_form.hpp"
#include "greenwalk/complex_geometry.hpp"
#include "greenwalk/heat_kernel.hpp"
#include "greenwalk/identities.hpp"
#include "greenwalk/mc_engine.hpp"
#include "greenwalk/pushforward.hpp"

namespace gw = greenwalk;

// The C enums mirror errc / GreensValue::Kind one-to-one.
static_assert(int(gw::errc::outside_domain) == GW_ERR_OUTSIDE_DOMAIN);
static_assert(int(gw::errc::singular_at_source) == GW_ERR_SINGULAR_AT_SOURCE);
static_assert(int(gw::errc::degenerate_transform) == GW_ERR_DEGENERATE_TRANSFORM);
static_assert(int(gw::errc::unsupported_map) == GW_ERR_UNSUPPORTED_MAP);
static_assert(int(gw::errc::non_converged) == GW_ERR_NON_CONVERGED);
static_assert(int(gw::errc::step_too_coarse) == GW_ERR_STEP_TOO_COARSE);
static_assert(int(gw::errc::biased_window) == GW_ERR_BIASED_WINDOW);
static_assert(int(gw::errc::source_image) == GW_ERR_SOURCE_IMAGE);
static_assert(int(gw::errc::pole_in_parameters) == GW_ERR_POLE_IN_PARAMETERS);
static_assert(int(gw::errc::nonpositive_time) == GW_ERR_NONPOSITIVE_TIME);
static_assert(int(gw::errc::source_point) == GW_ERR_SOURCE_POINT);
static_assert(int(gw::errc::origin_excluded) == GW_ERR_ORIGIN_EXCLUDED);
static_assert(int(gw::errc::invalid_argument) == GW_ERR_INVALID_ARGUMENT);

namespace {

thread_local std::string t_last_error;

gw::Complex from_c(gw_complex z) { return {z.re, z.im}; }
gw_complex to_c(gw::Complex z) { return {z.real(), z.imag()}; }

gw_green_value to_c(const gw::GreensValue& g) {
    gw_green_value out;
    out.kind = static_cast<gw_green_kind>(static_cast<int>(g.kind));
    out.value = g.is_finite() ? g.value : 0.0;
    return out;
}

template <class Fn>
gw_status guarded(Fn&& fn) {
    try {
        fn();
        t_last_error.clear();
        return GW_OK;
    } catch (const gw::Error& e) {
        t_last_error = e.what();
        return static_cast<gw_status>(static_cast<int>(e.code()));
    } catch (const std::exception& e) {
        t_last_error = e.what();
        return GW_ERR_INVALID_ARGUMENT;
    }
}

} // namespace

struct gw_domain { gw::Domain value; };
struct gw_map { gw::AnalyticMap value; };
struct gw_pushforward { gw::PushforwardProblem value; };
struct gw_stopping { gw::StoppingRule value; };
struct gw_grid { gw::OccupationGrid value; };

extern "C" {

const char* gw_status_name(gw_status status) {
    if (status == GW_ERR_IO) return "IoError";
    return gw::errc_name(static_cast<gw::errc>(static_cast<int>(status)));
}

const char* gw_last_error_message(void) { return t_last_error.c_str(); }

const char* gw_version(void) { return "greenwalk 1.0.0"; }

/* ---- closed forms ------------------------------------------------------- */

gw_status gw_greens_half_plane(gw_complex z, gw_complex w, gw_green_value* out) {
    return guarded([&] { *out = to_c(gw::greens_half_plane(from_c(z), from_c(w))); });
}

gw_status gw_greens_right_half_plane(gw_complex z, gw_complex w, gw_green_value* out) {
    return guarded([&] { *out = to_c(gw::greens_right_half_plane(from_c(z), from_c(w))); });
}

gw_status gw_greens_disk(gw_complex a, gw_complex w, gw_green_value* out) {
    return guarded([&] { *out = to_c(gw::greens_disk(from_c(a), from_c(w))); });
}

static gw::SeriesTruncation truncation_of(int n_pairs, double tail_tol) {
    gw::SeriesTruncation t;
    if (n_pairs > 0) t.max_pairs = n_pairs;
    if (tail_tol > 0.0) t.tail_tolerance = tail_tol;
    return t;
}

gw_status gw_greens_strip(gw_complex z, gw_complex w, double half_width, int n_pairs,
                          double tail_tol, gw_green_value* out) {
    return guarded([&] {
        *out = to_c(gw::greens_strip(from_c(z), from_c(w), half_width,
                                     truncation_of(n_pairs, tail_tol)));
    });
}

gw_status gw_greens_strip_map(gw_complex z, gw_complex w, gw_green_value* out) {
    return guarded([&] { *out = to_c(gw::greens_strip_map(from_c(z), from_c(w))); });
}

gw_status gw_greens_punctured_disk(double source, gw_complex w, int n_pairs, double tail_tol,
                                   gw_green_value* out) {
    return guarded([&] {
        *out = to_c(gw::greens_punctured_disk(source, from_c(w), truncation_of(n_pairs, tail_tol)));
    });
}

gw_status gw_greens_winding(int turns, gw_complex w, gw_green_value* out) {
    return guarded([&] { *out = to_c(gw::greens_winding(turns, from_c(w))); });
}

gw_status gw_winding_regular_limit(int turns, double* out) {
    return guarded([&] { *out = gw::winding_regular_limit(turns); });
}

/* ---- domains -------------------------------------------------------------- */

gw_domain* gw_domain_upper_half_plane(void) { return new (std::nothrow) gw_domain{gw::UpperHalfPlane{}}; }
gw_domain* gw_domain_right_half_plane(void) { return new (std::nothrow) gw_domain{gw::RightHalfPlane{}}; }

gw_domain* gw_domain_disk(gw_complex center, double radius) {
    if (!(radius > 0.0)) return nullptr;
    return new (std::nothrow) gw_domain{gw::Disk{from_c(center), radius}};
}

gw_domain* gw_domain_strip(double half_width) {
    if (!(half_width > 0.0)) return nullptr;
    return new (std::nothrow) gw_domain{gw::Strip{half_width}};
}

gw_domain* gw_domain_punctured_disk(void) { return new (std::nothrow) gw_domain{gw::PuncturedDisk{}}; }

void gw_domain_free(gw_domain* domain) { delete domain; }

int gw_domain_contains(const gw_domain* domain, gw_complex z) {
    return domain && gw::contains(domain->value, from_c(z)) ? 1 : 0;
}

double gw_domain_boundary_distance(const gw_domain* domain, gw_complex z) {
    return gw::boundary_distance(domain->value, from_c(z));
}

gw_status gw_greens_exit(const gw_domain* domain, gw_complex source, gw_complex w,
                         gw_green_value* out) {
    return guarded([&] { *out = to_c(gw::greens_exit(domain->value, from_c(source), from_c(w))); });
}

/* ---- maps ------------------------------------------------------------------ */

gw_map* gw_map_power(int exponent) {
    if (exponent < 1) return nullptr;
    return new (std::nothrow) gw_map{gw::PowerMap{exponent}};
}

gw_map* gw_map_exp(void) { return new (std::nothrow) gw_map{gw::ExpMap{}}; }

gw_map* gw_map_mobius(gw_complex a, gw_complex b, gw_complex c, gw_complex d) {
    try {
        return new gw_map{gw::MobiusMap{gw::make_mobius(from_c(a), from_c(b), from_c(c), from_c(d))}};
    } catch (...) {
        return nullptr;
    }
}

gw_map* gw_map_disk_automorphism(gw_complex a) {
    if (std::abs(from_c(a)) >= 1.0) return nullptr;
    return new (std::nothrow) gw_map{gw::DiskAutomorphism{from_c(a)}};
}

gw_map* gw_map_tan_quarter_strip(void) { return new (std::nothrow) gw_map{gw::TanQuarterStrip{}}; }

void gw_map_free(gw_map* map) { delete map; }

gw_status gw_map_evaluate(const gw_map* map, gw_complex z, gw_complex* out) {
    return guarded([&] { *out = to_c(gw::evaluate(map->value, from_c(z))); });
}

gw_status gw_map_derivative(const gw_map* map, gw_complex z, gw_complex* out) {
    return guarded([&] { *out = to_c(gw::derivative(map->value, from_c(z))); });
}

gw_status gw_map_preimages(const gw_map* map, const gw_domain* restrict_to, gw_complex w,
                           gw_complex* points, int* multiplicities, int capacity, int* count) {
    return guarded([&] {
        const auto pre = gw::preimages(map->value, from_c(w), restrict_to->value);
        *count = int(pre.size());
        const int n = std::min<int>(capacity, int(pre.size()));
        for (int i = 0; i < n; ++i) {
            if (points) points[i] = to_c(pre[i].point);
            if (multiplicities) multiplicities[i] = pre[i].multiplicity;
        }
    });
}

gw_status gw_mobius_apply(gw_complex a, gw_complex b, gw_complex c, gw_complex d, gw_complex z,
                          int z_at_infinity, gw_complex* out, int* at_infinity) {
    return guarded([&] {
        const gw::MobiusTransform m = gw::make_mobius(from_c(a), from_c(b), from_c(c), from_c(d));
        const gw::ComplexPoint p =
            z_at_infinity ? gw::ComplexPoint::infinity() : gw::ComplexPoint(from_c(z));
        const gw::ComplexPoint image = gw::mobius_apply(m, p);
        *at_infinity = image.at_infinity ? 1 : 0;
        if (image.is_finite()) *out = to_c(image.value);
    });
}

/* ---- heat kernels ------------------------------------------------------------ */

gw_status gw_rho_plane(double t, gw_complex z, gw_complex w, double* out) {
    return guarded([&] { *out = gw::rho_plane(t, from_c(z), from_c(w)); });
}

gw_status gw_rho_half_plane(double t, gw_complex z, gw_complex w, double* out) {
    return guarded([&] { *out = gw::rho_half_plane(t, from_c(z), from_c(w)); });
}

gw_status gw_rho_strip(double t, gw_complex z, gw_complex w, int max_images, double* out) {
    return guarded([&] {
        gw::KernelSeriesConfig cfg;
        if (max_images > 0) cfg.max_images = max_images;
        *out = gw::rho_strip(t, from_c(z), from_c(w), cfg);
    });
}

gw_status gw_integrate_kernel(gw_kernel kernel, gw_complex z, gw_complex w, int max_images,
                              double quad_rel_tol, gw_green_value* out) {
    return guarded([&] {
        gw::KernelSeriesConfig cfg;
        if (max_images > 0) cfg.max_images = max_images;
        if (quad_rel_tol > 0.0) cfg.quad_rel_tol = quad_rel_tol;
        const auto k = kernel == GW_KERNEL_STRIP ? gw::Kernel::Strip : gw::Kernel::HalfPlane;
        *out = to_c(gw::integrate_kernel(k, from_c(z), from_c(w), cfg));
    });
}

/* ---- pushforward --------------------------------------------------------------- */

gw_pushforward* gw_pushforward_new(const gw_map* map, const gw_domain* base_domain,
                                   gw_complex base_source) {
    if (!map || !base_domain) return nullptr;
    gw::PushforwardProblem p{map->value, base_domain->value, from_c(base_source)};
    try {
        gw::validate(p);
    } catch (...) {
        return nullptr;
    }
    return new (std::nothrow) gw_pushforward{std::move(p)};
}

void gw_pushforward_free(gw_pushforward* p) { delete p; }

gw_status gw_pushforward_eval(const gw_pushforward* p, gw_complex w, int weight_multiplicity,
                              gw_green_value* out) {
    return guarded([&] {
        *out = to_c(gw::pushforward_greens(p->value, from_c(w), weight_multiplicity != 0));
    });
}

gw_status gw_pushforward_continuity_probe(const gw_pushforward* p, gw_complex critical_value,
                                          double radius, int weight_multiplicity,
                                          double* max_discrepancy) {
    return guarded([&] {
        *max_discrepancy = gw::continuity_probe(p->value, from_c(critical_value), radius,
                                                weight_multiplicity != 0)
                               .max_discrepancy;
    });
}

/* ---- Monte Carlo ------------------------------------------------------------------ */

void gw_mc_config_default(gw_mc_config* cfg) {
    const gw::MCConfig d;
    cfg->n_paths = d.n_paths;
    cfg->dt = d.dt;
    cfg->seed = d.seed;
    cfg->workers = d.workers;
    cfg->angular_cap = d.angular_cap;
    cfg->bridge_correction = d.bridge_correction ? 1 : 0;
    cfg->adaptive_stepping = d.adaptive_stepping ? 1 : 0;
    cfg->max_steps_per_path = d.max_steps_per_path;
}

static gw::MCConfig from_c(const gw_mc_config& cfg) {
    gw::MCConfig out;
    out.n_paths = cfg.n_paths;
    out.dt = cfg.dt;
    out.seed = cfg.seed;
    out.workers = cfg.workers;
    out.angular_cap = cfg.angular_cap;
    out.bridge_correction = cfg.bridge_correction != 0;
    out.adaptive_stepping = cfg.adaptive_stepping != 0;
    out.max_steps_per_path = cfg.max_steps_per_path;
    return out;
}

gw_stopping* gw_stopping_exit(const gw_domain* domain) {
    if (!domain) return nullptr;
    return new (std::nothrow) gw_stopping{gw::ExitTime{domain->value}};
}

gw_stopping* gw_stopping_winding(int turns) {
    if (turns < 1) return nullptr;
    return new (std::nothrow) gw_stopping{gw::WindingTime{turns}};
}

void gw_stopping_free(gw_stopping* rule) { delete rule; }

gw_status gw_mc_occupation(gw_complex start, const gw_stopping* rule, double x0, double y0,
                           double x1, double y1, int nx, int ny, const gw_mc_config* cfg,
                           gw_grid** out) {
    return guarded([&] {
        gw::GridSpec spec{x0, y0, x1, y1, nx, ny};
        auto grid = gw::occupation_density(from_c(start), rule->value, spec, from_c(*cfg));
        *out = new gw_grid{std::move(grid)};
    });
}

void gw_grid_free(gw_grid* grid) { delete grid; }

int gw_grid_nx(const gw_grid* grid) { return grid->value.spec().nx; }
int gw_grid_ny(const gw_grid* grid) { return grid->value.spec().ny; }

void gw_grid_bounds(const gw_grid* grid, double* x0, double* y0, double* x1, double* y1) {
    const gw::GridSpec& s = grid->value.spec();
    if (x0) *x0 = s.x0;
    if (y0) *y0 = s.y0;
    if (x1) *x1 = s.x1;
    if (y1) *y1 = s.y1;
}

double gw_grid_density(const gw_grid* grid, int ix, int iy) { return grid->value.density(ix, iy); }
double gw_grid_stderr(const gw_grid* grid, int ix, int iy) { return grid->value.std_error(ix, iy); }
int64_t gw_grid_n_paths(const gw_grid* grid) { return grid->value.n_paths(); }
int64_t gw_grid_truncated_paths(const gw_grid* grid) { return grid->value.truncated_paths(); }

static gw_status write_file(const gw_grid* grid, const char* path, bool stderr_values) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        t_last_error = std::string("cannot open for writing: ") + path;
        return GW_ERR_IO;
    }
    if (stderr_values)
        grid->value.write_stderr_csv(out);
    else
        grid->value.write_csv(out);
    out.flush();
    return out ? GW_OK : GW_ERR_IO;
}

gw_status gw_grid_write_csv(const gw_grid* grid, const char* path) {
    return write_file(grid, path, false);
}

gw_status gw_grid_write_stderr_csv(const gw_grid* grid, const char* path) {
    return write_file(grid, path, true);
}

gw_status gw_grid_summary_json(const gw_grid* grid, gw_complex start, const gw_stopping* rule,
                               const gw_mc_config* cfg, char** out) {
    return guarded([&] {
        const std::string s =
            gw::grid_summary_json(grid->value, from_c(start), rule->value, from_c(*cfg));
        char* buf = new char[s.size() + 1];
        std::memcpy(buf, s.c_str(), s.size() + 1);
        *out = buf;
    });
}

void gw_string_free(char* s) { delete[] s; }

gw_status gw_mc_estimate(gw_complex start, const gw_stopping* rule, gw_complex w,
                         double window_radius, const gw_mc_config* cfg, double* value,
                         double* std_error, int64_t* truncated_paths) {
    return guarded([&] {
        const gw::PointEstimate est =
            gw::estimate_greens(from_c(start), rule->value, from_c(w), window_radius, from_c(*cfg));
        if (value) *value = est.value;
        if (std_error) *std_error = est.std_error;
        if (truncated_paths) *truncated_paths = est.truncated_paths;
    });
}

/* ---- identities ---------------------------------------------------------------------- */

static gw::IdentityCase make_case(const char* name, double a, double b, double c, int n_pairs) {
    gw::IdentityCase ic;
    ic.name = gw::identity_from_string(name ? name : "");
    ic.a = a;
    ic.b = b;
    ic.c = c;
    if (n_pairs > 0) ic.truncation.max_pairs = n_pairs;
    return ic;
}

gw_status gw_identity_verify(const char* name, double a, double b, double c, int n_pairs,
                             gw_identity_report* out) {
    return guarded([&] {
        const gw::IdentityReport r = gw::verify(make_case(name, a, b, c, n_pairs));
        out->lhs = r.lhs;
        out->rhs = r.rhs;
        out->rel_error = r.rel_error;
        out->tail_bound = r.tail_bound;
        out->n_pairs = r.n_pairs;
        out->pass = r.pass ? 1 : 0;
    });
}

gw_status gw_identity_report_json(const char* name, double a, double b, double c, int n_pairs,
                                  char** out) {
    return guarded([&] {
        const std::string s = gw::to_json(gw::verify(make_case(name, a, b, c, n_pairs)));
        char* buf = new char[s.size() + 1];
        std::memcpy(buf, s.c_str(), s.size() + 1);
        *out = buf;
    });
}

} // extern "C"
