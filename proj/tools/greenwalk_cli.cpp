// greenwalk command line: exact Green's function evaluation, Monte Carlo
// occupation runs, identity verification, pushforward sums, heat kernels, and
// closed-form heatmaps. Machine-first output (JSON to stdout, CSV to files);
// plotting is left to external tools.
//
// Exit codes: 0 success/pass, 1 verification failed, 2 domain or parameter
// error, 3 simulation/convergence failure, 64 usage.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "greenwalk.h"
#include "json.hpp"

using nlohmann::json;

namespace {

int status_exit_code(gw_status s) {
    switch (s) {
        case GW_OK: return 0;
        case GW_ERR_STEP_TOO_COARSE:
        case GW_ERR_NON_CONVERGED:
        case GW_ERR_IO:
            return 3;
        default:
            return 2;
    }
}

[[noreturn]] void fail(gw_status s, const std::string& context) {
    std::cerr << "error: " << context << ": " << gw_status_name(s);
    const char* detail = gw_last_error_message();
    if (detail && *detail) std::cerr << " (" << detail << ")";
    std::cerr << "\n";
    std::exit(status_exit_code(s));
}

[[noreturn]] void usage_fail(const std::string& message) {
    std::cerr << "error: " << message << "\n";
    std::exit(2);
}

bool parse_complex(std::string s, gw_complex& z) {
    s.erase(std::remove_if(s.begin(), s.end(),
                           [](unsigned char c) { return std::isspace(c); }),
            s.end());
    if (s.empty()) return false;
    z = {0.0, 0.0};
    const bool has_i = s.back() == 'i' || s.back() == 'I';
    char* end = nullptr;
    if (!has_i) {
        z.re = std::strtod(s.c_str(), &end);
        return end && *end == '\0';
    }
    s.pop_back();
    std::size_t split = std::string::npos;
    for (std::size_t i = s.size(); i-- > 1;) {
        if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    const std::string re_str = split == std::string::npos ? "" : s.substr(0, split);
    const std::string im_str = split == std::string::npos ? s : s.substr(split);
    if (im_str.empty() || im_str == "+")
        z.im = 1.0;
    else if (im_str == "-")
        z.im = -1.0;
    else {
        z.im = std::strtod(im_str.c_str(), &end);
        if (!end || *end != '\0') return false;
    }
    if (!re_str.empty()) {
        z.re = std::strtod(re_str.c_str(), &end);
        if (!end || *end != '\0') return false;
    }
    return true;
}

gw_complex require_complex(const std::string& s, const char* what) {
    gw_complex z;
    if (!parse_complex(s, z)) usage_fail(std::string("cannot parse ") + what + ": '" + s + "'");
    return z;
}

struct DomainHandle {
    gw_domain* ptr = nullptr;
    ~DomainHandle() { gw_domain_free(ptr); }
};

struct Flags {
    std::string domain = "disk";
    std::string center = "0";
    double radius = 1.0;
    double half_width = 1.0;
};

void make_domain(const Flags& f, DomainHandle& out) {
    if (f.domain == "disk") {
        out.ptr = gw_domain_disk(require_complex(f.center, "--center"), f.radius);
        if (!out.ptr) usage_fail("disk radius must be positive");
    } else if (f.domain == "upper-half-plane" || f.domain == "uhp") {
        out.ptr = gw_domain_upper_half_plane();
    } else if (f.domain == "right-half-plane" || f.domain == "rhp") {
        out.ptr = gw_domain_right_half_plane();
    } else if (f.domain == "strip") {
        out.ptr = gw_domain_strip(f.half_width);
        if (!out.ptr) usage_fail("strip half-width must be positive");
    } else if (f.domain == "punctured-disk") {
        out.ptr = gw_domain_punctured_disk();
    } else {
        usage_fail("unknown domain '" + f.domain +
                   "' (disk | upper-half-plane | right-half-plane | strip | punctured-disk)");
    }
}

// "winding:N" or empty; returns 0 when no winding rule requested.
int parse_winding(const std::string& stopping) {
    if (stopping.empty()) return 0;
    if (stopping.rfind("winding:", 0) != 0)
        usage_fail("--stopping expects 'winding:N'");
    const int n = std::atoi(stopping.c_str() + 8);
    if (n < 1) usage_fail("--stopping winding:N needs N >= 1");
    return n;
}

const char* kind_name(gw_green_kind k) {
    switch (k) {
        case GW_GREEN_FINITE: return "finite";
        case GW_GREEN_SINGULAR_AT_SOURCE: return "singular-at-source";
        case GW_GREEN_INFINITE_WHOLE_PLANE: return "infinite-whole-plane";
    }
    return "?";
}

void emit(const json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) usage_fail("cannot open output file " + out_path);
    out << j.dump(2) << "\n";
}

std::uint64_t resolve_seed(CLI::Option* seed_opt, std::uint64_t flag_value) {
    if (seed_opt->count() > 0) return flag_value;
    if (const char* env = std::getenv("GREENWALK_SEED")) return std::strtoull(env, nullptr, 10);
    return flag_value;
}

// ---- exact ------------------------------------------------------------------

struct ExactArgs {
    Flags domain_flags;
    std::string stopping;
    std::string source = "0";
    std::string target;
    std::string method = "map";   // strip only: map | series
    int n_pairs = 10000;
    double tail_tol = 1e-6;
    std::string out_path;
};

int run_exact(const ExactArgs& a) {
    const gw_complex target = require_complex(a.target, "--target");
    json j;
    j["target"] = {target.re, target.im};
    gw_green_value g{};
    gw_status st = GW_OK;

    if (const int turns = parse_winding(a.stopping)) {
        j["stopping"] = {{"kind", "winding"}, {"turns", turns}};
        j["source"] = {1.0, 0.0};
        j["formula"] = "preimage sum of right-half-plane values under z -> z^(4n), source 1";
        st = gw_greens_winding(turns, target, &g);
    } else {
        const gw_complex source = require_complex(a.source, "--source");
        j["source"] = {source.re, source.im};
        j["domain"] = a.domain_flags.domain;
        const std::string& d = a.domain_flags.domain;
        if (d == "upper-half-plane" || d == "uhp") {
            j["formula"] = "reflection principle: (1/pi) ln(|z - conj(w)| / |z - w|)";
            st = gw_greens_half_plane(source, target, &g);
        } else if (d == "right-half-plane" || d == "rhp") {
            j["formula"] = "reflection across the imaginary axis: (1/pi) ln(|z + conj(w)| / |z - w|)";
            st = gw_greens_right_half_plane(source, target, &g);
        } else if (d == "strip" && a.method == "series") {
            j["formula"] = "paired method-of-images series on the strip";
            st = gw_greens_strip(source, target, a.domain_flags.half_width, a.n_pairs, a.tail_tol,
                                 &g);
        } else if (d == "punctured-disk") {
            j["formula"] = "covering-map series e^{iz}; equals the unit-disk value";
            if (source.im != 0.0) usage_fail("punctured-disk source must be real in (0,1)");
            st = gw_greens_punctured_disk(source.re, target, a.n_pairs, a.tail_tol, &g);
        } else {
            DomainHandle domain;
            make_domain(a.domain_flags, domain);
            j["formula"] = d == "disk"
                               ? "disk automorphism transport: (1/pi) ln(|1 - conj(a)w| / |w - a|)"
                               : "tan quarter-strip conformal closed form";
            st = gw_greens_exit(domain.ptr, source, target, &g);
        }
    }

    if (st != GW_OK) fail(st, "exact evaluation");
    if (g.kind != GW_GREEN_FINITE) {
        std::cerr << "error: exact evaluation: " << kind_name(g.kind)
                  << (g.kind == GW_GREEN_SINGULAR_AT_SOURCE
                          ? " (target coincides with the source point)"
                          : "")
                  << "\n";
        return 2;
    }
    j["kind"] = kind_name(g.kind);
    j["value"] = g.value;
    emit(j, a.out_path);
    return 0;
}

// ---- identity -----------------------------------------------------------------

int run_identity(const std::string& name, double a, double b, double c, int n_pairs) {
    char* report = nullptr;
    const gw_status st = gw_identity_report_json(name.c_str(), a, b, c, n_pairs, &report);
    if (st != GW_OK) fail(st, "identity " + name);
    gw_identity_report r{};
    gw_identity_verify(name.c_str(), a, b, c, n_pairs, &r);
    std::cout << report << "\n";
    gw_string_free(report);
    return r.pass ? 0 : 1;
}

// ---- mc ------------------------------------------------------------------------

struct McArgs {
    Flags domain_flags;
    std::string stopping;
    std::string start = "0";
    std::vector<double> grid;   // x0,y0,x1,y1
    int nx = 64, ny = 64;
    gw_mc_config cfg{};
    std::string out_prefix;
    bool reference = false;
};

int run_mc(const McArgs& a, CLI::Option* seed_opt, std::uint64_t seed_flag) {
    if (a.grid.size() != 4) usage_fail("--grid expects x0,y0,x1,y1");
    gw_mc_config cfg = a.cfg;
    cfg.seed = resolve_seed(seed_opt, seed_flag);

    gw_complex start = require_complex(a.start, "--start");
    std::unique_ptr<gw_stopping, decltype(&gw_stopping_free)> rule(nullptr, &gw_stopping_free);
    DomainHandle domain;
    const int turns = parse_winding(a.stopping);
    if (turns) {
        if (a.start == "0") start = {1.0, 0.0};   // winding default start
        rule.reset(gw_stopping_winding(turns));
    } else {
        make_domain(a.domain_flags, domain);
        rule.reset(gw_stopping_exit(domain.ptr));
    }
    if (!rule) usage_fail("cannot build stopping rule");

    gw_grid* grid = nullptr;
    gw_status st = gw_mc_occupation(start, rule.get(), a.grid[0], a.grid[1], a.grid[2], a.grid[3],
                                    a.nx, a.ny, &cfg, &grid);
    if (st != GW_OK) fail(st, "mc occupation run");
    std::unique_ptr<gw_grid, decltype(&gw_grid_free)> grid_owner(grid, &gw_grid_free);

    char* summary = nullptr;
    st = gw_grid_summary_json(grid, start, rule.get(), &cfg, &summary);
    if (st != GW_OK) fail(st, "mc summary");
    json j = json::parse(summary);
    gw_string_free(summary);

    // Closed-form comparison column where a reference exists for this rule.
    if (a.reference) {
        const double dx = (a.grid[2] - a.grid[0]) / a.nx;
        const double dy = (a.grid[3] - a.grid[1]) / a.ny;
        json refs = json::array();
        double max_rel = 0.0;
        long compared = 0;
        for (int iy = 0; iy < a.ny; ++iy) {
            json row = json::array();
            for (int ix = 0; ix < a.nx; ++ix) {
                const gw_complex w{a.grid[0] + (ix + 0.5) * dx, a.grid[1] + (iy + 0.5) * dy};
                gw_green_value g{};
                const gw_status rs = turns ? gw_greens_winding(turns, w, &g)
                                           : gw_greens_exit(domain.ptr, start, w, &g);
                if (rs != GW_OK || g.kind != GW_GREEN_FINITE) {
                    row.push_back(nullptr);
                    continue;
                }
                row.push_back(g.value);
                const double est = gw_grid_density(grid, ix, iy);
                const double se = gw_grid_stderr(grid, ix, iy);
                if (g.value > 1e-6 && se < 0.05 * g.value) {
                    max_rel = std::max(max_rel, std::abs(est - g.value) / g.value);
                    ++compared;
                }
            }
            refs.push_back(std::move(row));
        }
        j["reference"] = std::move(refs);
        j["comparison"] = {{"cells_compared", compared}, {"max_rel_error", max_rel}};
    }

    if (!a.out_prefix.empty()) {
        st = gw_grid_write_csv(grid, (a.out_prefix + ".csv").c_str());
        if (st != GW_OK) fail(st, "writing density csv");
        st = gw_grid_write_stderr_csv(grid, (a.out_prefix + ".stderr.csv").c_str());
        if (st != GW_OK) fail(st, "writing stderr csv");
        std::ofstream out(a.out_prefix + ".json", std::ios::binary);
        if (!out) usage_fail("cannot open output " + a.out_prefix + ".json");
        out << j.dump(2) << "\n";
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

// ---- pushforward ------------------------------------------------------------------

gw_map* make_map(const std::string& spec) {
    if (spec.rfind("power:", 0) == 0) return gw_map_power(std::atoi(spec.c_str() + 6));
    if (spec == "exp") return gw_map_exp();
    if (spec == "tan-quarter-strip") return gw_map_tan_quarter_strip();
    if (spec.rfind("disk-automorphism:", 0) == 0)
        return gw_map_disk_automorphism(require_complex(spec.substr(18), "map parameter"));
    if (spec.rfind("mobius:", 0) == 0) {
        std::vector<gw_complex> coef;
        std::string rest = spec.substr(7);
        std::size_t pos = 0;
        while (coef.size() < 4) {
            const std::size_t next = rest.find(';', pos);
            const std::string tok =
                next == std::string::npos ? rest.substr(pos) : rest.substr(pos, next - pos);
            coef.push_back(require_complex(tok, "mobius coefficient"));
            if (next == std::string::npos) break;
            pos = next + 1;
        }
        if (coef.size() != 4) usage_fail("mobius:a;b;c;d needs four coefficients");
        return gw_map_mobius(coef[0], coef[1], coef[2], coef[3]);
    }
    usage_fail("unknown map '" + spec +
               "' (power:K | exp | mobius:a;b;c;d | disk-automorphism:A | tan-quarter-strip)");
}

struct PushArgs {
    std::string map_spec = "power:2";
    Flags domain_flags;
    std::string source = "0.5";
    std::string target;
    bool no_multiplicity = false;
    std::string out_path;
};

int run_pushforward(const PushArgs& a) {
    std::unique_ptr<gw_map, decltype(&gw_map_free)> map(make_map(a.map_spec), &gw_map_free);
    if (!map) usage_fail("cannot build map " + a.map_spec);
    DomainHandle domain;
    make_domain(a.domain_flags, domain);
    const gw_complex source = require_complex(a.source, "--source");
    const gw_complex target = require_complex(a.target, "--target");

    std::unique_ptr<gw_pushforward, decltype(&gw_pushforward_free)> push(
        gw_pushforward_new(map.get(), domain.ptr, source), &gw_pushforward_free);
    if (!push) usage_fail("source must lie in the base domain");

    gw_green_value g{};
    gw_status st = gw_pushforward_eval(push.get(), target, a.no_multiplicity ? 0 : 1, &g);
    if (st != GW_OK) fail(st, "pushforward evaluation");

    gw_complex points[64];
    int mults[64];
    int count = 0;
    st = gw_map_preimages(map.get(), domain.ptr, target, points, mults, 64, &count);
    if (st != GW_OK) fail(st, "preimage enumeration");

    json j;
    j["map"] = a.map_spec;
    j["base_domain"] = a.domain_flags.domain;
    j["source"] = {source.re, source.im};
    j["target"] = {target.re, target.im};
    j["multiplicity_weighted"] = !a.no_multiplicity;
    j["value"] = g.value;
    json pre = json::array();
    for (int i = 0; i < std::min(count, 64); ++i)
        pre.push_back({{"point", {points[i].re, points[i].im}}, {"multiplicity", mults[i]}});
    j["preimages"] = std::move(pre);
    emit(j, a.out_path);
    return 0;
}

// ---- kernel -------------------------------------------------------------------------

struct KernelArgs {
    std::string kernel = "half-plane";
    double t = 1.0;
    std::string z = "i";
    std::string w = "2i";
    int images = 40;
    double quad_tol = 1e-9;
    bool integrate = false;
    std::string out_path;
};

int run_kernel(const KernelArgs& a) {
    const gw_complex z = require_complex(a.z, "--z");
    const gw_complex w = require_complex(a.w, "--w");
    json j;
    j["kernel"] = a.kernel;
    j["z"] = {z.re, z.im};
    j["w"] = {w.re, w.im};

    if (a.integrate) {
        gw_kernel k;
        if (a.kernel == "half-plane")
            k = GW_KERNEL_HALF_PLANE;
        else if (a.kernel == "strip")
            k = GW_KERNEL_STRIP;
        else
            usage_fail("--integrate supports half-plane | strip");
        gw_green_value g{};
        const gw_status st = gw_integrate_kernel(k, z, w, a.images, a.quad_tol, &g);
        if (st != GW_OK) fail(st, "kernel time integral");
        j["value"] = g.value;
        gw_green_value ref{};
        const gw_status rs = k == GW_KERNEL_HALF_PLANE ? gw_greens_half_plane(z, w, &ref)
                                                       : gw_greens_strip_map(z, w, &ref);
        if (rs == GW_OK && ref.kind == GW_GREEN_FINITE) j["closed_form"] = ref.value;
    } else {
        double v = 0.0;
        gw_status st = GW_OK;
        if (a.kernel == "plane")
            st = gw_rho_plane(a.t, z, w, &v);
        else if (a.kernel == "half-plane")
            st = gw_rho_half_plane(a.t, z, w, &v);
        else if (a.kernel == "strip")
            st = gw_rho_strip(a.t, z, w, a.images, &v);
        else {
            usage_fail("unknown kernel '" + a.kernel + "' (plane | half-plane | strip)");
        }
        if (st != GW_OK) fail(st, "kernel evaluation");
        j["t"] = a.t;
        j["value"] = v;
    }
    emit(j, a.out_path);
    return 0;
}

// ---- heatmap -------------------------------------------------------------------------

struct HeatmapArgs {
    Flags domain_flags;
    std::string stopping;
    std::string source = "0";
    std::vector<double> grid;
    int nx = 64, ny = 64;
    std::string out_path;
};

int run_heatmap(const HeatmapArgs& a) {
    if (a.grid.size() != 4) usage_fail("--grid expects x0,y0,x1,y1");
    const int turns = parse_winding(a.stopping);
    DomainHandle domain;
    gw_complex source{1.0, 0.0};
    if (!turns) {
        make_domain(a.domain_flags, domain);
        source = require_complex(a.source, "--source");
    }

    const double dx = (a.grid[2] - a.grid[0]) / a.nx;
    const double dy = (a.grid[3] - a.grid[1]) / a.ny;

    std::ostringstream csv;
    char buf[512];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%d,%d\n", a.grid[0], a.grid[1], dx, dy,
                  a.nx, a.ny);
    csv << buf;
    for (int iy = 0; iy < a.ny; ++iy) {
        for (int ix = 0; ix < a.nx; ++ix) {
            const gw_complex w{a.grid[0] + (ix + 0.5) * dx, a.grid[1] + (iy + 0.5) * dy};
            gw_green_value g{};
            const gw_status st = turns ? gw_greens_winding(turns, w, &g)
                                       : gw_greens_exit(domain.ptr, source, w, &g);
            const double v =
                (st == GW_OK && g.kind == GW_GREEN_FINITE) ? g.value
                                                           : std::numeric_limits<double>::quiet_NaN();
            std::snprintf(buf, sizeof buf, ix + 1 == a.nx ? "%.17g\n" : "%.17g,", v);
            csv << buf;
        }
    }
    if (a.out_path.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream out(a.out_path, std::ios::binary);
        if (!out) usage_fail("cannot open output " + a.out_path);
        out << csv.str();
    }
    return 0;
}

void add_domain_flags(CLI::App* cmd, Flags& f) {
    cmd->add_option("--domain", f.domain,
                    "disk | upper-half-plane | right-half-plane | strip | punctured-disk")
        ->capture_default_str();
    cmd->add_option("--center", f.center, "disk center (complex)")->capture_default_str();
    cmd->add_option("--radius", f.radius, "disk radius")->capture_default_str();
    cmd->add_option("--half-width", f.half_width, "strip half-width")->capture_default_str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"planar Brownian Green's functions: exact values, Monte Carlo occupation "
                 "densities, infinite-product identity checks"};
    app.require_subcommand(1);

    // exact
    ExactArgs exact;
    CLI::App* cmd_exact = app.add_subcommand("exact", "evaluate a closed-form Green's function");
    add_domain_flags(cmd_exact, exact.domain_flags);
    cmd_exact->add_option("--stopping", exact.stopping, "winding:N (source fixed at 1)");
    cmd_exact->add_option("--source", exact.source, "source point (complex)")->capture_default_str();
    cmd_exact->add_option("--target", exact.target, "target point (complex)")->required();
    cmd_exact->add_option("--method", exact.method, "strip evaluator: map | series")
        ->capture_default_str();
    cmd_exact->add_option("--n-pairs", exact.n_pairs, "series pairs N")->capture_default_str();
    cmd_exact->add_option("--tail-tol", exact.tail_tol, "series tail tolerance")
        ->capture_default_str();
    cmd_exact->add_option("--out", exact.out_path, "write JSON here instead of stdout");

    // identity
    std::string id_name;
    double id_a = 0.0, id_b = 0.0, id_c = 0.0;
    int id_n = 10000;
    CLI::App* cmd_identity =
        app.add_subcommand("identity", "verify an infinite-product identity (exit 0 iff pass)");
    cmd_identity
        ->add_option("name", id_name,
                     "mirror | fourHands | sinhProd | coshProd | sinProd | cosProd | tanSq | tanProd")
        ->required();
    cmd_identity->add_option("--a", id_a, "parameter a")->capture_default_str();
    cmd_identity->add_option("--b", id_b, "parameter b")->capture_default_str();
    cmd_identity->add_option("--c", id_c, "parameter c")->capture_default_str();
    cmd_identity->add_option("--N", id_n, "paired truncation index")->capture_default_str();

    // mc
    McArgs mc;
    gw_mc_config_default(&mc.cfg);
    mc.cfg.workers = 0;
    std::uint64_t mc_seed = 0;
    CLI::App* cmd_mc = app.add_subcommand("mc", "Monte Carlo occupation density over a grid");
    add_domain_flags(cmd_mc, mc.domain_flags);
    cmd_mc->add_option("--stopping", mc.stopping, "winding:N instead of a domain exit");
    cmd_mc->add_option("--start", mc.start, "start point (complex; winding default 1)")
        ->capture_default_str();
    cmd_mc->add_option("--grid", mc.grid, "x0,y0,x1,y1")->delimiter(',')->expected(4)->required();
    cmd_mc->add_option("--nx", mc.nx, "cells in x")->capture_default_str();
    cmd_mc->add_option("--ny", mc.ny, "cells in y")->capture_default_str();
    cmd_mc->add_option("--npaths", mc.cfg.n_paths, "number of paths")->capture_default_str();
    cmd_mc->add_option("--dt", mc.cfg.dt, "base time step")->capture_default_str();
    CLI::Option* seed_opt =
        cmd_mc->add_option("--seed", mc_seed, "RNG seed (GREENWALK_SEED when absent)");
    cmd_mc->add_option("--workers", mc.cfg.workers, "worker threads (0 = available parallelism)")
        ->capture_default_str();
    cmd_mc->add_option("--angular-cap", mc.cfg.angular_cap, "max |arg increment| per step")
        ->capture_default_str();
    cmd_mc->add_flag("--bridge,!--no-bridge", mc.cfg.bridge_correction,
                     "Brownian-bridge boundary crossing correction");
    cmd_mc->add_flag("--adaptive,!--no-adaptive", mc.cfg.adaptive_stepping,
                     "power-of-two step coarsening away from resolution constraints");
    cmd_mc->add_option("--max-steps", mc.cfg.max_steps_per_path, "per-path step cap")
        ->capture_default_str();
    cmd_mc->add_option("--out", mc.out_prefix, "output prefix (.csv, .stderr.csv, .json)");
    cmd_mc->add_flag("--reference", mc.reference, "add closed-form comparison column");

    // pushforward
    PushArgs push;
    CLI::App* cmd_push = app.add_subcommand("pushforward", "multiplicity-weighted preimage sum");
    cmd_push->add_option("--map", push.map_spec,
                         "power:K | exp | mobius:a;b;c;d | disk-automorphism:A | tan-quarter-strip")
        ->capture_default_str();
    add_domain_flags(cmd_push, push.domain_flags);
    cmd_push->add_option("--source", push.source, "base source (complex)")->capture_default_str();
    cmd_push->add_option("--target", push.target, "target point (complex)")->required();
    cmd_push->add_flag("--no-multiplicity", push.no_multiplicity,
                       "diagnostic: drop multiplicity weights");
    cmd_push->add_option("--out", push.out_path, "write JSON here instead of stdout");

    // kernel
    KernelArgs kernel;
    CLI::App* cmd_kernel =
        app.add_subcommand("kernel", "killed transition densities and their time integrals");
    cmd_kernel->add_option("--kernel", kernel.kernel, "plane | half-plane | strip")
        ->capture_default_str();
    cmd_kernel->add_option("--t", kernel.t, "time")->capture_default_str();
    cmd_kernel->add_option("--z", kernel.z, "start point (complex)")->capture_default_str();
    cmd_kernel->add_option("--w", kernel.w, "end point (complex)")->capture_default_str();
    cmd_kernel->add_option("--images", kernel.images, "strip image pairs")->capture_default_str();
    cmd_kernel->add_option("--quad-tol", kernel.quad_tol, "quadrature tolerance")
        ->capture_default_str();
    cmd_kernel->add_flag("--integrate", kernel.integrate,
                         "integrate over time (Green's function by quadrature)");
    cmd_kernel->add_option("--out", kernel.out_path, "write JSON here instead of stdout");

    // heatmap
    HeatmapArgs heatmap;
    CLI::App* cmd_heatmap =
        app.add_subcommand("heatmap", "closed-form Green's function sampled on a grid (CSV)");
    add_domain_flags(cmd_heatmap, heatmap.domain_flags);
    cmd_heatmap->add_option("--stopping", heatmap.stopping, "winding:N instead of a domain exit");
    cmd_heatmap->add_option("--source", heatmap.source, "source point (complex)")
        ->capture_default_str();
    cmd_heatmap->add_option("--grid", heatmap.grid, "x0,y0,x1,y1")
        ->delimiter(',')
        ->expected(4)
        ->required();
    cmd_heatmap->add_option("--nx", heatmap.nx, "cells in x")->capture_default_str();
    cmd_heatmap->add_option("--ny", heatmap.ny, "cells in y")->capture_default_str();
    cmd_heatmap->add_option("--out", heatmap.out_path, "CSV file (stdout when absent)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 64;
    }

    try {
        if (cmd_exact->parsed()) return run_exact(exact);
        if (cmd_identity->parsed()) return run_identity(id_name, id_a, id_b, id_c, id_n);
        if (cmd_mc->parsed()) return run_mc(mc, seed_opt, mc_seed);
        if (cmd_push->parsed()) return run_pushforward(push);
        if (cmd_kernel->parsed()) return run_kernel(kernel);
        if (cmd_heatmap->parsed()) return run_heatmap(heatmap);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 64;
}
