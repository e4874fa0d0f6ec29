#include "greenwalk/mc_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace greenwalk {

void validate(const MCConfig& cfg) {
    if (cfg.n_paths < 1) raise(errc::invalid_argument, "n_paths must be >= 1");
    if (!(cfg.dt > 0.0)) raise(errc::invalid_argument, "dt must be positive");
    if (!(cfg.angular_cap > 0.0 && cfg.angular_cap <= kPi / 4.0))
        raise(errc::invalid_argument, "angular_cap must lie in (0, pi/4]");
    if (cfg.workers < 0) raise(errc::invalid_argument, "workers must be >= 0");
    if (cfg.max_steps_per_path < 1) raise(errc::invalid_argument, "max_steps_per_path must be >= 1");
}

// ---- RNG -----------------------------------------------------------------

namespace {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBull;
    x ^= x >> 31;
    return x;
}

inline double to_unit(std::uint64_t u) { return double(u >> 11) * 0x1.0p-53; }

// Per-path stream: xoshiro256++ seeded by a splitmix64 run keyed on
// (seed, path index). Streams never branch on geometry, which is what makes
// coupled-seed comparisons across nested domains exact.
class Xoshiro256pp {
public:
    Xoshiro256pp(std::uint64_t seed, std::int64_t path) {
        std::uint64_t sm = mix64(seed ^ mix64(0x5851F42D4C957F2Dull * std::uint64_t(path) + 1));
        for (auto& word : s_) word = splitmix64_next(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    double unit() { return to_unit(next()); }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

// Marsaglia polar pairs drawn from the per-path stream.
class GaussianStream {
public:
    GaussianStream(std::uint64_t seed, std::int64_t path) : rng_(seed, path) {}

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * rng_.unit() - 1.0;
            v = 2.0 * rng_.unit() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

private:
    Xoshiro256pp rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Stateless uniform for rare event decisions, a pure function of
// (seed, path, step, slot): identical across runs whose trajectories agree,
// regardless of how many events either run has consumed so far.
inline double event_uniform(std::uint64_t seed, std::int64_t path, std::int64_t step,
                            std::uint32_t slot) {
    std::uint64_t h = mix64(seed ^ 0x6A09E667F3BCC909ull);
    h = mix64(h ^ (0x9E3779B97F4A7C15ull * std::uint64_t(path) + 0xD1B54A32D192ED03ull));
    h = mix64(h ^ (0x8CB92BA72F3D8DD7ull * std::uint64_t(step) + slot));
    return to_unit(h);
}

// Counter-based Gaussian pair (Box-Muller) for bridge-bisection midpoints.
inline void event_gaussians(std::uint64_t seed, std::int64_t path, std::int64_t step,
                            std::uint32_t sub, double& g1, double& g2) {
    const double u1 = std::max(event_uniform(seed, path, step, 64 + 2 * sub), 0x1.0p-53);
    const double u2 = event_uniform(seed, path, step, 65 + 2 * sub);
    const double r = std::sqrt(-2.0 * std::log(u1));
    g1 = r * std::cos(kTwoPi * u2);
    g2 = r * std::sin(kTwoPi * u2);
}

// ---- step sizing -----------------------------------------------------------

constexpr int kTickShift = 20;                       // tick = dt / 2^20
constexpr int kMaxCoarsen = 40;                      // dt_eff <= dt * 2^40
constexpr double kBridgeSkipExponent = 27.6;         // p < 1e-12: skip the draw
constexpr int kBisectionDepth = 20;

inline std::uint64_t ticks_for(int k) {
    const int shift = kTickShift + k;
    return shift >= 0 ? (std::uint64_t(1) << shift) : 0;
}

struct StepSizer {
    double base_dt = 1e-3;
    bool adaptive = true;
    bool winding = false;
    double ang_coeff = 0.0;       // (angular_cap / 4)^2
    bool has_region = false;
    double rx0 = 0.0, ry0 = 0.0, rx1 = 0.0, ry1 = 0.0;
    double region_dt = 1e-3;      // max(base_dt, (cell_min/6)^2): resolve the cells

    void set_region(double x0, double y0, double x1, double y1, double cell_min) {
        has_region = true;
        rx0 = x0;
        ry0 = y0;
        rx1 = x1;
        ry1 = y1;
        region_dt = std::max(base_dt, cell_min * cell_min / 36.0);
    }

    // Power-of-two exponent k with dt_eff = base_dt * 2^k. Coarsening (k > 0)
    // requires every constraint to allow it; the winding angular rule may
    // refine below the base step (k < 0) near the origin.
    int exponent(Complex z, double dist_boundary) const {
        if (!adaptive) return 0;
        double target = std::ldexp(base_dt, kMaxCoarsen);
        if (dist_boundary >= 0.0)
            target = std::min(target, std::max(base_dt, dist_boundary * dist_boundary / 16.0));
        if (has_region) {
            const double ex = std::max({rx0 - z.real(), 0.0, z.real() - rx1});
            const double ey = std::max({ry0 - z.imag(), 0.0, z.imag() - ry1});
            target = std::min(target, std::max(region_dt, (ex * ex + ey * ey) / 16.0));
        }
        if (winding) target = std::min(target, ang_coeff * std::norm(z));
        if (!(target > 0.0)) return -900;
        int k = std::ilogb(target / base_dt);
        if (k > kMaxCoarsen) k = kMaxCoarsen;
        if (k < -900) k = -900;
        if (!winding && k < 0) k = 0;
        return k;
    }
};

inline Complex midpoint(Complex a, Complex b) {
    return {0.5 * (a.real() + b.real()), 0.5 * (a.imag() + b.imag())};
}

// ---- exit geometries ---------------------------------------------------------

struct ExitHit {
    bool exited = false;
    double frac = 0.0;        // time fraction of the step before the crossing
    Complex position{0.0, 0.0};
};

struct HalfPlaneGeom {
    double dist(Complex z) const { return z.imag(); }
    static ExitHit line_hit(Complex z0, Complex z1, double frac, bool horizontal, double level) {
        ExitHit h;
        h.exited = true;
        h.frac = frac;
        h.position = horizontal
                         ? Complex(z0.real() + frac * (z1.real() - z0.real()), level)
                         : Complex(level, z0.imag() + frac * (z1.imag() - z0.imag()));
        return h;
    }
    template <class Events>
    ExitHit check(Complex z0, double d0, Complex z1, double d1, double dt, bool bridge,
                  const Events& ev) const {
        if (d1 <= 0.0) return line_hit(z0, z1, d0 / (d0 - d1), true, 0.0);
        if (bridge && 2.0 * d0 * d1 < kBridgeSkipExponent * dt &&
            ev(0) < std::exp(-2.0 * d0 * d1 / dt))
            return line_hit(z0, z1, d0 / (d0 + d1), true, 0.0);
        return {};
    }
};

struct RightHalfPlaneGeom {
    double dist(Complex z) const { return z.real(); }
    template <class Events>
    ExitHit check(Complex z0, double d0, Complex z1, double d1, double dt, bool bridge,
                  const Events& ev) const {
        if (d1 <= 0.0) return HalfPlaneGeom::line_hit(z0, z1, d0 / (d0 - d1), false, 0.0);
        if (bridge && 2.0 * d0 * d1 < kBridgeSkipExponent * dt &&
            ev(0) < std::exp(-2.0 * d0 * d1 / dt))
            return HalfPlaneGeom::line_hit(z0, z1, d0 / (d0 + d1), false, 0.0);
        return {};
    }
};

struct DiskGeom {
    Complex center{0.0, 0.0};
    double radius = 1.0;
    double dist(Complex z) const { return radius - std::abs(z - center); }
    ExitHit circle_hit(Complex z0, Complex z1, double frac) const {
        ExitHit h;
        h.exited = true;
        h.frac = frac;
        Complex p = z0 + frac * (z1 - z0) - center;
        const double n = std::abs(p);
        if (n == 0.0) p = z1 - center;                 // degenerate interpolation
        h.position = center + p * (radius / std::abs(p));
        return h;
    }
    template <class Events>
    ExitHit check(Complex z0, double d0, Complex z1, double d1, double dt, bool bridge,
                  const Events& ev) const {
        if (d1 <= 0.0) return circle_hit(z0, z1, d0 / (d0 - d1));
        if (bridge && 2.0 * d0 * d1 < kBridgeSkipExponent * dt &&
            ev(0) < std::exp(-2.0 * d0 * d1 / dt))
            return circle_hit(z0, z1, d0 / (d0 + d1));
        return {};
    }
};

struct StripGeom {
    double half_width = 1.0;
    double dist(Complex z) const { return half_width - std::abs(z.imag()); }
    template <class Events>
    ExitHit check(Complex z0, double /*d0*/, Complex z1, double d1, double dt, bool bridge,
                  const Events& ev) const {
        const double y0 = z0.imag(), y1 = z1.imag();
        if (d1 <= 0.0) {
            // first-sample-outside: crossed exactly one line for any sane step
            if (y1 >= half_width)
                return HalfPlaneGeom::line_hit(z0, z1, (half_width - y0) / (y1 - y0), true,
                                               half_width);
            return HalfPlaneGeom::line_hit(z0, z1, (y0 + half_width) / (y0 - y1), true,
                                           -half_width);
        }
        if (!bridge) return {};
        const double t0 = half_width - y0, t1 = half_width - y1;   // top distances
        const double b0 = y0 + half_width, b1 = y1 + half_width;   // bottom distances
        const double pt = 2.0 * t0 * t1 < kBridgeSkipExponent * dt
                              ? std::exp(-2.0 * t0 * t1 / dt) : 0.0;
        const double pb = 2.0 * b0 * b1 < kBridgeSkipExponent * dt
                              ? std::exp(-2.0 * b0 * b1 / dt) : 0.0;
        if (pt == 0.0 && pb == 0.0) return {};
        if (ev(0) >= pt + pb - pt * pb) return {};
        const bool top = ev(1) * (pt + pb) < pt;
        if (top)
            return HalfPlaneGeom::line_hit(z0, z1, t0 / (t0 + t1), true, half_width);
        return HalfPlaneGeom::line_hit(z0, z1, b0 / (b0 + b1), true, -half_width);
    }
};

// ---- sinks -------------------------------------------------------------------

struct NullSink {
    void credit(Complex, std::uint64_t) {}
    void record(Complex, double) {}
};

struct GridSink {
    explicit GridSink(const GridSpec& spec)
        : spec(spec),
          inv_dx(1.0 / spec.dx()),
          inv_dy(1.0 / spec.dy()),
          ticks(std::size_t(OccupationGrid::kBatches) * spec.nx * spec.ny, 0) {}

    GridSpec spec;
    double inv_dx, inv_dy;
    std::vector<std::uint64_t> ticks;
    int batch = 0;

    void credit(Complex mid, std::uint64_t t) {
        if (t == 0) return;
        const double fx = (mid.real() - spec.x0) * inv_dx;
        const double fy = (mid.imag() - spec.y0) * inv_dy;
        if (!(fx >= 0.0 && fx < double(spec.nx) && fy >= 0.0 && fy < double(spec.ny))) return;
        const int ix = int(fx), iy = int(fy);
        ticks[(std::size_t(batch) * spec.ny + iy) * spec.nx + ix] += t;
    }
    void record(Complex, double) {}
};

struct WindowSink {
    Complex center{0.0, 0.0};
    double radius_sq = 0.0;
    std::uint64_t ticks[OccupationGrid::kBatches] = {};
    int batch = 0;

    void credit(Complex mid, std::uint64_t t) {
        if (std::norm(mid - center) <= radius_sq) ticks[batch] += t;
    }
    void record(Complex, double) {}
};

struct RecordSink {
    PathSample* out = nullptr;
    void credit(Complex, std::uint64_t) {}
    void record(Complex z, double t) {
        out->points.push_back(z);
        out->times.push_back(t);
    }
};

// ---- path runners --------------------------------------------------------------

struct PathEnd {
    PathSample::Stop stop = PathSample::Stop::Truncated;
    Complex position{0.0, 0.0};
    double time = 0.0;
    int winding_sign = 0;
    double total_arg = 0.0;
};

struct EngineParams {
    double base_dt = 1e-3;
    std::uint64_t seed = 0;
    bool bridge = true;
    std::int64_t max_steps = 100'000'000;
    double tan_cap = 0.0;     // tan(angular_cap)
    int turns = 0;            // winding index (0 for exit rules)
    StepSizer sizer;
};

template <class Geom, class Sink>
PathEnd run_exit_path(const Geom& geom, Complex start, std::int64_t path,
                      const EngineParams& P, Sink& sink) {
    GaussianStream gauss(P.seed, path);
    Complex z = start;
    double d0 = geom.dist(z);
    double t = 0.0;
    sink.record(z, 0.0);

    for (std::int64_t step = 0; step < P.max_steps; ++step) {
        const int k = P.sizer.exponent(z, d0);
        const double dt = std::ldexp(P.base_dt, k);
        const double s = std::sqrt(dt);
        const Complex z1(z.real() + s * gauss.next(), z.imag() + s * gauss.next());
        const double d1 = geom.dist(z1);

        const auto ev = [&](std::uint32_t slot) { return event_uniform(P.seed, path, step, slot); };
        const ExitHit hit = geom.check(z, d0, z1, d1, dt, P.bridge, ev);
        if (hit.exited) {
            const std::uint64_t full = ticks_for(k);
            sink.credit(midpoint(z, hit.position),
                        std::uint64_t(std::llround(hit.frac * double(full))));
            t += hit.frac * dt;
            sink.record(hit.position, t);
            return {PathSample::Stop::HitBoundary, hit.position, t, 0, 0.0};
        }
        sink.credit(midpoint(z, z1), ticks_for(k));
        t += dt;
        sink.record(z1, t);
        z = z1;
        d0 = d1;
    }
    return {PathSample::Stop::Truncated, z, t, 0, 0.0};
}

// Winding run: exact continuous-argument tracking. W counts branch-cut
// crossings of the negative real axis so that arg = Arg(z) + 2 pi W stays
// continuous; with every committed increment capped at angular_cap (< pi/2),
// |arg| >= 2 pi n holds at a committed endpoint iff (W, sign of Im) hits the
// gate below, so no trigonometry runs in the hot loop.
template <class Sink>
PathEnd run_winding_path(Complex start, std::int64_t path, const EngineParams& P, Sink& sink) {
    GaussianStream gauss(P.seed, path);
    Complex z = start;
    double t = 0.0;
    long long W = 0;
    std::int64_t committed = 0;
    sink.record(z, 0.0);

    struct Segment { Complex a, b; int depth; };
    std::vector<Segment> stack;

    for (std::int64_t step = 0; committed < P.max_steps; ++step) {
        const int k = P.sizer.exponent(z, -1.0);
        const double dt = std::ldexp(P.base_dt, k);
        const double s = std::sqrt(dt);
        const Complex z1(z.real() + s * gauss.next(), z.imag() + s * gauss.next());

        std::uint32_t sub = 0;
        stack.clear();
        stack.push_back({z, z1, 0});
        while (!stack.empty()) {
            const Segment seg = stack.back();
            stack.pop_back();
            const double dot = seg.a.real() * seg.b.real() + seg.a.imag() * seg.b.imag();
            const double cross = seg.a.real() * seg.b.imag() - seg.a.imag() * seg.b.real();
            if (!(dot > 0.0 && std::abs(cross) <= P.tan_cap * dot)) {
                // |arg increment| above the cap: bisect the Brownian bridge.
                if (seg.depth >= kBisectionDepth)
                    raise(errc::step_too_coarse,
                          "winding refinement exhausted 20 bridge bisections below the sized step");
                const double sub_dt = std::ldexp(P.base_dt, k - seg.depth);
                double g1, g2;
                event_gaussians(P.seed, path, step, sub++, g1, g2);
                const double hs = 0.5 * std::sqrt(sub_dt);
                const Complex m(0.5 * (seg.a.real() + seg.b.real()) + hs * g1,
                                0.5 * (seg.a.imag() + seg.b.imag()) + hs * g2);
                stack.push_back({m, seg.b, seg.depth + 1});
                stack.push_back({seg.a, m, seg.depth + 1});
                continue;
            }

            const double sub_dt = std::ldexp(P.base_dt, k - seg.depth);
            const bool up0 = seg.a.imag() > 0.0, up1 = seg.b.imag() > 0.0;
            if (up0 != up1) {
                const double xc = seg.a.real() + (seg.b.real() - seg.a.real()) * seg.a.imag() /
                                                     (seg.a.imag() - seg.b.imag());
                if (xc < 0.0) W += up0 ? 1 : -1;
            }
            sink.credit(midpoint(seg.a, seg.b), ticks_for(k - seg.depth));
            t += sub_dt;
            sink.record(seg.b, t);
            z = seg.b;
            ++committed;

            const bool gate_pos = (W == P.turns && seg.b.imag() >= 0.0);
            const bool gate_neg = (W == -P.turns && seg.b.imag() <= 0.0);
            if (gate_pos || gate_neg) {
                const double total = std::atan2(seg.b.imag(), seg.b.real()) + kTwoPi * double(W);
                return {PathSample::Stop::WoundOut, seg.b, t, gate_pos ? 1 : -1, total};
            }
            if (committed >= P.max_steps) break;
        }
    }
    return {PathSample::Stop::Truncated, z, t, 0,
            std::atan2(z.imag(), z.real()) + kTwoPi * double(W)};
}

template <class Sink>
PathEnd run_path(const StoppingRule& rule, Complex start, std::int64_t path,
                 const EngineParams& P, Sink& sink) {
    if (std::holds_alternative<WindingTime>(rule))
        return run_winding_path(start, path, P, sink);

    const Domain& domain = std::get<ExitTime>(rule).domain;
    if (const auto* disk = std::get_if<Disk>(&domain))
        return run_exit_path(DiskGeom{disk->center, disk->radius}, start, path, P, sink);
    if (const auto* strip = std::get_if<Strip>(&domain))
        return run_exit_path(StripGeom{strip->half_width}, start, path, P, sink);
    if (std::holds_alternative<RightHalfPlane>(domain))
        return run_exit_path(RightHalfPlaneGeom{}, start, path, P, sink);
    if (std::holds_alternative<PuncturedDisk>(domain))
        return run_exit_path(DiskGeom{Complex(0.0, 0.0), 1.0}, start, path, P, sink);
    return run_exit_path(HalfPlaneGeom{}, start, path, P, sink);
}

EngineParams make_params(const MCConfig& cfg, const StoppingRule& rule) {
    EngineParams P;
    P.base_dt = cfg.dt;
    P.seed = cfg.seed;
    P.bridge = cfg.bridge_correction;
    P.max_steps = cfg.max_steps_per_path;
    P.tan_cap = std::tan(cfg.angular_cap);
    P.sizer.base_dt = cfg.dt;
    P.sizer.adaptive = cfg.adaptive_stepping;
    if (const auto* wind = std::get_if<WindingTime>(&rule)) {
        P.turns = wind->turns;
        P.sizer.winding = true;
        const double c = cfg.angular_cap / 4.0;
        P.sizer.ang_coeff = c * c;
    }
    return P;
}

int resolve_workers(int workers) {
    if (workers > 0) return workers;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : int(hw);
}

// Runs paths w, w + W, w + 2W, ... on each of W workers. make_sink(worker)
// builds the worker-local sink; on_path(worker, sink, path, end) consumes
// results. Exceptions propagate after join.
template <class MakeSink, class OnPath>
void run_paths(const StoppingRule& rule, Complex start, const MCConfig& cfg,
               const EngineParams& P, MakeSink make_sink, OnPath on_path) {
    const int workers = resolve_workers(cfg.workers);
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            try {
                auto&& sink = make_sink(w);
                for (std::int64_t i = w; i < cfg.n_paths; i += workers) {
                    sink.batch = int(i % OccupationGrid::kBatches);
                    const PathEnd end = run_path(rule, start, i, P, sink);
                    on_path(w, sink, i, end);
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace

// ---- OccupationGrid --------------------------------------------------------------

OccupationGrid::OccupationGrid(const GridSpec& spec, double dt)
    : spec_(spec),
      dt_(dt),
      cell_ticks_(std::size_t(spec.nx) * spec.ny, 0),
      batch_cell_ticks_(std::size_t(kBatches) * spec.nx * spec.ny, 0) {
    if (spec.nx < 1 || spec.ny < 1 || !(spec.x1 > spec.x0) || !(spec.y1 > spec.y0))
        raise(errc::invalid_argument, "grid must have positive extent and cell counts");
}

double OccupationGrid::density(int ix, int iy) const {
    const double tick_time = std::ldexp(dt_, -kTickShift);
    const double area = spec_.dx() * spec_.dy();
    return double(ticks(ix, iy)) * tick_time / (area * double(std::max<std::int64_t>(n_paths_, 1)));
}

double OccupationGrid::std_error(int ix, int iy) const {
    const double tick_time = std::ldexp(dt_, -kTickShift);
    const double area = spec_.dx() * spec_.dy();
    double mean = 0.0;
    double values[kBatches];
    for (int b = 0; b < kBatches; ++b) {
        const std::int64_t nb = (n_paths_ - 1 - b) / kBatches + 1;   // paths with i % 32 == b
        values[b] = double(batch_ticks(b, ix, iy)) * tick_time /
                    (area * double(std::max<std::int64_t>(nb, 1)));
        mean += values[b];
    }
    mean /= kBatches;
    double var = 0.0;
    for (int b = 0; b < kBatches; ++b) var += (values[b] - mean) * (values[b] - mean);
    var /= (kBatches - 1);
    return std::sqrt(var / kBatches);
}

std::uint64_t OccupationGrid::ticks(int ix, int iy) const {
    return cell_ticks_[std::size_t(iy) * spec_.nx + ix];
}

std::uint64_t OccupationGrid::batch_ticks(int batch, int ix, int iy) const {
    return batch_cell_ticks_[(std::size_t(batch) * spec_.ny + iy) * spec_.nx + ix];
}

void OccupationGrid::add_ticks(int batch, int ix, int iy, std::uint64_t t) {
    batch_cell_ticks_[(std::size_t(batch) * spec_.ny + iy) * spec_.nx + ix] += t;
    cell_ticks_[std::size_t(iy) * spec_.nx + ix] += t;
}

void OccupationGrid::add_paths(std::int64_t n, std::int64_t truncated) {
    n_paths_ += n;
    truncated_paths_ += truncated;
}

void OccupationGrid::merge(const OccupationGrid& other) {
    if (other.spec_.nx != spec_.nx || other.spec_.ny != spec_.ny || other.dt_ != dt_)
        raise(errc::invalid_argument, "grid merge needs identical spec and dt");
    for (std::size_t i = 0; i < cell_ticks_.size(); ++i) cell_ticks_[i] += other.cell_ticks_[i];
    for (std::size_t i = 0; i < batch_cell_ticks_.size(); ++i)
        batch_cell_ticks_[i] += other.batch_cell_ticks_[i];
    n_paths_ += other.n_paths_;
    truncated_paths_ += other.truncated_paths_;
}

namespace {

void write_csv_common(std::ostream& out, const OccupationGrid& grid, bool stderr_values) {
    const GridSpec& s = grid.spec();
    char buf[512];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%d,%d\n", s.x0, s.y0, s.dx(), s.dy(),
                  s.nx, s.ny);
    out << buf;
    for (int iy = 0; iy < s.ny; ++iy) {
        for (int ix = 0; ix < s.nx; ++ix) {
            const double v = stderr_values ? grid.std_error(ix, iy) : grid.density(ix, iy);
            std::snprintf(buf, sizeof buf, ix + 1 == s.nx ? "%.17g\n" : "%.17g,", v);
            out << buf;
        }
    }
}

} // namespace

void OccupationGrid::write_csv(std::ostream& out) const { write_csv_common(out, *this, false); }
void OccupationGrid::write_stderr_csv(std::ostream& out) const { write_csv_common(out, *this, true); }

ParsedGridCsv parse_grid_csv(std::istream& in) {
    ParsedGridCsv parsed;
    char comma;
    double dx, dy;
    if (!(in >> parsed.spec.x0 >> comma >> parsed.spec.y0 >> comma >> dx >> comma >> dy >> comma >>
          parsed.spec.nx >> comma >> parsed.spec.ny))
        raise(errc::invalid_argument, "grid csv: bad header");
    parsed.spec.x1 = parsed.spec.x0 + dx * parsed.spec.nx;
    parsed.spec.y1 = parsed.spec.y0 + dy * parsed.spec.ny;
    const std::size_t total = std::size_t(parsed.spec.nx) * parsed.spec.ny;
    parsed.values.resize(total);
    for (std::size_t i = 0; i < total; ++i) {
        if (i % parsed.spec.nx != 0) {
            if (!(in >> comma)) raise(errc::invalid_argument, "grid csv: missing separator");
        }
        if (!(in >> parsed.values[i])) raise(errc::invalid_argument, "grid csv: missing value");
    }
    return parsed;
}

// ---- public operations --------------------------------------------------------------

PathSample sample_path(Complex start, const StoppingRule& rule, const MCConfig& cfg) {
    validate(cfg);
    validate(rule, start);
    const EngineParams P = make_params(cfg, rule);

    PathSample sample;
    RecordSink sink{&sample};
    const PathEnd end = run_path(rule, start, 0, P, sink);
    sample.stopped = end.stop;
    sample.stop_position = end.position;
    sample.winding_sign = end.winding_sign;
    sample.total_arg = end.total_arg;
    return sample;
}

std::vector<Complex> sample_stop_positions(Complex start, const StoppingRule& rule,
                                           std::int64_t n_paths, const MCConfig& cfg) {
    validate(cfg);
    validate(rule, start);
    MCConfig c = cfg;
    c.n_paths = n_paths;
    const EngineParams P = make_params(c, rule);

    const std::size_t count = static_cast<std::size_t>(n_paths);
    std::vector<Complex> stops(count);
    std::vector<char> ok(count, 0);
    struct Sink : NullSink { int batch = 0; };
    run_paths(rule, start, c, P, [](int) { return Sink{}; },
              [&](int, Sink&, std::int64_t i, const PathEnd& end) {
                  stops[std::size_t(i)] = end.position;
                  ok[std::size_t(i)] = end.stop != PathSample::Stop::Truncated;
              });
    std::vector<Complex> out;
    out.reserve(stops.size());
    for (std::size_t i = 0; i < stops.size(); ++i)
        if (ok[i]) out.push_back(stops[i]);
    return out;
}

OccupationGrid occupation_density(Complex start, const StoppingRule& rule, const GridSpec& grid,
                                  const MCConfig& cfg) {
    validate(cfg);
    validate(rule, start);
    OccupationGrid result(grid, cfg.dt);

    EngineParams P = make_params(cfg, rule);
    P.sizer.set_region(grid.x0, grid.y0, grid.x1, grid.y1, std::min(grid.dx(), grid.dy()));

    const int workers = resolve_workers(cfg.workers);
    std::vector<GridSink> sinks;
    sinks.reserve(workers);
    for (int w = 0; w < workers; ++w) sinks.emplace_back(grid);
    std::vector<std::int64_t> truncated(workers, 0);

    run_paths(rule, start, cfg, P,
              [&](int w) -> GridSink& { return sinks[w]; },
              [&](int w, GridSink&, std::int64_t, const PathEnd& end) {
                  if (end.stop == PathSample::Stop::Truncated) ++truncated[w];
              });

    for (int w = 0; w < workers; ++w) {
        for (int b = 0; b < OccupationGrid::kBatches; ++b)
            for (int iy = 0; iy < grid.ny; ++iy)
                for (int ix = 0; ix < grid.nx; ++ix) {
                    const std::uint64_t t =
                        sinks[w].ticks[(std::size_t(b) * grid.ny + iy) * grid.nx + ix];
                    if (t) result.add_ticks(b, ix, iy, t);
                }
        result.add_paths(0, truncated[w]);
    }
    result.add_paths(cfg.n_paths, 0);
    return result;
}

PathSample project_path(const PathSample& sample, const AnalyticMap& map) {
    PathSample out;
    out.stopped = sample.stopped;
    out.winding_sign = sample.winding_sign;
    out.total_arg = 0.0;
    out.points.reserve(sample.points.size());
    out.times.reserve(sample.times.size());

    double sigma = 0.0;
    double speed_prev = 0.0;
    for (std::size_t i = 0; i < sample.points.size(); ++i) {
        const double speed = std::norm(derivative(map, sample.points[i]));
        if (i > 0)
            sigma += 0.5 * (speed_prev + speed) * (sample.times[i] - sample.times[i - 1]);
        speed_prev = speed;
        out.points.push_back(evaluate(map, sample.points[i]));
        out.times.push_back(sigma);
    }
    out.stop_position = evaluate(map, sample.stop_position);
    return out;
}

PointEstimate estimate_greens(Complex start, const StoppingRule& rule, Complex w,
                              double window_radius, const MCConfig& cfg) {
    validate(cfg);
    validate(rule, start);
    if (!(window_radius > 0.0)) raise(errc::invalid_argument, "window radius must be positive");
    if (std::abs(w - start) <= window_radius)
        raise(errc::biased_window, "estimate window touches the source singularity");

    EngineParams P = make_params(cfg, rule);
    P.sizer.set_region(w.real() - window_radius, w.imag() - window_radius,
                       w.real() + window_radius, w.imag() + window_radius, window_radius);

    const int workers = resolve_workers(cfg.workers);
    std::vector<WindowSink> sinks(workers);
    for (auto& s : sinks) {
        s.center = w;
        s.radius_sq = window_radius * window_radius;
    }
    std::vector<std::int64_t> truncated(workers, 0);

    run_paths(rule, start, cfg, P,
              [&](int ww) -> WindowSink& { return sinks[ww]; },
              [&](int ww, WindowSink&, std::int64_t, const PathEnd& end) {
                  if (end.stop == PathSample::Stop::Truncated) ++truncated[ww];
              });

    std::uint64_t batch_ticks[OccupationGrid::kBatches] = {};
    std::int64_t total_truncated = 0;
    for (int ww = 0; ww < workers; ++ww) {
        for (int b = 0; b < OccupationGrid::kBatches; ++b) batch_ticks[b] += sinks[ww].ticks[b];
        total_truncated += truncated[ww];
    }

    const double tick_time = std::ldexp(cfg.dt, -kTickShift);
    const double area = kPi * window_radius * window_radius;
    std::uint64_t total = 0;
    double values[OccupationGrid::kBatches];
    double mean = 0.0;
    for (int b = 0; b < OccupationGrid::kBatches; ++b) {
        total += batch_ticks[b];
        const std::int64_t nb = (cfg.n_paths - 1 - b) / OccupationGrid::kBatches + 1;
        values[b] = double(batch_ticks[b]) * tick_time / (area * double(std::max<std::int64_t>(nb, 1)));
        mean += values[b];
    }
    mean /= OccupationGrid::kBatches;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= (OccupationGrid::kBatches - 1);

    PointEstimate est;
    est.value = double(total) * tick_time / (area * double(cfg.n_paths));
    est.std_error = std::sqrt(var / OccupationGrid::kBatches);
    est.truncated_paths = total_truncated;
    return est;
}

std::string grid_summary_json(const OccupationGrid& grid, Complex start, const StoppingRule& rule,
                              const MCConfig& cfg) {
    nlohmann::json j;
    const GridSpec& s = grid.spec();
    j["bounds"] = {{"x0", s.x0}, {"y0", s.y0}, {"x1", s.x1}, {"y1", s.y1}};
    j["shape"] = {{"nx", s.nx}, {"ny", s.ny}};
    j["cell"] = {{"dx", s.dx()}, {"dy", s.dy()}};
    j["start"] = {start.real(), start.imag()};
    if (const auto* exit = std::get_if<ExitTime>(&rule)) {
        j["stopping"] = {{"kind", "exit"}, {"domain", domain_name(exit->domain)}};
        if (const auto* d = std::get_if<Disk>(&exit->domain)) {
            j["stopping"]["center"] = {d->center.real(), d->center.imag()};
            j["stopping"]["radius"] = d->radius;
        } else if (const auto* st = std::get_if<Strip>(&exit->domain)) {
            j["stopping"]["half_width"] = st->half_width;
        }
    } else {
        j["stopping"] = {{"kind", "winding"}, {"turns", std::get<WindingTime>(rule).turns}};
    }
    j["config"] = {{"n_paths", cfg.n_paths},
                   {"dt", cfg.dt},
                   {"seed", cfg.seed},
                   {"workers", resolve_workers(cfg.workers)},
                   {"angular_cap", cfg.angular_cap},
                   {"bridge_correction", cfg.bridge_correction},
                   {"adaptive_stepping", cfg.adaptive_stepping},
                   {"max_steps_per_path", cfg.max_steps_per_path}};
    j["n_paths"] = grid.n_paths();
    j["truncated_paths"] = grid.truncated_paths();

    nlohmann::json densities = nlohmann::json::array();
    nlohmann::json errors = nlohmann::json::array();
    for (int iy = 0; iy < s.ny; ++iy) {
        nlohmann::json drow = nlohmann::json::array();
        nlohmann::json erow = nlohmann::json::array();
        for (int ix = 0; ix < s.nx; ++ix) {
            drow.push_back(grid.density(ix, iy));
            erow.push_back(grid.std_error(ix, iy));
        }
        densities.push_back(std::move(drow));
        errors.push_back(std::move(erow));
    }
    j["densities"] = std::move(densities);
    j["stderr"] = std::move(errors);
    return j.dump();
}

} // namespace greenwalk
