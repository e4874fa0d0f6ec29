#include "greenwalk/heat_kernel.hpp"

#include <cmath>
#include <vector>

namespace greenwalk {

double rho_plane(double t, Complex z, Complex w) {
    if (t <= 0.0) raise(errc::nonpositive_time, "transition density needs t > 0");
    return std::exp(-std::norm(z - w) / (2.0 * t)) / (kTwoPi * t);
}

double rho_half_plane(double t, Complex z, Complex w) {
    if (t <= 0.0) raise(errc::nonpositive_time, "transition density needs t > 0");
    if (z.imag() <= 0.0 || w.imag() <= 0.0)
        raise(errc::outside_domain, "rho_half_plane needs Im > 0 for both points");
    return rho_plane(t, z, w) - rho_plane(t, z, std::conj(w));
}

namespace {

double sq(double x) { return x * x; }

// Image sum over n in [-N, N]: sources at w + 4ni (kept) and conj(w) + (4n+2)i
// (subtracted). Unchecked: callers bound the truncation error themselves.
double rho_strip_raw(double t, Complex z, Complex w, int max_images) {
    const double ax = (z - w).real();
    const double ay = (z - w).imag();
    const double bx = (z - std::conj(w)).real();
    const double by = (z - std::conj(w)).imag();
    const double inv2t = 1.0 / (2.0 * t);
    double sum = 0.0;
    for (int n = -max_images; n <= max_images; ++n) {
        sum += std::exp(-(sq(ax) + sq(ay - 4.0 * n)) * inv2t);
        sum -= std::exp(-(sq(bx) + sq(by - (4.0 * n + 2.0))) * inv2t);
    }
    return sum / (kTwoPi * t);
}

// Absolute truncation certificate: the first omitted image group.
double rho_strip_tail_bound(double t, Complex z, Complex w, int max_images) {
    const double ax = (z - w).real();
    const double ay = (z - w).imag();
    const double bx = (z - std::conj(w)).real();
    const double by = (z - std::conj(w)).imag();
    const double inv2t = 1.0 / (2.0 * t);
    double b = 0.0;
    for (const int n : {max_images + 1, -(max_images + 1)}) {
        b += std::exp(-(sq(ax) + sq(ay - 4.0 * n)) * inv2t);
        b += std::exp(-(sq(bx) + sq(by - (4.0 * n + 2.0))) * inv2t);
    }
    return b / (kTwoPi * t);
}

} // namespace

double rho_strip(double t, Complex z, Complex w, const KernelSeriesConfig& cfg) {
    if (t <= 0.0) raise(errc::nonpositive_time, "transition density needs t > 0");
    if (cfg.max_images < 1) raise(errc::invalid_argument, "need max_images >= 1");
    if (std::abs(z.imag()) > 1.0 || std::abs(w.imag()) > 1.0)
        raise(errc::outside_domain, "rho_strip needs |Im| <= 1 for both points");
    if (rho_strip_tail_bound(t, z, w, cfg.max_images) > std::max(cfg.quad_rel_tol, 1e-12))
        raise(errc::non_converged,
              "strip image sum: first omitted image group exceeds the tolerance; raise max_images");
    return rho_strip_raw(t, z, w, cfg.max_images);
}

namespace {

// 15-point Gauss-Kronrod pair (7-point Gauss embedded) on [-1, 1].
constexpr double kKronrodX[8] = {
    0.0, 0.2077849550078985, 0.4058451513773972, 0.5860872354676911,
    0.7415311855993945, 0.8648644233597691, 0.9491079123427585, 0.9914553711208126};
constexpr double kKronrodW[8] = {
    0.2094821410847278, 0.2044329400752989, 0.1903505780647854, 0.1690047266392679,
    0.1406532597155259, 0.1047900103222502, 0.0630920926299786, 0.0229353220105292};
constexpr double kGaussW[4] = {
    0.4179591836734694, 0.3818300505051189, 0.2797053914892767, 0.1294849661688697};

template <class F>
void gauss_kronrod(const F& f, double a, double b, double& kronrod, double& err) {
    const double h = 0.5 * (b - a);
    const double c = 0.5 * (a + b);
    const double f0 = f(c);
    double gk = kKronrodW[0] * f0;
    double g = kGaussW[0] * f0;
    for (int i = 1; i < 8; ++i) {
        const double fx = f(c - h * kKronrodX[i]) + f(c + h * kKronrodX[i]);
        gk += kKronrodW[i] * fx;
        if (i % 2 == 0) g += kGaussW[i / 2] * fx;
    }
    kronrod = gk * h;
    err = std::abs((gk - g) * h);
}

// Adaptive bisection with a length-proportional error budget.
template <class F>
double integrate_adaptive(const F& f, double a, double b, double abs_tol, int max_depth) {
    if (!(b > a)) return 0.0;
    struct Seg { double a, b, value, err; int depth; };
    double v, e;
    gauss_kronrod(f, a, b, v, e);
    std::vector<Seg> stack{{a, b, v, e, 0}};
    const double span = b - a;
    double total = 0.0;
    while (!stack.empty()) {
        const Seg s = stack.back();
        stack.pop_back();
        if (s.err <= abs_tol * (s.b - s.a) / span || s.depth >= max_depth) {
            total += s.value;
            continue;
        }
        const double mid = 0.5 * (s.a + s.b);
        double v1, e1, v2, e2;
        gauss_kronrod(f, s.a, mid, v1, e1);
        gauss_kronrod(f, mid, s.b, v2, e2);
        stack.push_back({s.a, mid, v1, e1, s.depth + 1});
        stack.push_back({mid, s.b, v2, e2, s.depth + 1});
    }
    return total;
}

} // namespace

GreensValue integrate_kernel(Kernel kernel, Complex z, Complex w,
                             const KernelSeriesConfig& cfg) {
    if (kernel == Kernel::HalfPlane) {
        if (z.imag() <= 0.0 || w.imag() <= 0.0)
            raise(errc::outside_domain, "half-plane kernel needs Im > 0");
    } else {
        if (std::abs(z.imag()) >= 1.0 || std::abs(w.imag()) >= 1.0)
            raise(errc::outside_domain, "strip kernel needs |Im| < 1");
    }
    if (z == w)
        raise(errc::non_converged, "time integral diverges at the source: integrand ~ 1/(2 pi t)");

    const auto rho = [&](double t) {
        return kernel == Kernel::HalfPlane ? rho_half_plane(t, z, w)
                                           : rho_strip_raw(t, z, w, cfg.max_images);
    };

    const double t_star = std::norm(z - w);   // diffusive scale: the integrand peak
    const double abs_tol = std::max(cfg.quad_rel_tol, 1e-13);

    // Log-spaced panels below t*; the integrand vanishes to all orders at 0,
    // and underflows outright once |z-w|^2/(2t) > ~750.
    double below = 0.0;
    double hi = t_star;
    for (int k = 0; k < 80; ++k) {
        const double lo = hi * 0.5;
        if (t_star / lo > 1500.0) break;
        below += integrate_adaptive(rho, lo, hi, abs_tol, 12);
        hi = lo;
    }

    // Above t*: substitute u = 1/t. The half-plane integrand decays like 1/t^2,
    // so rho(1/u)/u^2 stays bounded near u = 0; the strip kernel decays like
    // e^{-pi^2 t / 8}, cut at the t where that bound is below 1e-30.
    double u_min = 0.0;
    if (kernel == Kernel::Strip)
        u_min = 1.0 / std::max(4.0 * t_star, 8.0 * 69.1 / (kPi * kPi));
    const auto tail = [&](double u) {
        const double t = 1.0 / u;
        return rho(t) * t * t;
    };
    const double above = integrate_adaptive(tail, u_min, 1.0 / t_star, abs_tol, 16);

    return GreensValue::finite(below + above);
}

} // namespace greenwalk
