#pragma once

#include "greenwalk/closed_form.hpp"
#include "greenwalk/complex_geometry.hpp"

namespace greenwalk {

struct KernelSeriesConfig {
    int max_images = 40;          // image pairs n in [-max_images, max_images]
    double quad_rel_tol = 1e-9;   // relative tolerance of the time quadrature
};

// Free planar transition density (1/(2 pi t)) exp(-|z-w|^2 / (2t)).
double rho_plane(double t, Complex z, Complex w);

// Killed density on {Im > 0}: one reflected image subtracted.
double rho_half_plane(double t, Complex z, Complex w);

// Killed density on the strip {-1 < Im < 1}: alternating image sum
//   sum_n [ rho(z, w + 4ni) - rho(z, conj(w) + (4n+2)i) ],
// truncated symmetrically; the first omitted image group bounds the error.
double rho_strip(double t, Complex z, Complex w, const KernelSeriesConfig& cfg = {});

enum class Kernel { HalfPlane, Strip };

// Time integral int_0^inf rho_s(z,w) ds, matching the closed forms. The
// integral is split at t* = |z-w|^2 with log-spaced panels below (the integrand
// vanishes to all orders at 0) and the substitution u = 1/t above (polynomial
// tail for the half-plane; the strip tail is cut where the spectral decay
// bound e^{-pi^2 t / 8} is below 1e-30).
GreensValue integrate_kernel(Kernel kernel, Complex z, Complex w,
                             const KernelSeriesConfig& cfg = {});

} // namespace greenwalk
