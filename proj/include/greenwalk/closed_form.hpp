#pragma once

#include "greenwalk/complex_geometry.hpp"

namespace greenwalk {

// Expected-occupation density value. Singularities are a typed flag, never an
// infinity stored in `value`; consumers must branch on `kind`.
struct GreensValue {
    enum class Kind { Finite, SingularAtSource, InfiniteWholePlane };

    Kind kind = Kind::Finite;
    double value = 0.0;   // populated only when kind == Finite

    static GreensValue finite(double v) { return {Kind::Finite, v}; }
    static GreensValue singular() { return {Kind::SingularAtSource, 0.0}; }
    static GreensValue infinite_plane() { return {Kind::InfiniteWholePlane, 0.0}; }

    bool is_finite() const { return kind == Kind::Finite; }

    // Finite value; raises singular_at_source / non_converged-free typed errors otherwise.
    double finite_value() const;
};

// Symmetric truncation control for the doubly infinite sums. Indices +n and -n
// are always paired before accumulation (the sums converge only conditionally),
// and the paired tail is certified with an empirical C/n^2 envelope.
struct SeriesTruncation {
    int max_pairs = 10000;         // n runs over 0 and +-1..+-max_pairs
    double tail_tolerance = 1e-6;  // certificate threshold; exceeding it raises non_converged
};

// (1/pi) ln(|z - conj(w)| / |z - w|) on {Im > 0}, by reflection.
GreensValue greens_half_plane(Complex z, Complex w);

// (1/pi) ln(|z + conj(w)| / |z - w|) on {Re > 0}; reflection across the y-axis.
GreensValue greens_right_half_plane(Complex z, Complex w);

// (1/pi) ln(|1 - conj(a) w| / |w - a|) on the unit disk.
GreensValue greens_disk(Complex a, Complex w);

// Image-series sum on the strip {-h < Im < h}; general h by Brownian scaling
// z -> z/h. Agrees with greens_strip_map to the truncation certificate.
GreensValue greens_strip(Complex z, Complex w, double half_width = 1.0,
                         const SeriesTruncation& truncation = {});

// Closed form on the strip of half-width 1 via the conformal map onto the disk
// f(z) = tan(pi*i*z/4).
GreensValue greens_strip_map(Complex z, Complex w);

// Covering-map series on the punctured unit disk; source on (0,1) (the
// normalization with the source written as e^{-alpha}). Equals greens_disk of
// the same points: the puncture is invisible to the path.
GreensValue greens_punctured_disk(double source, Complex w,
                                  const SeriesTruncation& truncation = {});

// Winding stopping time tau_n with source fixed at 1: finite sum of at most
// 2n+1 right-half-plane terms over the preimages of w under z -> z^{4n}.
// Sector-boundary preimages contribute exactly 0, so endpoint inclusion in the
// k-range is harmless; theta is taken in (-pi, pi].
GreensValue greens_winding(int turns, Complex w);

// Continuous-extension value of G_{tau_n}(1, w) + (1/pi) ln|1 - w| at w = 1:
// (1/pi)(ln 4n + ln 2) plus the regular k != 0 terms.
double winding_regular_limit(int turns);

// Exact exit-time Green's function for any supported Domain (dispatcher used by
// pushforward and the CLI). Disk of arbitrary center/radius reduces affinely to
// the unit disk; the strip uses the tan-map closed form; the punctured disk
// uses the unit-disk value.
GreensValue greens_exit(const Domain& domain, Complex source, Complex w);

} // namespace greenwalk
