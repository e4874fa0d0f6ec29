#include "greenwalk/closed_form.hpp"

#include <cmath>
#include <sstream>

namespace greenwalk {

double GreensValue::finite_value() const {
    switch (kind) {
        case Kind::Finite: return value;
        case Kind::SingularAtSource:
            raise(errc::singular_at_source, "Green's value is singular at the source");
        case Kind::InfiniteWholePlane:
            raise(errc::non_converged, "whole-plane Green's function is infinite");
    }
    raise(errc::invalid_argument, "corrupt GreensValue");
}

GreensValue greens_half_plane(Complex z, Complex w) {
    if (z.imag() <= 0.0 || w.imag() <= 0.0)
        raise(errc::outside_domain, "greens_half_plane needs Im > 0 for both points");
    if (z == w) return GreensValue::singular();
    return GreensValue::finite(std::log(std::abs(z - std::conj(w)) / std::abs(z - w)) / kPi);
}

GreensValue greens_right_half_plane(Complex z, Complex w) {
    if (z.real() <= 0.0 || w.real() <= 0.0)
        raise(errc::outside_domain, "greens_right_half_plane needs Re > 0 for both points");
    if (z == w) return GreensValue::singular();
    return GreensValue::finite(std::log(std::abs(z + std::conj(w)) / std::abs(z - w)) / kPi);
}

GreensValue greens_disk(Complex a, Complex w) {
    if (std::abs(a) >= 1.0 || std::abs(w) >= 1.0)
        raise(errc::outside_domain, "greens_disk needs both points inside the unit disk");
    if (a == w) return GreensValue::singular();
    return GreensValue::finite(std::log(std::abs(1.0 - std::conj(a) * w) / std::abs(w - a)) / kPi);
}

namespace {

// Paired symmetric partial sum with an empirical tail on the trailing pairs.
// `paired(n)` must return term(n) + term(-n). The log-terms decay like C/n^2
// once paired; the fitted envelope gives both a correction (C * psi1(N+1),
// psi1 = trigamma) and a conservative certificate |C|/N for NonConverged.
struct PairedSum {
    double value = 0.0;       // corrected sum
    double certificate = 0.0; // conservative residual bound before correction
};

template <class PairedTerm>
PairedSum paired_sum(double center_term, PairedTerm paired, int n_pairs, double tail_tol,
                     const char* label) {
    constexpr int kFitWindow = 8;
    double sum = center_term;
    double window[kFitWindow];
    int window_count = 0;
    for (int n = 1; n <= n_pairs; ++n) {
        const double p = paired(n);
        sum += p;
        if (n > n_pairs - kFitWindow)
            window[window_count++] = double(n) * double(n) * p;
    }
    double fit_c = 0.0;
    for (int i = 0; i < window_count; ++i) fit_c += window[i];
    fit_c /= window_count;
    double spread = 0.0;
    for (int i = 0; i < window_count; ++i)
        spread = std::max(spread, std::abs(window[i] - fit_c));

    const double inv_n = 1.0 / double(n_pairs);
    // trigamma(N+1) ~ 1/N - 1/(2N^2) + 1/(6N^3)
    const double psi1 = inv_n - 0.5 * inv_n * inv_n + inv_n * inv_n * inv_n / 6.0;
    // Residual after the C * psi1 correction: envelope scatter plus the
    // next-order drift of the fitted coefficient.
    const double certificate = (spread + std::abs(fit_c) * inv_n) * psi1;
    if (certificate > tail_tol) {
        std::ostringstream msg;
        msg << label << " paired tail certificate " << certificate << " exceeds tolerance "
            << tail_tol << " at N = " << n_pairs;
        raise(errc::non_converged, msg.str());
    }
    return {sum + fit_c * psi1, certificate};
}

double sq(double x) { return x * x; }

} // namespace

GreensValue greens_strip(Complex z, Complex w, double half_width,
                         const SeriesTruncation& truncation) {
    if (half_width <= 0.0) raise(errc::invalid_argument, "strip half-width must be positive");
    if (truncation.max_pairs < 4) raise(errc::invalid_argument, "strip series needs N >= 4");
    if (std::abs(z.imag()) >= half_width || std::abs(w.imag()) >= half_width)
        raise(errc::outside_domain, "greens_strip needs |Im| < half-width for both points");
    if (z == w) return GreensValue::singular();

    // Brownian scaling: the Green's function is invariant under z -> z/h.
    z /= half_width;
    w /= half_width;
    const double a = (z - w).real();
    const double b = z.imag();
    const double c = w.imag();
    const double a2 = a * a;

    const auto term = [&](long n) {
        return std::log((a2 + sq((b + c) - (4.0 * n - 2.0))) /
                        (a2 + sq((b - c) - 4.0 * n)));
    };
    const double center = term(0);
    const auto paired = [&](int n) { return term(n) + term(-n); };
    const PairedSum s =
        paired_sum(center, paired, truncation.max_pairs, truncation.tail_tolerance, "strip");
    return GreensValue::finite(s.value / kTwoPi);
}

GreensValue greens_strip_map(Complex z, Complex w) {
    if (std::abs(z.imag()) >= 1.0 || std::abs(w.imag()) >= 1.0)
        raise(errc::outside_domain, "greens_strip_map needs |Im| < 1 for both points");
    if (z == w) return GreensValue::singular();

    const double a = (z - w).real();
    const double b = z.imag();
    const double c = w.imag();
    const double tb = std::tan(kPi * b / 4.0);
    const Complex tac = std::tan(Complex(0.0, kPi * a / 4.0) - kPi * c / 4.0);
    return GreensValue::finite(std::log(std::abs((1.0 + tb * tac) / (tb + tac))) / kPi);
}

GreensValue greens_punctured_disk(double source, Complex w, const SeriesTruncation& truncation) {
    if (!(source > 0.0 && source < 1.0))
        raise(errc::outside_domain, "punctured-disk source must lie on (0, 1)");
    if (w == Complex(0.0, 0.0))
        raise(errc::origin_excluded, "target must avoid the puncture");
    if (std::abs(w) >= 1.0)
        raise(errc::outside_domain, "target must lie inside the unit disk");
    if (truncation.max_pairs < 4) raise(errc::invalid_argument, "series needs N >= 4");
    if (w == Complex(source, 0.0)) return GreensValue::singular();

    // Source e^{-alpha}, target e^{-c + bi}: lifted through the covering map.
    const double alpha = -std::log(source);
    const double b = std::arg(w);
    const double c = -std::log(std::abs(w));
    const double sp = sq(alpha + c);
    const double sm = sq(alpha - c);

    const auto term = [&](long n) {
        const double u = sq(b + kTwoPi * double(n));
        return std::log((u + sp) / (u + sm));
    };
    const auto paired = [&](int n) { return term(n) + term(-n); };
    const PairedSum s = paired_sum(term(0), paired, truncation.max_pairs,
                                   truncation.tail_tolerance, "punctured-disk");
    return GreensValue::finite(s.value / kTwoPi);
}

namespace {

// G_U by the raw formula; vanishes exactly on the imaginary axis, which makes
// endpoint terms of the winding k-sum contribute 0.
double right_half_plane_formula(Complex z, Complex w) {
    return std::log(std::abs(z + std::conj(w)) / std::abs(z - w)) / kPi;
}

} // namespace

GreensValue greens_winding(int turns, Complex w) {
    if (turns < 1) raise(errc::invalid_argument, "winding index must be >= 1");
    if (w == Complex(0.0, 0.0)) raise(errc::origin_excluded, "winding target must avoid 0");
    if (w == Complex(1.0, 0.0)) raise(errc::source_point, "winding source point w = 1 is singular");

    const double theta = std::arg(w);   // (-pi, pi]
    const double r = std::abs(w);
    const double root = std::pow(r, 1.0 / (4.0 * turns));

    // k-range: (theta + 2 pi k) / (4n) in [-pi/2, pi/2], endpoints included.
    double sum = 0.0;
    for (int k = -2 * turns; k <= 2 * turns; ++k) {
        const double ang = (theta + kTwoPi * k) / (4.0 * turns);
        if (ang < -kPi / 2.0 || ang > kPi / 2.0) continue;
        sum += right_half_plane_formula(Complex(1.0, 0.0), std::polar(root, ang));
    }
    return GreensValue::finite(sum);
}

double winding_regular_limit(int turns) {
    if (turns < 1) raise(errc::invalid_argument, "winding index must be >= 1");
    // Singular k = 0 term contributes ln(4n)/pi from the root substitution plus
    // ln 2 / pi from the reflected numerator at w = 1; the k != 0 preimages sit
    // at e^{i pi k / (2n)} and contribute their regular values.
    double sum = (std::log(4.0 * turns) + std::log(2.0)) / kPi;
    for (int k = -turns; k <= turns; ++k) {
        if (k == 0) continue;
        const double ang = kPi * k / (2.0 * turns);
        sum += right_half_plane_formula(Complex(1.0, 0.0), std::polar(1.0, ang));
    }
    return sum;
}

GreensValue greens_exit(const Domain& domain, Complex source, Complex w) {
    struct Visitor {
        Complex source, w;
        GreensValue operator()(const UpperHalfPlane&) const { return greens_half_plane(source, w); }
        GreensValue operator()(const RightHalfPlane&) const {
            return greens_right_half_plane(source, w);
        }
        GreensValue operator()(const Disk& d) const {
            if (d.radius <= 0.0) raise(errc::invalid_argument, "disk radius must be positive");
            return greens_disk((source - d.center) / d.radius, (w - d.center) / d.radius);
        }
        GreensValue operator()(const Strip& s) const {
            if (s.half_width <= 0.0)
                raise(errc::invalid_argument, "strip half-width must be positive");
            if (std::abs(source.imag()) >= s.half_width || std::abs(w.imag()) >= s.half_width)
                raise(errc::outside_domain, "point outside the strip");
            return greens_strip_map(source / s.half_width, w / s.half_width);
        }
        GreensValue operator()(const PuncturedDisk&) const {
            // The path does not see the puncture: the unit-disk value applies.
            if (source == Complex(0.0, 0.0) || w == Complex(0.0, 0.0))
                raise(errc::origin_excluded, "punctured disk excludes the origin");
            return greens_disk(source, w);
        }
    };
    return std::visit(Visitor{source, w}, domain);
}

} // namespace greenwalk
