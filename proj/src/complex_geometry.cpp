#include "greenwalk/complex_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

namespace greenwalk {

namespace {

bool finite_complex(Complex z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

} // namespace

const char* errc_name(errc code) noexcept {
    switch (code) {
        case errc::ok: return "ok";
        case errc::outside_domain: return "OutsideDomain";
        case errc::singular_at_source: return "SingularAtSource";
        case errc::degenerate_transform: return "DegenerateTransform";
        case errc::unsupported_map: return "UnsupportedMap";
        case errc::non_converged: return "NonConverged";
        case errc::step_too_coarse: return "StepTooCoarse";
        case errc::biased_window: return "BiasedWindow";
        case errc::source_image: return "SourceImage";
        case errc::pole_in_parameters: return "PoleInParameters";
        case errc::nonpositive_time: return "NonpositiveTime";
        case errc::source_point: return "SourcePoint";
        case errc::origin_excluded: return "OriginExcluded";
        case errc::invalid_argument: return "InvalidArgument";
    }
    return "unknown";
}

bool approx_equal(const ComplexPoint& p, const ComplexPoint& q, double tol) {
    if (p.at_infinity || q.at_infinity) return p.at_infinity == q.at_infinity;
    return std::abs(p.value - q.value) <= tol;
}

MobiusTransform make_mobius(Complex a, Complex b, Complex c, Complex d) {
    MobiusTransform m{a, b, c, d};
    if (m.determinant() == Complex(0.0, 0.0))
        raise(errc::degenerate_transform, "mobius transform has ad - bc = 0");
    return m;
}

MobiusTransform mobius_compose(const MobiusTransform& f, const MobiusTransform& g) {
    // (f o g): matrix product of the coefficient matrices.
    return make_mobius(f.a * g.a + f.b * g.c,
                       f.a * g.b + f.b * g.d,
                       f.c * g.a + f.d * g.c,
                       f.c * g.b + f.d * g.d);
}

MobiusTransform mobius_inverse(const MobiusTransform& m) {
    if (m.determinant() == Complex(0.0, 0.0))
        raise(errc::degenerate_transform, "mobius transform has ad - bc = 0");
    return MobiusTransform{m.d, -m.b, -m.c, m.a};
}

ComplexPoint mobius_apply(const MobiusTransform& m, const ComplexPoint& z) {
    if (m.determinant() == Complex(0.0, 0.0))
        raise(errc::degenerate_transform, "mobius transform has ad - bc = 0");
    if (z.at_infinity) {
        if (m.c == Complex(0.0, 0.0)) return ComplexPoint::infinity();
        return ComplexPoint(m.a / m.c);
    }
    const Complex den = m.c * z.value + m.d;
    if (den == Complex(0.0, 0.0)) return ComplexPoint::infinity();
    return ComplexPoint((m.a * z.value + m.b) / den);
}

MobiusTransform disk_automorphism_transform(Complex a) {
    if (std::abs(a) >= 1.0)
        raise(errc::invalid_argument, "disk automorphism needs |a| < 1");
    return make_mobius(Complex(1.0), -a, -std::conj(a), Complex(1.0));
}

MobiusTransform cayley_disk_to_half_plane() {
    const Complex mi(0.0, -1.0);
    return make_mobius(mi, -mi, Complex(1.0), Complex(1.0));
}

// ---- domains ----------------------------------------------------------------

double boundary_distance(const Domain& domain, Complex z) {
    struct Visitor {
        Complex z;
        double operator()(const UpperHalfPlane&) const { return z.imag(); }
        double operator()(const RightHalfPlane&) const { return z.real(); }
        double operator()(const Disk& d) const { return d.radius - std::abs(z - d.center); }
        double operator()(const Strip& s) const { return s.half_width - std::abs(z.imag()); }
        double operator()(const PuncturedDisk&) const {
            const double r = std::abs(z);
            return std::min(r, 1.0 - r);
        }
    };
    return std::visit(Visitor{z}, domain);
}

bool contains(const Domain& domain, Complex z) {
    return finite_complex(z) && boundary_distance(domain, z) > 0.0;
}

const char* domain_name(const Domain& domain) {
    struct Visitor {
        const char* operator()(const UpperHalfPlane&) const { return "upper-half-plane"; }
        const char* operator()(const RightHalfPlane&) const { return "right-half-plane"; }
        const char* operator()(const Disk&) const { return "disk"; }
        const char* operator()(const Strip&) const { return "strip"; }
        const char* operator()(const PuncturedDisk&) const { return "punctured-disk"; }
    };
    return std::visit(Visitor{}, domain);
}

void validate(const StoppingRule& rule, Complex start) {
    if (const auto* wind = std::get_if<WindingTime>(&rule)) {
        if (wind->turns < 1)
            raise(errc::invalid_argument, "winding time needs turns >= 1");
        if (start == Complex(0.0, 0.0))
            raise(errc::origin_excluded, "winding paths must start away from the origin");
        return;
    }
    const auto& exit = std::get<ExitTime>(rule);
    if (const auto* disk = std::get_if<Disk>(&exit.domain); disk && disk->radius <= 0.0)
        raise(errc::invalid_argument, "disk radius must be positive");
    if (const auto* strip = std::get_if<Strip>(&exit.domain); strip && strip->half_width <= 0.0)
        raise(errc::invalid_argument, "strip half-width must be positive");
    if (!contains(exit.domain, start))
        raise(errc::outside_domain, "start point is not interior to the domain");
}

// ---- analytic maps -----------------------------------------------------------

Complex evaluate(const AnalyticMap& map, Complex z) {
    struct Visitor {
        Complex z;
        Complex operator()(const PowerMap& p) const { return std::pow(z, p.exponent); }
        Complex operator()(const ExpMap&) const { return std::exp(z); }
        Complex operator()(const MobiusMap& m) const {
            const ComplexPoint image = mobius_apply(m.transform, ComplexPoint(z));
            if (image.at_infinity)
                raise(errc::unsupported_map, "mobius image of the point is infinite");
            return image.value;
        }
        Complex operator()(const DiskAutomorphism& d) const {
            return (z - d.a) / (1.0 - std::conj(d.a) * z);
        }
        Complex operator()(const TanQuarterStrip&) const {
            return std::tan(Complex(0.0, kPi / 4.0) * z);
        }
    };
    return std::visit(Visitor{z}, map);
}

Complex derivative(const AnalyticMap& map, Complex z) {
    struct Visitor {
        Complex z;
        Complex operator()(const PowerMap& p) const {
            return double(p.exponent) * std::pow(z, p.exponent - 1);
        }
        Complex operator()(const ExpMap&) const { return std::exp(z); }
        Complex operator()(const MobiusMap& m) const {
            const Complex den = m.transform.c * z + m.transform.d;
            if (den == Complex(0.0, 0.0))
                raise(errc::unsupported_map, "mobius derivative at a pole");
            return m.transform.determinant() / (den * den);
        }
        Complex operator()(const DiskAutomorphism& d) const {
            const Complex den = 1.0 - std::conj(d.a) * z;
            return (1.0 - std::norm(d.a)) / (den * den);
        }
        Complex operator()(const TanQuarterStrip&) const {
            const Complex t = std::tan(Complex(0.0, kPi / 4.0) * z);
            return Complex(0.0, kPi / 4.0) * (1.0 + t * t);
        }
    };
    return std::visit(Visitor{z}, map);
}

namespace {

// Bounded imaginary range of a domain, when one exists; Exp preimage
// enumeration needs it to restrict the log branches to finitely many.
std::optional<std::pair<double, double>> imag_range(const Domain& domain) {
    struct Visitor {
        std::optional<std::pair<double, double>> operator()(const UpperHalfPlane&) const {
            return std::nullopt;
        }
        std::optional<std::pair<double, double>> operator()(const RightHalfPlane&) const {
            return std::nullopt;
        }
        std::optional<std::pair<double, double>> operator()(const Disk& d) const {
            return std::make_pair(d.center.imag() - d.radius, d.center.imag() + d.radius);
        }
        std::optional<std::pair<double, double>> operator()(const Strip& s) const {
            return std::make_pair(-s.half_width, s.half_width);
        }
        std::optional<std::pair<double, double>> operator()(const PuncturedDisk&) const {
            return std::make_pair(-1.0, 1.0);
        }
    };
    return std::visit(Visitor{}, domain);
}

void sort_preimages(std::vector<Preimage>& pre) {
    std::sort(pre.begin(), pre.end(), [](const Preimage& p, const Preimage& q) {
        const double ap = std::arg(p.point), aq = std::arg(q.point);
        if (ap != aq) return ap < aq;
        return std::abs(p.point) < std::abs(q.point);
    });
}

} // namespace

std::vector<Preimage> preimages(const AnalyticMap& map, Complex w, const Domain& restrict_to) {
    std::vector<Preimage> out;

    if (const auto* p = std::get_if<PowerMap>(&map)) {
        const int k = p->exponent;
        if (k < 1) raise(errc::invalid_argument, "power map needs exponent >= 1");
        if (w == Complex(0.0, 0.0)) {
            // single preimage at the origin, with the full multiplicity
            if (contains(restrict_to, Complex(0.0, 0.0)))
                out.push_back({Complex(0.0, 0.0), k});
        } else {
            const double r = std::pow(std::abs(w), 1.0 / k);
            const double theta = std::arg(w);
            for (int j = 0; j < k; ++j) {
                const double ang = (theta + kTwoPi * j) / k;
                const Complex root = std::polar(r, ang);
                if (contains(restrict_to, root)) out.push_back({root, 1});
            }
        }
    } else if (std::holds_alternative<ExpMap>(map)) {
        const auto range = imag_range(restrict_to);
        if (!range)
            raise(errc::unsupported_map,
                  "exp has infinitely many preimages on a domain with unbounded imaginary part");
        if (w != Complex(0.0, 0.0)) {
            const double re = std::log(std::abs(w));
            const double base = std::arg(w);
            const long n_lo = std::lround(std::floor((range->first - base) / kTwoPi)) - 1;
            const long n_hi = std::lround(std::ceil((range->second - base) / kTwoPi)) + 1;
            for (long n = n_lo; n <= n_hi; ++n) {
                const Complex z(re, base + kTwoPi * double(n));
                if (contains(restrict_to, z)) out.push_back({z, 1});
            }
        }
    } else if (const auto* m = std::get_if<MobiusMap>(&map)) {
        const ComplexPoint z = mobius_apply(mobius_inverse(m->transform), ComplexPoint(w));
        if (z.is_finite() && contains(restrict_to, z.value)) out.push_back({z.value, 1});
    } else if (const auto* d = std::get_if<DiskAutomorphism>(&map)) {
        const Complex z = (w + d->a) / (1.0 + std::conj(d->a) * w);
        if (contains(restrict_to, z)) out.push_back({z, 1});
    } else {
        // TanQuarterStrip: conformal on {-1 < Im z < 1}, single principal branch.
        const Complex z = Complex(0.0, -4.0 / kPi) * std::atan(w);
        if (contains(restrict_to, z)) out.push_back({z, 1});
    }

    sort_preimages(out);
    return out;
}

const char* map_name(const AnalyticMap& map) {
    struct Visitor {
        const char* operator()(const PowerMap&) const { return "power"; }
        const char* operator()(const ExpMap&) const { return "exp"; }
        const char* operator()(const MobiusMap&) const { return "mobius"; }
        const char* operator()(const DiskAutomorphism&) const { return "disk-automorphism"; }
        const char* operator()(const TanQuarterStrip&) const { return "tan-quarter-strip"; }
    };
    return std::visit(Visitor{}, map);
}

} // namespace greenwalk
