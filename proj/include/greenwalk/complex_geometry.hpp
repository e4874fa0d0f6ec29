#pragma once

#include <complex>
#include <numbers>
#include <variant>
#include <vector>

#include "greenwalk/errors.hpp"

namespace greenwalk {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// A point of the Riemann sphere: a finite complex number or the explicit
// point at infinity. Infinity is a variant flag, never an overflow value.
struct ComplexPoint {
    Complex value{0.0, 0.0};
    bool at_infinity = false;

    ComplexPoint() = default;
    ComplexPoint(double re, double im) : value(re, im) {}
    ComplexPoint(Complex z) : value(z) {}

    static ComplexPoint infinity() {
        ComplexPoint p;
        p.at_infinity = true;
        return p;
    }

    bool is_finite() const { return !at_infinity; }

    Complex finite() const {
        if (at_infinity) raise(errc::invalid_argument, "point at infinity has no finite value");
        return value;
    }
};

bool approx_equal(const ComplexPoint& p, const ComplexPoint& q, double tol = 1e-12);

// z -> (a z + b) / (c z + d), ad - bc != 0.
struct MobiusTransform {
    Complex a{1.0}, b{0.0}, c{0.0}, d{1.0};

    Complex determinant() const { return a * d - b * c; }
};

MobiusTransform make_mobius(Complex a, Complex b, Complex c, Complex d);
MobiusTransform mobius_compose(const MobiusTransform& first_applied_last,
                               const MobiusTransform& applied_first);
MobiusTransform mobius_inverse(const MobiusTransform& m);
ComplexPoint mobius_apply(const MobiusTransform& m, const ComplexPoint& z);

// Disk automorphism z -> (z - a)/(1 - conj(a) z) as a Mobius transform.
MobiusTransform disk_automorphism_transform(Complex a);
// The disk-to-half-plane map z -> -i(z-1)/(z+1), sending 0 to i.
MobiusTransform cayley_disk_to_half_plane();

// ---- Domains -------------------------------------------------------------

struct UpperHalfPlane {};                       // {Im z > 0}
struct RightHalfPlane {};                       // {Re z > 0}
struct Disk { Complex center{0.0, 0.0}; double radius = 1.0; };
struct Strip { double half_width = 1.0; };      // {-h < Im z < h}
struct PuncturedDisk {};                        // {0 < |z| < 1}

using Domain = std::variant<UpperHalfPlane, RightHalfPlane, Disk, Strip, PuncturedDisk>;

// Signed distance to the boundary, positive inside. For the punctured disk the
// puncture counts as boundary, so the value is min(|z|, 1-|z|).
double boundary_distance(const Domain& domain, Complex z);
bool contains(const Domain& domain, Complex z);
const char* domain_name(const Domain& domain);

// ---- Stopping rules --------------------------------------------------------

struct ExitTime { Domain domain; };
// First time the continuously tracked argument (started at 0) reaches +-2*pi*turns.
struct WindingTime { int turns = 1; };

using StoppingRule = std::variant<ExitTime, WindingTime>;

void validate(const StoppingRule& rule, Complex start);

// ---- Analytic maps ---------------------------------------------------------

struct PowerMap { int exponent = 2; };          // z -> z^k, k >= 1
struct ExpMap {};                               // z -> e^z
struct MobiusMap { MobiusTransform transform; };
struct DiskAutomorphism { Complex a{0.0, 0.0}; };  // z -> (z-a)/(1-conj(a)z), |a|<1
struct TanQuarterStrip {};                      // z -> tan(pi*i*z/4), strip {-1<Im z<1} onto the disk

using AnalyticMap = std::variant<PowerMap, ExpMap, MobiusMap, DiskAutomorphism, TanQuarterStrip>;

Complex evaluate(const AnalyticMap& map, Complex z);
Complex derivative(const AnalyticMap& map, Complex z);

struct Preimage {
    Complex point;
    int multiplicity = 1;   // order of the zero of f - w at the point
};

// All preimages of w under the map inside `restrict_to`, each with its
// multiplicity, sorted by principal argument then modulus so downstream sums
// are reproducible. Empty when w is not attained. Raises unsupported_map when
// the variant has no closed-form inversion over the requested domain (Exp on a
// domain with unbounded imaginary part has infinitely many preimages).
std::vector<Preimage> preimages(const AnalyticMap& map, Complex w, const Domain& restrict_to);

const char* map_name(const AnalyticMap& map);

} // namespace greenwalk
