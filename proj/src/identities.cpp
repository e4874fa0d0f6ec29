#include "greenwalk/identities.hpp"

#include <cmath>
#include <sstream>

namespace greenwalk {

const char* to_string(IdentityName name) {
    switch (name) {
        case IdentityName::Mirror: return "mirror";
        case IdentityName::FourHands: return "fourHands";
        case IdentityName::SinhProd: return "sinhProd";
        case IdentityName::CoshProd: return "coshProd";
        case IdentityName::SinProd: return "sinProd";
        case IdentityName::CosProd: return "cosProd";
        case IdentityName::TanSq: return "tanSq";
        case IdentityName::TanProd: return "tanProd";
    }
    return "?";
}

IdentityName identity_from_string(const std::string& s) {
    for (const IdentityName n : {IdentityName::Mirror, IdentityName::FourHands,
                                 IdentityName::SinhProd, IdentityName::CoshProd,
                                 IdentityName::SinProd, IdentityName::CosProd,
                                 IdentityName::TanSq, IdentityName::TanProd}) {
        if (s == to_string(n)) return n;
    }
    raise(errc::invalid_argument, "unknown identity case: " + s);
}

namespace {

constexpr double kPoleRadius = 1e-8;   // refuse rather than cancel catastrophically

double sq(double x) { return x * x; }

// One signed factor of the product at index n (n may be negative).
struct Factor {
    double log_abs;
    int sign;
};

Factor factor_at(const IdentityCase& c, long n) {
    const double a = c.a, b = c.b, cc = c.c;
    double v = 1.0;
    switch (c.name) {
        case IdentityName::Mirror:
            v = (sq(b + kTwoPi * n) + sq(a + cc)) / (sq(b + kTwoPi * n) + sq(a - cc));
            break;
        case IdentityName::FourHands:
            v = (sq(a) + sq((b + cc) - (4.0 * n - 2.0))) / (sq(a) + sq((b - cc) - 4.0 * n));
            break;
        case IdentityName::SinhProd:
            v = n == 0 ? a : 1.0 + sq(a / (kPi * n));
            break;
        case IdentityName::CoshProd:
            v = n == 0 ? 1.0 : 1.0 + sq(a / (kPi * (n - 0.5)));
            break;
        case IdentityName::SinProd:
            v = n == 0 ? a : 1.0 - sq(a / (kPi * n));
            break;
        case IdentityName::CosProd:
            v = n == 0 ? 1.0 : 1.0 - sq(a / (kPi * (n - 0.5)));
            break;
        case IdentityName::TanSq: {
            const double x2 = sq(a / kPi);
            v = (n * double(n) - x2) / (sq(n - 0.5) - x2);
            break;
        }
        case IdentityName::TanProd: {
            const double x = cc / kPi;
            v = (n + x) / ((n - 0.5) - x);
            break;
        }
    }
    if (std::abs(v) < 1e-300)
        raise(errc::pole_in_parameters, "product factor vanishes at these parameters");
    return {std::log(std::abs(v)), v < 0.0 ? -1 : 1};
}

// The nontrivial index range: the classical one-sided products use n >= 1 only
// (their n <= -1 factors are defined as 1).
bool two_sided(IdentityName name) {
    switch (name) {
        case IdentityName::Mirror:
        case IdentityName::FourHands:
        case IdentityName::TanSq:
        case IdentityName::TanProd:
            return true;
        default:
            return false;
    }
}

// Overall sign convention: lynne and sonya2 carry a leading minus.
int leading_sign(IdentityName name) {
    return (name == IdentityName::TanSq || name == IdentityName::TanProd) ? -1 : 1;
}

void check_poles(const IdentityCase& c) {
    switch (c.name) {
        case IdentityName::Mirror: {
            // z = w upstairs: a = c with b = 0 (mod 2pi).
            const double bmod = std::remainder(c.b, kTwoPi);
            if (std::abs(c.a - c.c) < kPoleRadius && std::abs(bmod) < kPoleRadius)
                raise(errc::pole_in_parameters, "mirror: a = c with b = 0 is the source singularity");
            if (c.a <= 0.0 || c.c <= 0.0)
                raise(errc::pole_in_parameters, "mirror: needs a > 0 and c > 0");
            break;
        }
        case IdentityName::FourHands:
            if (std::abs(c.a) < kPoleRadius && std::abs(c.b - c.c) < kPoleRadius)
                raise(errc::pole_in_parameters,
                      "fourHands: a = 0 with b = c is the source singularity");
            if (std::abs(c.b) >= 1.0 || std::abs(c.c) >= 1.0)
                raise(errc::pole_in_parameters, "fourHands: needs |b| < 1 and |c| < 1");
            break;
        case IdentityName::TanSq: {
            const double x = std::abs(c.a) / kPi;
            if (std::abs(x - std::round(x - 0.5) - 0.5) < kPoleRadius)
                raise(errc::pole_in_parameters, "tanSq: a is a pole of tan");
            break;
        }
        case IdentityName::TanProd: {
            const double x = std::abs(c.c) / kPi;
            if (std::abs(x - std::round(x - 0.5) - 0.5) < kPoleRadius)
                raise(errc::pole_in_parameters, "tanProd: c is a pole of tan");
            break;
        }
        default:
            break;   // sinh/cosh/sin/cos right sides are entire
    }
}

PartialProduct accumulate(const IdentityCase& c, bool pair_symmetric) {
    check_poles(c);
    const int n_pairs = c.truncation.max_pairs;
    if (n_pairs < 4) raise(errc::invalid_argument, "identity products need N >= 4");

    const Factor f0 = factor_at(c, 0);
    double log_sum = f0.log_abs;
    int sign = f0.sign * leading_sign(c.name);

    constexpr int kFitWindow = 8;
    double window[kFitWindow];
    int window_count = 0;

    for (int n = 1; n <= n_pairs; ++n) {
        const Factor fp = factor_at(c, n);
        double paired_log = fp.log_abs;
        sign *= fp.sign;
        if (two_sided(c.name) && pair_symmetric) {
            const Factor fm = factor_at(c, -n);
            paired_log += fm.log_abs;
            sign *= fm.sign;
        }
        log_sum += paired_log;
        if (n > n_pairs - kFitWindow)
            window[window_count++] = double(n) * double(n) * paired_log;
    }

    double envelope = 0.0;
    for (int i = 0; i < window_count; ++i)
        envelope = std::max(envelope, std::abs(window[i]));
    const double tail_bound = envelope / n_pairs;   // sum_{n>N} C/n^2 <= C/N

    return {double(sign) * std::exp(log_sum), tail_bound};
}

} // namespace

PartialProduct lhs_partial(const IdentityCase& c) { return accumulate(c, true); }

PartialProduct lhs_partial_one_sided(const IdentityCase& c) { return accumulate(c, false); }

double rhs_closed(const IdentityCase& c) {
    check_poles(c);
    switch (c.name) {
        case IdentityName::Mirror: {
            const Complex e1 = std::exp(Complex(-c.a - c.c, c.b));
            const Complex e2 = std::exp(Complex(-c.a, 0.0)) - std::exp(Complex(-c.c, c.b));
            return std::norm((1.0 - e1) / e2);
        }
        case IdentityName::FourHands: {
            const double tb = std::tan(kPi * c.b / 4.0);
            const Complex tac = std::tan(Complex(0.0, kPi * c.a / 4.0) - kPi * c.c / 4.0);
            return std::norm((1.0 + tb * tac) / (tb + tac));
        }
        case IdentityName::SinhProd: return std::sinh(c.a);
        case IdentityName::CoshProd: return std::cosh(c.a);
        case IdentityName::SinProd: return std::sin(c.a);
        case IdentityName::CosProd: return std::cos(c.a);
        case IdentityName::TanSq: return sq(std::tan(c.a));
        case IdentityName::TanProd: return std::tan(c.c);
    }
    raise(errc::invalid_argument, "unknown identity case");
}

IdentityReport verify(const IdentityCase& c) {
    const PartialProduct lhs = lhs_partial(c);
    const double rhs = rhs_closed(c);

    IdentityReport r;
    r.name = to_string(c.name);
    r.a = c.a;
    r.b = c.b;
    r.c = c.c;
    r.n_pairs = c.truncation.max_pairs;
    r.lhs = lhs.value;
    r.rhs = rhs;
    r.tail_bound = lhs.tail_bound;
    const double denom = std::max(std::abs(rhs), 1e-300);
    r.rel_error = std::abs(lhs.value - rhs) / denom;
    r.pass = r.rel_error <= std::max(10.0 * lhs.tail_bound, 1e-6);
    return r;
}

std::string to_json(const IdentityReport& r) {
    std::ostringstream out;
    out.precision(17);
    out << "{\"name\":\"" << r.name << "\",\"params\":{\"a\":" << r.a << ",\"b\":" << r.b
        << ",\"c\":" << r.c << "},\"N\":" << r.n_pairs << ",\"lhs\":" << r.lhs
        << ",\"rhs\":" << r.rhs << ",\"relError\":" << r.rel_error
        << ",\"tailBound\":" << r.tail_bound << ",\"pass\":" << (r.pass ? "true" : "false")
        << "}";
    return out.str();
}

} // namespace greenwalk
