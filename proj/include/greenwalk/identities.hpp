#pragma once

#include <string>

#include "greenwalk/closed_form.hpp"

namespace greenwalk {

// The doubly infinite products and their closed right-hand sides. Parameters:
// mirror/fourHands use (a, b, c); sinhProd/coshProd/sinProd/cosProd/tanSq use a;
// tanProd uses c.
enum class IdentityName {
    Mirror,
    FourHands,
    SinhProd,
    CoshProd,
    SinProd,
    CosProd,
    TanSq,
    TanProd,
};

const char* to_string(IdentityName name);
IdentityName identity_from_string(const std::string& s);   // raises invalid_argument

struct IdentityCase {
    IdentityName name = IdentityName::Mirror;
    double a = 0.0, b = 0.0, c = 0.0;
    SeriesTruncation truncation{};
};

struct PartialProduct {
    double value = 0.0;
    double tail_bound = 0.0;   // multiplicative envelope: true/partial in [e^-tb, e^tb]
};

// Product over paired indices {0} union {+-1, ..., +-N}, accumulated in
// log-space with explicit sign tracking (lynne's n = 0 factor is negative).
// tail_bound is the C/N envelope fitted on the last 8 paired log-factors.
PartialProduct lhs_partial(const IdentityCase& c);

// Diagnostic: one-sided truncation (indices 0..N only). Documents the
// conditional convergence of tanProd; not used by verify().
PartialProduct lhs_partial_one_sided(const IdentityCase& c);

double rhs_closed(const IdentityCase& c);

struct IdentityReport {
    std::string name;
    double a = 0.0, b = 0.0, c = 0.0;
    int n_pairs = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    double rel_error = 0.0;
    double tail_bound = 0.0;
    bool pass = false;
};

// pass iff rel_error <= max(10 * tail_bound, 1e-6).
IdentityReport verify(const IdentityCase& c);

std::string to_json(const IdentityReport& r);

} // namespace greenwalk
