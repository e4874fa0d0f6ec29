#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "greenwalk/identities.hpp"
#include "support/oracles.hpp"

using namespace greenwalk;

namespace {

IdentityCase make(IdentityName name, double a, double b, double c, int n_pairs = 10000) {
    IdentityCase ic;
    ic.name = name;
    ic.a = a;
    ic.b = b;
    ic.c = c;
    ic.truncation.max_pairs = n_pairs;
    return ic;
}

// rhs of mirror at (1, 0, 2): |(1 - e^{-3}) / (e^{-1} - e^{-2})|^2
constexpr double kMirrorExample = 16.696713921428238;

} // namespace

TEST_CASE("mirror: partial product vs closed right side") {
    const IdentityCase c = make(IdentityName::Mirror, 1, 0, 2);
    CHECK(rhs_closed(c) == doctest::Approx(kMirrorExample).epsilon(1e-12));
    const PartialProduct lhs = lhs_partial(c);
    CHECK(lhs.value == doctest::Approx(kMirrorExample).epsilon(1e-3));
    CHECK(lhs.tail_bound > 0.0);
    CHECK(verify(c).pass);
}

TEST_CASE("sinhProd: partial at N = 1000 within 2e-4 relative") {
    const IdentityCase c = make(IdentityName::SinhProd, 1, 0, 0, 1000);
    const PartialProduct lhs = lhs_partial(c);
    CHECK(std::abs(lhs.value - std::sinh(1.0)) / std::sinh(1.0) < 2e-4);
    // spec's stated tail factor exp(a^2 / (pi^2 N))
    CHECK(lhs.value * std::exp(1.0 / (kPi * kPi * 1000.0)) ==
          doctest::Approx(std::sinh(1.0)).epsilon(1e-6));
    CHECK(verify(c).pass);
}

TEST_CASE("tanProd: paired truncation converges, one-sided does not") {
    const IdentityCase quarter = make(IdentityName::TanProd, 0, 0, kPi / 4.0);
    const IdentityReport r = verify(quarter);
    CHECK(r.pass);
    CHECK(r.rel_error < 2e-4);
    CHECK(r.rhs == doctest::Approx(1.0).epsilon(1e-12));

    // pairing sensitivity at N = 1000
    const IdentityCase at1000 = make(IdentityName::TanProd, 0, 0, kPi / 4.0, 1000);
    const double paired_err = std::abs(lhs_partial(at1000).value - 1.0);
    const double one_sided_err = std::abs(lhs_partial_one_sided(at1000).value - 1.0);
    CHECK(one_sided_err > 10.0 * paired_err);
}

TEST_CASE("rhs closed values") {
    CHECK(rhs_closed(make(IdentityName::CoshProd, 1, 0, 0)) ==
          doctest::Approx(std::cosh(1.0)).epsilon(1e-15));
    CHECK(rhs_closed(make(IdentityName::TanSq, kPi / 3.0, 0, 0)) ==
          doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("verify: the full eight-case suite at N = 10^4") {
    const IdentityCase cases[] = {
        make(IdentityName::Mirror, 1, 0.5, 2),
        make(IdentityName::FourHands, 1, 0.5, 0.25),
        make(IdentityName::SinhProd, 1, 0, 0),
        make(IdentityName::CoshProd, 1, 0, 0),
        make(IdentityName::SinProd, 1, 0, 0),
        make(IdentityName::CosProd, 1, 0, 0),
        make(IdentityName::TanSq, kPi / 3.0, 0, 0),
        make(IdentityName::TanProd, 0, 0, kPi / 4.0),
    };
    for (const auto& c : cases) {
        const IdentityReport r = verify(c);
        INFO(r.name, " relError=", r.rel_error, " tailBound=", r.tail_bound);
        CHECK(r.pass);
    }
}

TEST_CASE("poles are refused") {
    try {
        verify(make(IdentityName::Mirror, 1, 0, 1));
        FAIL("expected PoleInParameters");
    } catch (const Error& e) {
        CHECK(e.code() == errc::pole_in_parameters);
    }
    try {
        rhs_closed(make(IdentityName::TanProd, 0, 0, kPi / 2.0));
        FAIL("expected PoleInParameters");
    } catch (const Error& e) {
        CHECK(e.code() == errc::pole_in_parameters);
    }
    try {
        lhs_partial(make(IdentityName::FourHands, 1e-12, 0.3, 0.3));
        FAIL("expected PoleInParameters");
    } catch (const Error& e) {
        CHECK(e.code() == errc::pole_in_parameters);
    }
}

TEST_CASE("degeneration chain: mirror at b = 0 is the sinh ratio") {
    const double pairs[][2] = {{1, 2}, {0.5, 1.5}, {2, 3}, {0.3, 0.8}, {1.2, 0.4}};
    for (const auto& p : pairs) {
        const double a = p[0], c = p[1];
        const double lhs = lhs_partial(make(IdentityName::Mirror, a, 0, c, 100000)).value;
        const double s = std::sinh((a + c) / 2.0) / std::sinh((a - c) / 2.0);
        CHECK(std::abs(lhs - s * s) / (s * s) < 1e-4);
    }
}

TEST_CASE("degeneration chain: mirror at b = pi, c = a is cosh^2") {
    for (const double a : {0.4, 0.8, 1.0, 1.7, 2.5}) {
        const double lhs = lhs_partial(make(IdentityName::Mirror, a, kPi, a, 100000)).value;
        const double c2 = std::cosh(a) * std::cosh(a);
        CHECK(std::abs(lhs - c2) / c2 < 1e-4);
    }
}

TEST_CASE("reflection identities tie sin/cos to sinh/cosh") {
    using Cx = std::complex<double>;
    for (const double a : {0.1, 0.5, 1.0, 2.0}) {
        // sin a = i sinh(-ia), cos a = cosh(ia)
        const Cx sin_via_sinh = Cx(0, 1) * std::sinh(Cx(0, -a));
        CHECK(std::abs(sin_via_sinh - Cx(std::sin(a))) < 1e-6);
        const Cx cos_via_cosh = std::cosh(Cx(0, a));
        CHECK(std::abs(cos_via_cosh - Cx(std::cos(a))) < 1e-6);

        // the partial products land on the same values within their certificates
        const IdentityReport rs = verify(make(IdentityName::SinProd, a, 0, 0));
        const IdentityReport rc = verify(make(IdentityName::CosProd, a, 0, 0));
        CHECK(rs.pass);
        CHECK(rc.pass);
    }
}

TEST_CASE("report serialization carries the documented fields") {
    const std::string json = to_json(verify(make(IdentityName::CoshProd, 1, 0, 0)));
    for (const char* key : {"\"name\"", "\"params\"", "\"N\"", "\"lhs\"", "\"rhs\"",
                            "\"relError\"", "\"tailBound\"", "\"pass\""})
        CHECK(json.find(key) != std::string::npos);
}

TEST_CASE("identity_from_string round trip") {
    for (const IdentityName n : {IdentityName::Mirror, IdentityName::FourHands,
                                 IdentityName::SinhProd, IdentityName::CoshProd,
                                 IdentityName::SinProd, IdentityName::CosProd,
                                 IdentityName::TanSq, IdentityName::TanProd})
        CHECK(identity_from_string(to_string(n)) == n);
    CHECK_THROWS_AS(identity_from_string("nope"), Error);
}
