#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "greenwalk/complex_geometry.hpp"
#include "support/oracles.hpp"

using namespace greenwalk;

TEST_CASE("mobius_apply: identity, paper map, disk automorphism") {
    const MobiusTransform id = make_mobius(1.0, 0.0, 0.0, 1.0);
    CHECK(mobius_apply(id, ComplexPoint(3.0, 4.0)).finite() == Complex(3.0, 4.0));

    // z -> -i(z-1)/(z+1) sends 0 to i
    const MobiusTransform cayley = cayley_disk_to_half_plane();
    CHECK(std::abs(mobius_apply(cayley, ComplexPoint(0.0, 0.0)).finite() - Complex(0.0, 1.0)) <
          1e-15);

    const MobiusTransform aut = disk_automorphism_transform(Complex(0.5, 0.0));
    CHECK(std::abs(mobius_apply(aut, ComplexPoint(0.5, 0.0)).finite()) < 1e-15);
}

TEST_CASE("mobius: degenerate transform refused") {
    CHECK_THROWS_WITH_AS(make_mobius(1.0, 2.0, 2.0, 4.0), doctest::Contains("ad - bc"),
                         Error);
    MobiusTransform bad{Complex(1.0), Complex(2.0), Complex(2.0), Complex(4.0)};
    try {
        mobius_apply(bad, ComplexPoint(0.0, 0.0));
        FAIL("expected DegenerateTransform");
    } catch (const Error& e) {
        CHECK(e.code() == errc::degenerate_transform);
    }
}

TEST_CASE("mobius: point at infinity is handled exactly") {
    const MobiusTransform m = make_mobius(Complex(2.0, 1.0), Complex(0.5, 0.0),
                                          Complex(1.0, 0.0), Complex(-3.0, 0.0));
    const ComplexPoint at_pole = mobius_apply(m, ComplexPoint(3.0, 0.0));   // cz + d = 0
    CHECK(at_pole.at_infinity);
    const ComplexPoint from_inf = mobius_apply(m, ComplexPoint::infinity());
    CHECK(from_inf.is_finite());
    CHECK(std::abs(from_inf.value - Complex(2.0, 1.0)) < 1e-15);   // a / c

    // Translations fix infinity.
    const MobiusTransform shift = make_mobius(1.0, Complex(5.0, -2.0), 0.0, 1.0);
    CHECK(mobius_apply(shift, ComplexPoint::infinity()).at_infinity);
}

TEST_CASE("mobius group laws over random points") {
    oracle::Rng rng(2024);
    const MobiusTransform m1 = make_mobius(Complex(1.0, 0.5), Complex(0.0, -1.0),
                                           Complex(0.3, 0.0), Complex(1.0, 1.0));
    const MobiusTransform m2 = make_mobius(Complex(0.0, 2.0), Complex(1.0, 0.0),
                                           Complex(-0.2, 0.1), Complex(2.0, 0.0));
    const MobiusTransform composed = mobius_compose(m1, m2);
    const MobiusTransform inv = mobius_inverse(m1);

    for (int i = 0; i < 100; ++i) {
        const ComplexPoint z(rng.uniform(-2, 2), rng.uniform(-2, 2));
        const ComplexPoint via_composed = mobius_apply(composed, z);
        const ComplexPoint via_two = mobius_apply(m1, mobius_apply(m2, z));
        CHECK(approx_equal(via_composed, via_two, 1e-10));
        CHECK(approx_equal(mobius_apply(inv, mobius_apply(m1, z)), z, 1e-12));
    }
}

TEST_CASE("domains: membership is boundary_distance > 0") {
    const Domain uhp = UpperHalfPlane{};
    const Domain disk = Disk{Complex(0.0, 0.0), 1.0};
    const Domain punctured = PuncturedDisk{};
    const Domain strip = Strip{1.0};

    CHECK(contains(uhp, Complex(0.0, 0.5)));
    CHECK(!contains(uhp, Complex(0.0, -0.5)));
    CHECK(boundary_distance(uhp, Complex(2.0, 0.7)) == doctest::Approx(0.7));

    CHECK(contains(disk, Complex(0.0, 0.0)));
    CHECK(!contains(punctured, Complex(0.0, 0.0)));
    // punctured disk otherwise agrees with the disk
    oracle::Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        const Complex z(rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2));
        if (z == Complex(0.0, 0.0)) continue;
        CHECK(contains(disk, z) == contains(punctured, z));
    }

    CHECK(boundary_distance(strip, Complex(10.0, 0.25)) == doctest::Approx(0.75));
    CHECK(boundary_distance(punctured, Complex(0.25, 0.0)) == doctest::Approx(0.25));
    CHECK(boundary_distance(punctured, Complex(0.9, 0.0)) == doctest::Approx(0.1));
}

TEST_CASE("stopping rules: validation") {
    CHECK_NOTHROW(validate(StoppingRule{WindingTime{1}}, Complex(1.0, 0.0)));
    try {
        validate(StoppingRule{WindingTime{1}}, Complex(0.0, 0.0));
        FAIL("expected OriginExcluded");
    } catch (const Error& e) {
        CHECK(e.code() == errc::origin_excluded);
    }
    try {
        validate(StoppingRule{WindingTime{0}}, Complex(1.0, 0.0));
        FAIL("expected InvalidArgument");
    } catch (const Error& e) {
        CHECK(e.code() == errc::invalid_argument);
    }
    try {
        validate(StoppingRule{ExitTime{UpperHalfPlane{}}}, Complex(0.0, -1.0));
        FAIL("expected OutsideDomain");
    } catch (const Error& e) {
        CHECK(e.code() == errc::outside_domain);
    }
}

TEST_CASE("preimages: squaring map on the unit disk") {
    const Domain disk = Disk{};
    const AnalyticMap square = PowerMap{2};

    const auto two = preimages(square, Complex(0.25, 0.0), disk);
    REQUIRE(two.size() == 2);
    // sorted by argument: 0.5 (arg 0) before -0.5 (arg pi)
    CHECK(std::abs(two[0].point - Complex(0.5, 0.0)) < 1e-12);
    CHECK(std::abs(two[1].point - Complex(-0.5, 0.0)) < 1e-12);
    CHECK(two[0].multiplicity == 1);
    CHECK(two[1].multiplicity == 1);

    const auto origin = preimages(square, Complex(0.0, 0.0), disk);
    REQUIRE(origin.size() == 1);
    CHECK(origin[0].point == Complex(0.0, 0.0));
    CHECK(origin[0].multiplicity == 2);
}

TEST_CASE("preimages: exp restricted to one period window") {
    const Domain strip = Strip{kPi};
    const auto pre = preimages(AnalyticMap{ExpMap{}}, Complex(1.0, 0.0), strip);
    REQUIRE(pre.size() == 1);
    CHECK(std::abs(pre[0].point) < 1e-14);   // principal logarithm of 1

    // two periods fit in a wider strip
    const auto wide = preimages(AnalyticMap{ExpMap{}}, Complex(1.0, 0.0), Domain{Strip{3.5 * kPi}});
    CHECK(wide.size() == 3);

    try {
        preimages(AnalyticMap{ExpMap{}}, Complex(1.0, 0.0), Domain{UpperHalfPlane{}});
        FAIL("expected UnsupportedMap");
    } catch (const Error& e) {
        CHECK(e.code() == errc::unsupported_map);
    }
}

TEST_CASE("preimages: evaluate round trip and multiplicity conservation") {
    oracle::Rng rng(11);
    const Domain disk = Disk{};

    for (const int k : {2, 3, 5}) {
        const AnalyticMap map = PowerMap{k};
        for (int trial = 0; trial < 40; ++trial) {
            const Complex inside = rng.in_disk(0.85);
            const Complex w = evaluate(map, inside);
            const auto pre = preimages(map, w, disk);
            int total = 0;
            for (const auto& p : pre) {
                total += p.multiplicity;
                CHECK(std::abs(evaluate(map, p.point) - w) < 1e-10);
            }
            CHECK(total == k);   // the k-fold image covers w exactly k times
        }
    }
}

TEST_CASE("preimages: conformal variants invert their maps") {
    oracle::Rng rng(12);
    const Domain disk = Disk{};
    const AnalyticMap aut = DiskAutomorphism{Complex(0.3, -0.4)};
    const AnalyticMap tan_map = TanQuarterStrip{};
    const Domain strip = Strip{1.0};

    for (int i = 0; i < 50; ++i) {
        const Complex z = rng.in_disk(0.9);
        const Complex w = evaluate(aut, z);
        const auto pre = preimages(aut, w, disk);
        REQUIRE(pre.size() == 1);
        CHECK(std::abs(pre[0].point - z) < 1e-10);

        const Complex zs = rng.in_strip(1.0, 2.0);
        const Complex ws = evaluate(tan_map, zs);
        const auto pres = preimages(tan_map, ws, strip);
        REQUIRE(pres.size() == 1);
        CHECK(std::abs(pres[0].point - zs) < 1e-9);
        CHECK(std::abs(evaluate(tan_map, pres[0].point) - ws) < 1e-10);
    }
}

TEST_CASE("preimages: deterministic ordering by argument then modulus") {
    const auto pre = preimages(AnalyticMap{PowerMap{5}}, Complex(0.1, 0.05), Domain{Disk{}});
    REQUIRE(pre.size() == 5);
    for (std::size_t i = 1; i < pre.size(); ++i) {
        const double a0 = std::arg(pre[i - 1].point), a1 = std::arg(pre[i].point);
        CHECK((a0 < a1 || (a0 == a1 && std::abs(pre[i - 1].point) <= std::abs(pre[i].point))));
    }
}

TEST_CASE("derivatives match finite differences") {
    oracle::Rng rng(13);
    const std::vector<AnalyticMap> maps = {
        PowerMap{3}, ExpMap{}, DiskAutomorphism{Complex(0.2, 0.1)},
        MobiusMap{cayley_disk_to_half_plane()}, TanQuarterStrip{}};
    const double h = 1e-6;
    for (const auto& map : maps) {
        for (int i = 0; i < 20; ++i) {
            const Complex z = rng.in_disk(0.7);
            const Complex fd =
                (evaluate(map, z + Complex(h, 0.0)) - evaluate(map, z - Complex(h, 0.0))) /
                (2.0 * h);
            CHECK(std::abs(fd - derivative(map, z)) < 1e-6);
        }
    }
}
