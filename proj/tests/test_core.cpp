#include <catch2/catch_amalgamated.hpp>

#include "test_util.hpp"

using namespace ewgeo;
using Catch::Approx;

namespace {

long long binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - i + 1) / i;
    return r;
}

} // namespace

TEST_CASE("multiplicities match dimension counts") {
    const auto m2 = multiplicities(2);
    CHECK(m2.nu_plus == 4);
    CHECK(m2.nu_minus == 0);
    CHECK(m2.nu_zero == 2);
    const auto m3 = multiplicities(3);
    CHECK(m3.nu_plus == 10);
    CHECK(m3.nu_minus == 1);
    CHECK(m3.nu_zero == 8);
    const auto m4 = multiplicities(4);
    CHECK(m4.nu_plus == 20);
    CHECK(m4.nu_minus == 4);
    CHECK(m4.nu_zero == 20);

    // independent count: nu_plus is the symmetric-subspace dimension C(d+2,3),
    // nu_minus the antisymmetric one C(d,3), the rest splits in two
    for (int d = 2; d <= 20; ++d) {
        const auto m = multiplicities(d);
        const long long n = static_cast<long long>(d) * d * d;
        CHECK(m.nu_plus == binom(d + 2, 3));
        CHECK(m.nu_minus == binom(d, 3));
        CHECK(m.nu_zero == (n - m.nu_plus - m.nu_minus) / 2);
        CHECK(m.nu_plus + m.nu_minus + 2 * m.nu_zero == n);
        CHECK(m.nu_plus > 0);
        CHECK(m.nu_minus >= 0);
        CHECK(m.nu_zero > 0);
    }
    CHECK_THROWS_AS(multiplicities(1), InvalidParameters);
    CHECK_THROWS_AS(multiplicities(0), InvalidParameters);
}

TEST_CASE("validate reports each constraint separately") {
    SECTION("interior point from the triseparability paradox") {
        const EWPoint p = ewtest::paradox_point();
        const auto v = validate(p);
        CHECK(v.valid);
        CHECK(p.r0() == Approx(0.63));
        CHECK(p.radius2() == Approx(0.373).epsilon(1e-3));
    }
    SECTION("simplex violation") {
        const auto v = validate({0.5, 0.6, 0, 0, 0});
        CHECK_FALSE(v.valid);
        REQUIRE_FALSE(v.violations.empty());
    }
    SECTION("degenerate ball boundary point is valid") {
        CHECK(validate({0.0, 1.0, 0, 0, 0}).valid);
    }
    SECTION("ball violation") {
        const auto v = validate({0.1, 0.2, 0.8, 0, 0});
        CHECK_FALSE(v.valid);
        CHECK(v.violations.size() == 1);
    }
    SECTION("slack accepts float fuzz") {
        CHECK_FALSE(validate({-1e-14, 0.2, 0, 0, 0}).valid);
        CHECK(validate_with_slack({-1e-14, 0.2, 0, 0, 0}).valid);
    }
}

TEST_CASE("spherical chart conventions: r1 is the polar axis") {
    const auto s1 = to_spherical({0, 0, 1, 0, 0});
    CHECK(s1.radius == Approx(1.0));
    CHECK(s1.theta == Approx(0.0).margin(1e-15));
    CHECK(s1.phi == 0.0);

    const auto s2 = to_spherical({0, 0, 0, 1, 0});
    CHECK(s2.theta == Approx(kPi / 2));
    CHECK(s2.phi == Approx(0.0).margin(1e-15));

    SphericalPoint s;
    s.radius = 0.3;
    s.theta = 1.1;
    s.phi = 2.2;
    const auto back = to_spherical(to_cartesian(s));
    CHECK(back.radius == Approx(0.3).margin(1e-14));
    CHECK(back.theta == Approx(1.1).margin(1e-14));
    CHECK(back.phi == Approx(2.2).margin(1e-14));

    const auto z = to_spherical({0.1, 0.1, 0, 0, 0});
    CHECK(z.radius == 0.0);
    CHECK(z.theta == 0.0);
    CHECK(z.phi == 0.0);
}

TEST_CASE("spherical round trip on 1e5 family points") {
    const auto pts = ewtest::family_points(VolumeElementCase::General, 100000, 3);
    double worst = 0.0;
    for (const auto& p : pts) {
        const EWPoint q = to_cartesian(to_spherical(p));
        worst = std::max({worst, std::abs(q.r1 - p.r1), std::abs(q.r2 - p.r2),
                          std::abs(q.r3 - p.r3)});
    }
    CHECK(worst < 1e-13);
}

TEST_CASE("spectrum values and multiplicities") {
    SECTION("maximally mixed three-qutrit state") {
        const Spectrum sp = spectrum({1.0 / 27, 10.0 / 27, 0, 0, 0}, 3);
        long long total = 0;
        for (const auto& e : sp) {
            CHECK(e.value == Approx(1.0 / 27).margin(1e-15));
            total += e.multiplicity;
        }
        CHECK(total == 27);
    }
    SECTION("three-qubit example") {
        const Spectrum sp = spectrum({0, 0.25, 0, 0, 0.75}, 2);
        REQUIRE(sp.size() == 3);
        CHECK(sp[0].value == Approx(1.0 / 16));
        CHECK(sp[0].multiplicity == 4);
        CHECK(sp[1].value == Approx(3.0 / 8));
        CHECK(sp[1].multiplicity == 2);
        CHECK(sp[2].value == Approx(0.0).margin(1e-15));
        CHECK(sp[2].multiplicity == 2);
    }
    SECTION("trace normalization and positivity across d") {
        for (int d : {2, 3, 4}) {
            const auto cse = d == 2 ? VolumeElementCase::Qubit : VolumeElementCase::General;
            for (const auto& p : ewtest::family_points(cse, 200, 11 + d)) {
                double total = 0.0, lo = 1.0;
                for (const auto& e : spectrum(p, d)) {
                    total += e.value * static_cast<double>(e.multiplicity);
                    lo = std::min(lo, e.value);
                }
                CHECK(total == Approx(1.0).margin(1e-12));
                CHECK(lo >= -1e-12);
            }
        }
    }
    SECTION("errors") {
        CHECK_THROWS_AS(spectrum({0.5, 0.6, 0, 0, 0}, 3), InvalidParameters);
        CHECK_THROWS_AS(spectrum({0.1, 0.2, 0, 0, 0}, 2), InvalidParameters);
    }
}

TEST_CASE("point serialization round trips") {
    const EWPoint p = ewtest::paradox_point();
    SECTION("json") {
        const auto j = to_json(p);
        CHECK(j.dump() ==
              R"({"r_minus":0.1,"r_plus":0.27,"r":[0.589304,0.08100014,-0.138433]})");
        const EWPoint q = point_from_json(j);
        CHECK(q.r_minus == p.r_minus);
        CHECK(q.r3 == p.r3);
    }
    SECTION("csv") {
        const EWPoint q = point_from_csv_row(to_csv_row(p));
        CHECK(q.r_minus == p.r_minus);
        CHECK(q.r_plus == p.r_plus);
        CHECK(q.r1 == p.r1);
        CHECK(q.r2 == p.r2);
        CHECK(q.r3 == p.r3);
    }
    SECTION("parse failures") {
        CHECK_THROWS_AS(point_from_json_text("{\"r_plus\": 1}"), ConfigParse);
        CHECK_THROWS_AS(point_from_json_text("not json"), ConfigParse);
        CHECK_THROWS_AS(point_from_csv_row("a,b,c,d,e"), ConfigParse);
    }
}
