#include <doctest.h>

#include <cmath>

#include "nqlab/constants.hpp"
#include "nqlab/rng.hpp"

using namespace nqlab;

TEST_CASE("planck mass from CODATA constants") {
    PhysicalConstants k;
    // oracle: direct arithmetic sqrt(hbar c / G)
    double expected = std::sqrt(1.054571817e-34 * 299792458.0 / 6.67430e-11);
    CHECK(planck_mass(k) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(planck_mass(k) == doctest::Approx(2.176e-8).epsilon(1e-3));
    // in grams: order of magnitude 1e-5
    CHECK(std::floor(std::log10(planck_mass(k) * 1e3)) == -5);
}

TEST_CASE("planck mass in natural units is 1") {
    PhysicalConstants k;
    k.hbar = 1.0;
    k.c = 1.0;
    k.G = 1.0;
    CHECK(planck_mass(k) == 1.0);
}

TEST_CASE("constants must be positive") {
    PhysicalConstants k;
    k.G = 0.0;
    CHECK_THROWS_AS(planck_mass(k), std::invalid_argument);
}

TEST_CASE("theta_of_mass limits and fixed points") {
    PhysicalConstants k;
    double mpl = planck_mass(k);
    CHECK(theta_of_mass(0.0, k) == 1.0);
    CHECK(theta_of_mass(mpl, k) == doctest::Approx(0.5).epsilon(1e-14));
    // m = 1000 m_Pl: 1/(1+1000), cross-checked against the 1/(1+x) series
    double direct = theta_of_mass(1000.0 * mpl, k);
    CHECK(direct == doctest::Approx(1.0 / 1001.0).epsilon(1e-12));
    CHECK(direct == doctest::Approx(9.99e-4).epsilon(1e-3));
    CHECK_THROWS_AS(theta_of_mass(-1.0, k), std::invalid_argument);
}

TEST_CASE("theta_of_mass strictly monotone decreasing") {
    PhysicalConstants k;
    double prev = theta_of_mass(0.0, k);
    for (double m = 1e-12; m < 1e3; m *= 10.0) {
        double cur = theta_of_mass(m * planck_mass(k), k);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("unit round trip is the identity") {
    PhysicalConstants k;
    UnitSystem u(k);
    for (double v : {1.0e-30, 1.0, 3.14159, 1e12}) {
        CHECK(u.mass_to_si(u.mass_to_natural(v)) == doctest::Approx(v).epsilon(1e-12));
        CHECK(u.length_to_si(u.length_to_natural(v)) == doctest::Approx(v).epsilon(1e-12));
        CHECK(u.time_to_si(u.time_to_natural(v)) == doctest::Approx(v).epsilon(1e-12));
    }
    // hbar = 1 and m_Pl = 1 in natural units
    CHECK(u.mass_to_natural(k.planck_mass()) == doctest::Approx(1.0).epsilon(1e-14));
    double hbar_nat = k.hbar / (u.mass_unit() * u.length_unit() * u.length_unit() /
                                u.time_unit());
    CHECK(hbar_nat == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("rng streams reproduce and differ") {
    RngStream a(42, 7), b(42, 7), c(42, 8);
    bool all_equal = true, any_equal_c = false;
    for (int i = 0; i < 1000; ++i) {
        auto va = a.next_u64();
        auto vb = b.next_u64();
        auto vc = c.next_u64();
        if (va != vb) all_equal = false;
        if (va == vc) any_equal_c = true;
    }
    CHECK(all_equal);
    CHECK_FALSE(any_equal_c);
}

TEST_CASE("rng uniform ranges") {
    RngStream r(1, 0);
    for (int i = 0; i < 10000; ++i) {
        double u = r.uniform_oc();
        CHECK(u > 0.0);
        CHECK(u <= 1.0);
        double v = r.uniform_co();
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
    }
}
