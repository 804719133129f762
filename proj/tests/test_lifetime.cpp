#include <doctest.h>

#include <cmath>

#include "nqlab/lifetime.hpp"

using namespace nqlab;

TEST_CASE("tau_general in natural units") {
    CHECK(tau_general(1.0, 0.0, 1.0) == 1.0);
    CHECK(tau_general(1.0, 0.5, 1.0) == 2.0);
    CHECK(tau_general(2.0, 0.5, 4.0) == doctest::Approx(1.0).epsilon(1e-14));
    // linearity in m1: tripling the mass triples the lifetime
    double r = tau_general(3.0 * 1.7, 0.25, 0.9) / tau_general(1.7, 0.25, 0.9);
    CHECK(r == doctest::Approx(3.0).epsilon(1e-14));
    CHECK_THROWS_AS(tau_general(1.0, 1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(tau_general(1.0, 0.5, 0.0), std::domain_error);
    CHECK_THROWS_AS(tau_general(0.0, 0.5, 1.0), std::invalid_argument);
}

TEST_CASE("tau_general diverges as theta approaches 1") {
    double prev = tau_general(1.0, 0.9, 1.0);
    for (double theta : {0.99, 0.999, 0.9999}) {
        double cur = tau_general(1.0, theta, 1.0);
        CHECK(cur > prev);
        prev = cur;
    }
    CHECK(prev > 1e3);
}

TEST_CASE("tau_apparatus is light travel time") {
    PhysicalConstants k;
    CHECK(tau_apparatus(1e-3, k) == doctest::Approx(1e-3 / 299792458.0).epsilon(1e-14));
    CHECK(log10_tier(tau_apparatus(1e-3, k)) == -12);
    CHECK(tau_apparatus(299792458.0, k) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(tau_apparatus(0.1, k) == doctest::Approx(3.3356e-10).epsilon(1e-4));
    CHECK_THROWS_AS(tau_apparatus(0.0, k), std::invalid_argument);
}

TEST_CASE("mesoscopic lifetime prefactor and tiers") {
    PhysicalConstants k;
    ObjectSpec s;
    s.n_atoms = 1.0;
    // N = 1 at a = 1 angstrom: m_Pl a^2 / hbar, about 2.1e6 seconds
    double pref = k.planck_mass() * 1e-20 / k.hbar;
    CHECK(tau_mesoscopic(s, k) ==
          doctest::Approx(pref * (1.0 + k.m_atom / k.planck_mass())).epsilon(1e-14));
    CHECK(tau_mesoscopic(s, k) == doctest::Approx(2.06e6).epsilon(5e-3));

    s.n_atoms = 1e9;
    double tau9 = tau_mesoscopic(s, k);
    CHECK(tau9 == doctest::Approx(2.06e3).epsilon(5e-3));
    CHECK(log10_tier(tau9) == 3);

    s.n_atoms = 1e12;
    CHECK(log10_tier(tau_mesoscopic(s, k)) == 2);
    s.n_atoms = 1e15;
    CHECK(log10_tier(tau_mesoscopic(s, k)) == 1);
}

TEST_CASE("mesoscopic lifetime scaling in N") {
    PhysicalConstants k;
    ObjectSpec a, b;
    a.n_atoms = 1e9;
    b.n_atoms = 8e9;
    double ta = tau_mesoscopic(a, k);
    double tb = tau_mesoscopic(b, k);
    double mass_ratio = (1.0 + b.n_atoms * k.m_atom / k.planck_mass()) /
                        (1.0 + a.n_atoms * k.m_atom / k.planck_mass());
    CHECK(tb / ta == doctest::Approx(0.5 * mass_ratio).epsilon(1e-12));
    CHECK(tb < ta);  // lifetimes shrink with size

    double prev = tau_mesoscopic(a, k);
    for (double n : {1e10, 1e12, 1e14, 1e16}) {
        ObjectSpec s;
        s.n_atoms = n;
        double cur = tau_mesoscopic(s, k);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("planck-regime lifetime") {
    PhysicalConstants k;
    ObjectSpec s;
    s.n_atoms = 1e18;
    // sqrt(m_Pl a^2 / (m_atom c^2 N^{1/3})), about a picosecond
    double tau2 = k.planck_mass() * 1e-20 / (k.m_atom * k.c * k.c * 1e6);
    CHECK(tau_planck_regime(s, k) == doctest::Approx(std::sqrt(tau2)).epsilon(1e-14));
    CHECK(tau_planck_regime(s, k) == doctest::Approx(1.2e-12).epsilon(5e-3));
    CHECK(log10_tier(tau_planck_regime(s, k)) == -12);

    // N^{-1/6} scaling
    ObjectSpec big;
    big.n_atoms = 1e24;
    double r = tau_planck_regime(big, k) / tau_planck_regime(s, k);
    CHECK(r == doctest::Approx(std::pow(1e6, -1.0 / 6.0)).epsilon(1e-12));
}

TEST_CASE("object spec derived quantities") {
    PhysicalConstants k;
    ObjectSpec s;
    s.n_atoms = 1e9;
    CHECK(s.size(k) == doctest::Approx(1e-10 * 1e3).epsilon(1e-12));
    CHECK(s.total_mass(k) == doctest::Approx(1e9 * k.m_atom).epsilon(1e-14));
    s.linear_size = 0.25;
    s.mass = 1.5;
    CHECK(s.size(k) == 0.25);
    CHECK(s.total_mass(k) == 1.5);
    s.n_atoms = 0.0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("log10_tier") {
    CHECK(log10_tier(1.0) == 0);
    CHECK(log10_tier(999.0) == 2);
    CHECK(log10_tier(1000.0) == 3);
    CHECK(log10_tier(3.3e-10) == -10);
    CHECK_THROWS_AS(log10_tier(0.0), std::invalid_argument);
    CHECK_THROWS_AS(log10_tier(-1.0), std::invalid_argument);
}

TEST_CASE("experiment presets") {
    PhysicalConstants k;
    auto presets = experiment_presets(k);
    REQUIRE(presets.size() == 4);

    CHECK(presets[0].name == "Vienna");
    CHECK(presets[0].spec.n_atoms == 1e9);
    CHECK(presets[0].tier == 3);
    CHECK(presets[0].quoted_prediction.find("10^3") != std::string::npos);

    CHECK(presets[1].name == "CalTech");
    CHECK(presets[1].tau == doctest::Approx(958.0).epsilon(5e-3));
    CHECK(presets[1].tier == 2);

    CHECK(presets[2].name == "LIGO");
    CHECK(presets[2].formula == "apparatus");
    CHECK(presets[2].tau == doctest::Approx(0.1 / k.c).epsilon(1e-12));

    CHECK(presets[3].name == "Oxford");
    CHECK(presets[3].tau == doctest::Approx(44.5).epsilon(5e-3));
    CHECK(presets[3].tier == 1);

    // every preset lifetime agrees with recomputing its own formula
    for (const auto& p : presets) {
        double tau = p.formula == "apparatus" ? tau_apparatus(*p.spec.linear_size, k)
                                              : tau_mesoscopic(p.spec, k);
        CHECK(p.tau == tau);
        CHECK(p.tier == log10_tier(tau));
    }
}
