#include "nqlab/lifetime.hpp"

#include <cmath>
#include <stdexcept>

namespace nqlab {

void ObjectSpec::validate() const {
    if (!(n_atoms >= 1.0)) throw std::invalid_argument("ObjectSpec: N < 1");
    if (!(atomic_length > 0.0)) throw std::invalid_argument("ObjectSpec: a <= 0");
    if (linear_size && !(*linear_size > 0.0))
        throw std::invalid_argument("ObjectSpec: L <= 0");
    if (mass && !(*mass > 0.0)) throw std::invalid_argument("ObjectSpec: mass <= 0");
}

double ObjectSpec::size(const PhysicalConstants&) const {
    validate();
    if (linear_size) return *linear_size;
    return atomic_length * std::cbrt(n_atoms);
}

double ObjectSpec::total_mass(const PhysicalConstants& k) const {
    validate();
    if (mass) return *mass;
    return n_atoms * k.m_atom;
}

double tau_general(double m1, double theta, double phase_curvature) {
    if (!(m1 > 0.0)) throw std::invalid_argument("tau_general: m1 <= 0");
    if (theta >= 1.0)
        throw std::domain_error("tau_general: theta = 1, lifetime is infinite");
    if (phase_curvature == 0.0)
        throw std::domain_error("tau_general: zero phase curvature");
    return m1 / ((1.0 - theta) * phase_curvature);
}

double tau_apparatus(double L, const PhysicalConstants& k) {
    if (!(L > 0.0)) throw std::invalid_argument("tau_apparatus: L <= 0");
    return L / k.c;
}

double tau_mesoscopic(const ObjectSpec& spec, const PhysicalConstants& k) {
    spec.validate();
    k.validate();
    double m_pl = k.planck_mass();
    double m1 = spec.total_mass(k);
    return (1.0 + m1 / m_pl) * (m_pl * spec.atomic_length * spec.atomic_length / k.hbar) /
           std::cbrt(spec.n_atoms);
}

double tau_planck_regime(const ObjectSpec& spec, const PhysicalConstants& k) {
    spec.validate();
    k.validate();
    double tau2 = k.planck_mass() * spec.atomic_length * spec.atomic_length /
                  (k.m_atom * k.c * k.c * std::cbrt(spec.n_atoms));
    return std::sqrt(tau2);
}

int log10_tier(double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("log10_tier: tau <= 0");
    return static_cast<int>(std::floor(std::log10(tau)));
}

std::vector<LifetimePrediction> experiment_presets(const PhysicalConstants& k) {
    std::vector<LifetimePrediction> out;

    auto meso = [&](std::string name, double n_atoms, std::string quote) {
        ObjectSpec s;
        s.n_atoms = n_atoms;
        double tau = tau_mesoscopic(s, k);
        out.push_back({std::move(name), s, "mesoscopic", tau, log10_tier(tau),
                       std::move(quote)});
    };

    meso("Vienna", 1e9, "~10^3 seconds for N = 10^9");
    meso("CalTech", 1e10, "");
    {
        ObjectSpec s;
        s.n_atoms = 1e18;  // kilogram-scale mirror, lifetime set by L/c
        s.linear_size = 0.1;
        double tau = tau_apparatus(*s.linear_size, k);
        out.push_back({"LIGO", s, "apparatus", tau, log10_tier(tau),
                       "about 10^{-8} seconds"});
    }
    meso("Oxford", 1e14, "");
    return out;
}

}  // namespace nqlab
