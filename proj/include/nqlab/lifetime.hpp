#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nqlab/constants.hpp"

namespace nqlab {

/// Mesoscopic/macroscopic object described by atom count and atomic size.
/// Linear size and mass are derived (L^3 = N a^3, m = N m_atom) unless given.
struct ObjectSpec {
    double n_atoms = 1.0;
    double atomic_length = 1e-10;  // m
    std::optional<double> linear_size;  // m
    std::optional<double> mass;         // kg

    void validate() const;
    double size(const PhysicalConstants& k) const;
    double total_mass(const PhysicalConstants& k) const;
};

/// tau = m1 / ((1 - theta) phi''). theta = 1 signals an infinite lifetime.
double tau_general(double m1, double theta, double phase_curvature);

/// Apparatus-scale estimate tau ~ L / c.
double tau_apparatus(double L, const PhysicalConstants& k);

/// tau ~ (1 + m1/m_Pl) (m_Pl a^2 / hbar) N^{-1/3}, with m1 = N m_atom.
double tau_mesoscopic(const ObjectSpec& spec, const PhysicalConstants& k);

/// Planck-regime estimate tau^2 ~ m_Pl a^2 / (m_atom c^2 N^{1/3}).
double tau_planck_regime(const ObjectSpec& spec, const PhysicalConstants& k);

/// floor(log10(tau)), the order-of-magnitude tier used for comparisons.
int log10_tier(double tau);

struct LifetimePrediction {
    std::string name;
    ObjectSpec spec;
    std::string formula;     // which estimate applies
    double tau;              // s
    int tier;                // floor(log10 tau)
    std::string quoted_prediction;  // published prediction, when one exists
};

/// Presets for the ongoing experiments discussed alongside the lifetime
/// formulas, each evaluated with the applicable estimate.
std::vector<LifetimePrediction> experiment_presets(const PhysicalConstants& k);

}  // namespace nqlab
