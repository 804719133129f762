#pragma once

#include <cmath>
#include <stdexcept>

namespace nqlab {

/// Fundamental constants in SI units. The Planck mass is always derived
/// from the stored hbar, c, G so the set stays self-consistent when a
/// constant is overridden from a config file.
struct PhysicalConstants {
    double hbar = 1.054571817e-34;   // J s
    double c = 299792458.0;          // m/s
    double G = 6.67430e-11;          // m^3 / (kg s^2)
    double m_atom = 1.67262192369e-27;  // kg, proton mass by default

    double planck_mass() const { return std::sqrt(hbar * c / G); }

    void validate() const {
        if (!(hbar > 0.0) || !(c > 0.0) || !(G > 0.0) || !(m_atom > 0.0))
            throw std::invalid_argument("physical constants must be strictly positive");
    }
};

inline double planck_mass(const PhysicalConstants& k) {
    k.validate();
    return k.planck_mass();
}

/// theta(m) = 1 / (1 + m / m_Pl): 1 in the deep quantum regime, 0 in the
/// classical limit. Other monotone profiles can be passed wherever a
/// theta value is consumed; this is the default used for all predictions.
inline double theta_of_mass(double mass, const PhysicalConstants& k) {
    if (mass < 0.0) throw std::invalid_argument("theta_of_mass: negative mass");
    return 1.0 / (1.0 + mass / planck_mass(k));
}

/// Natural-unit conventions: hbar = 1 and m_Pl = 1, which fixes the
/// length unit to hbar/(m_Pl c) and the time unit to hbar/(m_Pl c^2).
class UnitSystem {
public:
    explicit UnitSystem(const PhysicalConstants& k) : k_(k) {
        k_.validate();
        mass_unit_ = k_.planck_mass();
        length_unit_ = k_.hbar / (mass_unit_ * k_.c);
        time_unit_ = k_.hbar / (mass_unit_ * k_.c * k_.c);
    }

    double mass_to_natural(double kg) const { return kg / mass_unit_; }
    double mass_to_si(double m) const { return m * mass_unit_; }
    double length_to_natural(double meters) const { return meters / length_unit_; }
    double length_to_si(double x) const { return x * length_unit_; }
    double time_to_natural(double seconds) const { return seconds / time_unit_; }
    double time_to_si(double t) const { return t * time_unit_; }

    double mass_unit() const { return mass_unit_; }
    double length_unit() const { return length_unit_; }
    double time_unit() const { return time_unit_; }

private:
    PhysicalConstants k_;
    double mass_unit_, length_unit_, time_unit_;
};

}  // namespace nqlab
