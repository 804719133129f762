#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace nqlab {

enum class Boundary { periodic, absorbing };

/// Complex field on a uniform 1-D grid.
struct GridWavefunction {
    double x0 = 0.0;
    double dx = 1.0;
    std::vector<std::complex<double>> values;
    Boundary boundary = Boundary::periodic;

    void validate() const;
    std::size_t size() const { return values.size(); }
    double x(std::size_t i) const { return x0 + dx * static_cast<double>(i); }
    double norm() const;           // sum |psi|^2 dx
    void normalize();
    double mean_x() const;
    double width() const;          // sqrt of the position variance
};

struct PDEParams {
    double mass = 1.0;
    double theta = 1.0;
    double diffusion_D = 0.0;
    std::function<double(double)> potential;  // null = free
    double dt = 0.0;        // max time step; 0 = stability bound only
    double hbar = 1.0;      // natural units by default
    double abs_strength = 1.0;  // absorbing-boundary damping rate

    void validate() const;
};

struct DensityCurrent {
    std::vector<double> rho;
    std::vector<double> j;
};

enum class PdeEngine { linear, doebner_goldin, nonlinear_theta };
enum class ContinuityMode { standard, fokker_planck, effective };

struct PdeSnapshot {
    double t;
    GridWavefunction psi;
};

struct ResidualReport {
    std::vector<double> field;  // residual at the central interior time
    double max_norm = 0.0;
    double l2_norm = 0.0;
};

GridWavefunction evolve(PdeEngine engine, const GridWavefunction& psi,
                        const PDEParams& params, double t);

/// Uniformly spaced snapshots including t = 0 and t = t_final.
std::vector<PdeSnapshot> evolve_snapshots(PdeEngine engine,
                                          const GridWavefunction& psi,
                                          const PDEParams& params,
                                          double t_final,
                                          std::size_t n_snapshots);

inline GridWavefunction evolve_linear(const GridWavefunction& psi,
                                      const PDEParams& p, double t) {
    return evolve(PdeEngine::linear, psi, p, t);
}
inline GridWavefunction evolve_doebner_goldin(const GridWavefunction& psi,
                                              const PDEParams& p, double t) {
    return evolve(PdeEngine::doebner_goldin, psi, p, t);
}
inline GridWavefunction evolve_nonlinear_theta(const GridWavefunction& psi,
                                               const PDEParams& p, double t) {
    return evolve(PdeEngine::nonlinear_theta, psi, p, t);
}

/// Psi_eff = Psi^{1/theta}, with the phase of log Psi unwrapped along the
/// grid so the branch is continuous.
GridWavefunction effective_wavefunction(const GridWavefunction& psi,
                                        double theta);

/// rho and j for either the standard pair (Eqs. of the linear theory) or
/// the effective pair built from Psi_eff with the theta-scaled current.
DensityCurrent density_current(const GridWavefunction& psi,
                               const PDEParams& params, bool effective);

/// Discrete residual of the conservation law matching `mode`, from >= 3
/// uniformly spaced snapshots. Centered differences in space and time.
ResidualReport continuity_residual(const std::vector<PdeSnapshot>& traj,
                                   const PDEParams& params,
                                   ContinuityMode mode);

/// The nonlinearity of the theta model evaluated without stepping:
/// Psi * d^2(log Psi)/dx^2, which is identically zero on plane waves.
std::vector<std::complex<double>> theta_nonlinear_term(
    const GridWavefunction& psi);

/// Quasi-Hamilton-Jacobi phase S = -i hbar log(Psi), branch-continuous.
std::vector<std::complex<double>> quasi_hj_phase(const GridWavefunction& psi,
                                                 double hbar);

GridWavefunction make_gaussian(std::size_t n, double x0, double dx,
                               double center, double sigma0, double k0 = 0.0);
GridWavefunction make_plane_wave(std::size_t n, double x0, double dx,
                                 int mode);

}  // namespace nqlab
