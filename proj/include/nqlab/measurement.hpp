#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "nqlab/grigorenko.hpp"
#include "nqlab/pde.hpp"
#include "nqlab/rng.hpp"

namespace nqlab {

/// One pointer interval [x_lo, x_hi), correlated with one eigenstate.
struct PointerBin {
    double x_lo;
    double x_hi;
};

/// Apparatus pointer wavefunction with its readout bins.
struct PointerModel {
    std::vector<PointerBin> bins;
    GridWavefunction apparatus_psi;
    double m1 = 1.0;
    double m2 = 1.0;
    double gamma = 0.0;  // 1 - theta(m1)

    void validate() const;
    /// Equal-width contiguous bins over the central 80% of the grid.
    static std::vector<PointerBin> default_bins(const GridWavefunction& psi,
                                                std::size_t n_bins);
};

struct OverlapResult {
    std::vector<double> weights;      // renormalized to sum 1
    std::vector<double> raw_weights;  // plain per-bin quadrature
    std::vector<double> midpoint;     // the dx_n |psi(x_n)|^2 approximation
    double residual;                  // probability outside all bins
};

struct CompositeState {
    SuperpositionState system_amplitudes;
    PointerModel pointer;
    std::vector<double> phase_field;  // phi_F on the apparatus grid

    CompositeState(SuperpositionState amps, PointerModel p,
                   std::vector<double> phase);
    /// Builds the system amplitudes from the pointer overlaps.
    static CompositeState from_apparatus(PointerModel p,
                                         std::vector<double> phase);
};

struct MeasurementOutcome {
    std::size_t winner;
    double collapse_time_scale;  // infinite when fewer than 2 live states
    std::vector<double> sampled_Q;
    CollapseTrajectory trajectory;
};

enum class QMode { full, nonlinear_dominant };

/// Per-bin weights |a_n|^2 by grid quadrature of |psi|^2.
OverlapResult pointer_overlap(const GridWavefunction& psi,
                              const std::vector<PointerBin>& bins);

/// Collapse rate from the phase curvature at x_n:
///   nonlinear_dominant: Q = (gamma/m1) phi_F''(x_n)
///   full:               adds -(hbar/m1) Im[psi* psi''] / |psi|^2
double compute_Q(const std::vector<double>& phase_field,
                 const GridWavefunction& psi, double gamma, double m1,
                 double hbar, double x_n, QMode mode);

/// w_n(t) proportional to w_n(0) exp(Q_n t), renormalized to sum 1.
/// The population ratio law ln(w_i/w_j)' = Q_i - Q_j holds exactly.
std::vector<double> evolve_populations(const std::vector<double>& weights,
                                       const std::vector<double>& Q, double t);

MeasurementOutcome run_measurement(const CompositeState& composite,
                                   RngStream& rng, Sampling sampling);

struct PartialMeasurementResult {
    std::vector<double> coefficients;          // unnormalized fixed-ratio form
    double norm;                               // <psi_out|psi_out>_t
    std::vector<double> closed_form_amplitudes;  // ratio-preserving comparison
    std::size_t winner;
};

/// The residual superposition after coupling the apparatus for time t,
/// computed both as the fixed-coefficient expression (secondary amplitudes
/// set by the rate gaps alone) and as the closed-form normalized state.
PartialMeasurementResult partial_measurement(const CompositeState& composite,
                                             const std::vector<double>& Q,
                                             double gamma, double t,
                                             std::size_t winner);

struct SequentialResult {
    std::vector<double> outcome_frequencies;  // second-measurement outcomes
    double repeat_probability;                // P(second winner == first)
    std::size_t trials;
};

/// Partial first measurement for t_partial, then a full second measurement
/// on the renormalized residual, repeated over `trials` RNG streams.
/// With t_in_collapse_units set, t_partial is interpreted per trial as a
/// multiple of that trial's collapse_time_scale, so the coupling window
/// tracks the sampled rate gap instead of wall time.
SequentialResult sequential_measurement_discriminator(
    const CompositeState& composite, double t_partial, std::uint64_t master_seed,
    std::size_t trials, Sampling sampling = Sampling::born_distribution,
    bool t_in_collapse_units = false);

/// Synthetic composite whose pointer overlaps equal the given weights:
/// a piecewise-constant apparatus packet over default bins. Convenient for
/// weight-only experiments (born tests, the thought experiment).
CompositeState composite_from_weights(const std::vector<double>& weights,
                                      double gamma = 0.5);

/// Diagnostic consistency value 1 - theta(m1) implied by a sampled phase:
/// m1 ln(chi/2pi) / (|a_n|^2 phi_F''(x_n)). Not used to drive dynamics.
double theta_calibration(double chi_n, double weight, double phase_curvature,
                         double m1);

}  // namespace nqlab
