#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "nqlab/rng.hpp"

namespace nqlab {

/// Normalized amplitude vector over a discrete eigenbasis.
struct SuperpositionState {
    std::vector<std::complex<double>> amplitudes;

    explicit SuperpositionState(std::vector<std::complex<double>> a);
    static SuperpositionState from_weights(const std::vector<double>& weights);

    std::size_t size() const { return amplitudes.size(); }
    std::vector<double> populations() const;
};

/// Coupling gamma and the per-state random variables q_n that drive the
/// collapse. q_n may be -inf for states with zero weight (never wins).
struct CollapseParams {
    double gamma = 1.0;
    std::vector<double> q;

    void validate(std::size_t n_states) const;
};

struct CollapseTrajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> populations;  // one vector per time
    std::optional<std::size_t> winner;
};

/// Exact solution |a_i(t)| = e^{gamma q_i t} |a_i(0)| / sqrt(sum_n ...),
/// with exponents shifted by their maximum before exponentiation so large
/// gamma*q*t cannot overflow. Phases are untouched (H0 = 0 convention).
SuperpositionState evolve_closed_form(const SuperpositionState& state,
                                      const CollapseParams& params, double t);

/// Adaptive RK45 integration of da_n/dt = gamma a_n (q_n - sum_k q_k |a_k|^2).
/// No renormalization is applied; norm drift is the error metric.
CollapseTrajectory evolve_ode(const SuperpositionState& state,
                              const CollapseParams& params, double t,
                              double dt_max);

/// Least-squares slope of ln(pop_i / pop_j) against time. For exact
/// trajectories this equals 2 gamma (q_i - q_j).
double ratio_log_slope(const CollapseTrajectory& traj, std::size_t i,
                       std::size_t j);

/// 1 / (gamma (q_i - q_j)). Throws if the difference or gamma vanishes.
double collapse_time(const CollapseParams& params, std::size_t i,
                     std::size_t j);

/// Draw q_n from the Born-rule density w(q) = p_n exp(p_n q) on (-inf, 0]
/// via the inverse CDF q_n = ln(U_n) / p_n. Zero-weight states get -inf.
std::vector<double> sample_q_born(const std::vector<double>& weights,
                                  RngStream& rng);

/// u = ln(chi / 2 pi) with chi uniform on [0, 2 pi]; density e^u on (-inf, 0].
double sample_u_phase(RngStream& rng);

enum class Sampling { born_distribution, phase_mechanism };

/// One collapse trial: sample the q_n, return the index of the surviving
/// state (argmax q over nonzero-weight states, ties to the lowest index).
std::size_t run_collapse_trial(const SuperpositionState& state, double gamma,
                               RngStream& rng,
                               Sampling sampling = Sampling::born_distribution);

std::size_t argmax_winner(const std::vector<double>& q,
                          const std::vector<double>& weights);

}  // namespace nqlab
