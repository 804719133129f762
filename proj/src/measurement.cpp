#include "nqlab/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace nqlab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t nearest_index(const GridWavefunction& psi, double x) {
    double fi = (x - psi.x0) / psi.dx;
    auto i = static_cast<std::ptrdiff_t>(std::llround(fi));
    if (i < 1 || i + 1 >= static_cast<std::ptrdiff_t>(psi.size()))
        throw std::invalid_argument("position outside the interior of the grid");
    return static_cast<std::size_t>(i);
}

std::vector<double> sample_Q(const std::vector<double>& weights, RngStream& rng,
                             Sampling sampling) {
    std::vector<double> Q(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) {
            Q[i] = -kInf;
        } else if (sampling == Sampling::born_distribution) {
            Q[i] = std::log(rng.uniform_oc()) / weights[i];
        } else {
            Q[i] = sample_u_phase(rng) / weights[i];
        }
    }
    return Q;
}
}  // namespace

void PointerModel::validate() const {
    apparatus_psi.validate();
    if (!(m1 > 0.0) || !(m2 > 0.0))
        throw std::invalid_argument("PointerModel: masses must be positive");
    if (gamma < 0.0 || gamma >= 1.0)
        throw std::invalid_argument("PointerModel: gamma must be in [0, 1)");
    if (bins.empty()) throw std::invalid_argument("PointerModel: no bins");
    double grid_lo = apparatus_psi.x0;
    double grid_hi = apparatus_psi.x(apparatus_psi.size() - 1);
    double prev_hi = -kInf;
    for (const auto& b : bins) {
        if (!(b.x_hi > b.x_lo))
            throw std::invalid_argument("PointerModel: empty bin interval");
        if (b.x_lo < prev_hi)
            throw std::invalid_argument("PointerModel: bins overlap or unsorted");
        if (b.x_lo < grid_lo - 0.5 * apparatus_psi.dx ||
            b.x_hi > grid_hi + 0.5 * apparatus_psi.dx)
            throw std::invalid_argument("PointerModel: bin outside grid domain");
        if ((b.x_hi - b.x_lo) / apparatus_psi.dx < 4.0)
            throw std::invalid_argument("PointerModel: bin narrower than 4 grid points");
        prev_hi = b.x_hi;
    }
}

std::vector<PointerBin> PointerModel::default_bins(const GridWavefunction& psi,
                                                   std::size_t n_bins) {
    if (n_bins == 0) throw std::invalid_argument("default_bins: n_bins == 0");
    double L = psi.dx * static_cast<double>(psi.size() - 1);
    double lo = psi.x0 + 0.1 * L;
    double hi = psi.x0 + 0.9 * L;
    std::vector<PointerBin> bins(n_bins);
    double w = (hi - lo) / static_cast<double>(n_bins);
    for (std::size_t i = 0; i < n_bins; ++i)
        bins[i] = {lo + w * static_cast<double>(i),
                   lo + w * static_cast<double>(i + 1)};
    return bins;
}

OverlapResult pointer_overlap(const GridWavefunction& psi,
                              const std::vector<PointerBin>& bins) {
    psi.validate();
    OverlapResult res;
    res.raw_weights.assign(bins.size(), 0.0);
    res.midpoint.assign(bins.size(), 0.0);
    for (std::size_t b = 0; b < bins.size(); ++b) {
        std::size_t count = 0;
        for (std::size_t i = 0; i < psi.size(); ++i) {
            double x = psi.x(i);
            if (x >= bins[b].x_lo && x < bins[b].x_hi) {
                res.raw_weights[b] += std::norm(psi.values[i]) * psi.dx;
                ++count;
            }
        }
        if (count == 0)
            throw std::invalid_argument("pointer_overlap: bin " +
                                        std::to_string(b) + " contains no grid points");
        double xc = 0.5 * (bins[b].x_lo + bins[b].x_hi);
        std::size_t ic = nearest_index(psi, xc);
        res.midpoint[b] =
            (bins[b].x_hi - bins[b].x_lo) * std::norm(psi.values[ic]);
    }
    double inside = 0.0;
    for (double w : res.raw_weights) inside += w;
    res.residual = psi.norm() - inside;
    if (inside <= 0.0)
        throw std::invalid_argument("pointer_overlap: no probability inside bins");
    res.weights.resize(bins.size());
    for (std::size_t b = 0; b < bins.size(); ++b)
        res.weights[b] = res.raw_weights[b] / inside;
    return res;
}

CompositeState::CompositeState(SuperpositionState amps, PointerModel p,
                               std::vector<double> phase)
    : system_amplitudes(std::move(amps)),
      pointer(std::move(p)),
      phase_field(std::move(phase)) {
    pointer.validate();
    if (system_amplitudes.size() != pointer.bins.size())
        throw std::invalid_argument("CompositeState: amplitude/bin count mismatch");
    if (phase_field.size() != pointer.apparatus_psi.size())
        throw std::invalid_argument("CompositeState: phase field size mismatch");
    auto overlap = pointer_overlap(pointer.apparatus_psi, pointer.bins);
    auto pops = system_amplitudes.populations();
    for (std::size_t i = 0; i < pops.size(); ++i)
        if (std::abs(pops[i] - overlap.weights[i]) > 1e-8)
            throw std::invalid_argument(
                "CompositeState: |a_n|^2 does not match the pointer overlap for bin " +
                std::to_string(i));
}

CompositeState CompositeState::from_apparatus(PointerModel p,
                                              std::vector<double> phase) {
    p.validate();
    auto overlap = pointer_overlap(p.apparatus_psi, p.bins);
    auto amps = SuperpositionState::from_weights(overlap.weights);
    return CompositeState(std::move(amps), std::move(p), std::move(phase));
}

double compute_Q(const std::vector<double>& phase_field,
                 const GridWavefunction& psi, double gamma, double m1,
                 double hbar, double x_n, QMode mode) {
    psi.validate();
    if (phase_field.size() != psi.size())
        throw std::invalid_argument("compute_Q: phase field size mismatch");
    std::size_t i = nearest_index(psi, x_n);
    double inv_dx2 = 1.0 / (psi.dx * psi.dx);
    double phi_dd =
        (phase_field[i + 1] - 2.0 * phase_field[i] + phase_field[i - 1]) * inv_dx2;
    double Q = gamma / m1 * phi_dd;
    if (mode == QMode::full) {
        double floor = 0.0;
        for (auto& c : psi.values) floor = std::max(floor, std::abs(c));
        floor *= 1e-10;
        if (std::abs(psi.values[i]) < floor)
            throw std::domain_error("compute_Q: |psi(x_n)| below floor in full mode");
        std::complex<double> pdd =
            (psi.values[i + 1] - 2.0 * psi.values[i] + psi.values[i - 1]) * inv_dx2;
        Q -= hbar / m1 *
             std::imag(std::conj(psi.values[i]) * pdd) / std::norm(psi.values[i]);
    }
    return Q;
}

std::vector<double> evolve_populations(const std::vector<double>& weights,
                                       const std::vector<double>& Q, double t) {
    if (weights.size() != Q.size())
        throw std::invalid_argument("evolve_populations: size mismatch");
    if (t < 0.0) throw std::invalid_argument("evolve_populations: t < 0");
    double emax = -kInf;
    for (std::size_t i = 0; i < weights.size(); ++i)
        if (weights[i] > 0.0) emax = std::max(emax, Q[i] * t);
    if (!std::isfinite(emax)) emax = 0.0;
    std::vector<double> out(weights.size(), 0.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        out[i] = weights[i] * std::exp(Q[i] * t - emax);
        sum += out[i];
    }
    if (sum <= 0.0)
        throw std::invalid_argument("evolve_populations: all weights zero");
    for (auto& w : out) w /= sum;
    return out;
}

MeasurementOutcome run_measurement(const CompositeState& composite,
                                   RngStream& rng, Sampling sampling) {
    auto weights = composite.system_amplitudes.populations();
    auto Q = sample_Q(weights, rng, sampling);
    std::size_t winner = argmax_winner(Q, weights);

    std::size_t live = 0;
    double second = -kInf;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        ++live;
        if (i != winner) second = std::max(second, Q[i]);
    }

    MeasurementOutcome out;
    out.winner = winner;
    out.sampled_Q = Q;
    out.collapse_time_scale = live < 2 ? kInf : 1.0 / (Q[winner] - second);

    double t_end = live < 2 ? 1.0 : 10.0 * out.collapse_time_scale;
    const std::size_t n_times = 21;
    for (std::size_t k = 0; k < n_times; ++k) {
        double t = t_end * static_cast<double>(k) / static_cast<double>(n_times - 1);
        out.trajectory.times.push_back(t);
        out.trajectory.populations.push_back(evolve_populations(weights, Q, t));
    }
    if (live >= 2) out.trajectory.winner = winner;
    return out;
}

PartialMeasurementResult partial_measurement(const CompositeState& composite,
                                             const std::vector<double>& Q,
                                             double gamma, double t,
                                             std::size_t winner) {
    if (t < 0.0) throw std::invalid_argument("partial_measurement: t < 0");
    auto weights = composite.system_amplitudes.populations();
    if (Q.size() != weights.size())
        throw std::invalid_argument("partial_measurement: Q size mismatch");
    const std::size_t n = weights.size();
    const std::size_t m = winner;

    PartialMeasurementResult res;
    res.winner = m;
    double am_t = std::sqrt(weights[m]) * std::exp(0.5 * gamma * Q[m] * t);
    res.coefficients.resize(n);
    res.norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i == m) {
            res.coefficients[i] = am_t;
        } else {
            double Qmn = Q[m] - Q[i];
            res.coefficients[i] = std::exp(-0.5 * gamma * Qmn * t) * am_t;
        }
        res.norm += res.coefficients[i] * res.coefficients[i];
    }

    // closed-form comparison: amplitudes keep their initial ratios
    double emax = -kInf;
    for (std::size_t i = 0; i < n; ++i)
        if (weights[i] > 0.0) emax = std::max(emax, gamma * Q[i] * t);
    if (!std::isfinite(emax)) emax = 0.0;
    res.closed_form_amplitudes.assign(n, 0.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (weights[i] <= 0.0) continue;
        double v = std::sqrt(weights[i]) * std::exp(0.5 * (gamma * Q[i] * t - emax));
        res.closed_form_amplitudes[i] = v;
        sum += v * v;
    }
    double inv = 1.0 / std::sqrt(sum);
    for (auto& v : res.closed_form_amplitudes) v *= inv;
    return res;
}

SequentialResult sequential_measurement_discriminator(
    const CompositeState& composite, double t_partial, std::uint64_t master_seed,
    std::size_t trials, Sampling sampling, bool t_in_collapse_units) {
    if (t_partial < 0.0)
        throw std::invalid_argument("sequential_measurement_discriminator: t < 0");
    if (trials == 0)
        throw std::invalid_argument("sequential_measurement_discriminator: 0 trials");
    auto weights = composite.system_amplitudes.populations();
    const double gamma = composite.pointer.gamma;
    const std::size_t n = weights.size();

    SequentialResult res;
    res.outcome_frequencies.assign(n, 0.0);
    res.trials = trials;
    std::size_t repeats = 0;

    for (std::size_t trial = 0; trial < trials; ++trial) {
        RngStream rng(master_seed, trial);
        auto Q1 = sample_Q(weights, rng, sampling);
        std::size_t first = argmax_winner(Q1, weights);
        double t = t_partial;
        if (t_in_collapse_units) {
            double second_rate = -kInf;
            for (std::size_t i = 0; i < n; ++i)
                if (i != first && weights[i] > 0.0)
                    second_rate = std::max(second_rate, Q1[i]);
            t = std::isfinite(second_rate)
                    ? t_partial / (Q1[first] - second_rate)
                    : 0.0;
        }
        auto partial = partial_measurement(composite, Q1, gamma, t, first);

        // residual weights from the closed-form state (exact at t = 0)
        std::vector<double> residual(n);
        for (std::size_t i = 0; i < n; ++i)
            residual[i] = partial.closed_form_amplitudes[i] *
                          partial.closed_form_amplitudes[i];

        auto Q2 = sample_Q(residual, rng, sampling);
        std::size_t second = argmax_winner(Q2, residual);
        res.outcome_frequencies[second] += 1.0;
        if (second == first) ++repeats;
    }
    for (auto& f : res.outcome_frequencies) f /= static_cast<double>(trials);
    res.repeat_probability = static_cast<double>(repeats) / static_cast<double>(trials);
    return res;
}

CompositeState composite_from_weights(const std::vector<double>& weights,
                                      double gamma) {
    if (weights.empty())
        throw std::invalid_argument("composite_from_weights: empty weights");
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("composite_from_weights: negative weight");
        sum += w;
    }
    if (sum <= 0.0) throw std::invalid_argument("composite_from_weights: all zero");

    const std::size_t per_bin = 8;
    const std::size_t n_bins = weights.size();
    // grid sized so the default central-80% window holds all bins
    const std::size_t n = std::max<std::size_t>(16, (n_bins * per_bin * 10) / 8 + 4);
    GridWavefunction psi;
    psi.x0 = 0.0;
    psi.dx = 1.0;
    psi.values.assign(n, 0.0);

    auto bins = PointerModel::default_bins(psi, n_bins);
    for (std::size_t b = 0; b < n_bins; ++b) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < n; ++i) {
            double x = psi.x(i);
            if (x >= bins[b].x_lo && x < bins[b].x_hi) idx.push_back(i);
        }
        double w = weights[b] / sum;
        double amp = std::sqrt(w / (static_cast<double>(idx.size()) * psi.dx));
        for (std::size_t i : idx) psi.values[i] = amp;
    }

    PointerModel pm;
    pm.bins = std::move(bins);
    pm.apparatus_psi = std::move(psi);
    pm.m1 = 1.0;
    pm.m2 = 1.0;
    pm.gamma = gamma;
    std::vector<double> phase(pm.apparatus_psi.size(), 0.0);
    return CompositeState::from_apparatus(std::move(pm), std::move(phase));
}

double theta_calibration(double chi_n, double weight, double phase_curvature,
                         double m1) {
    if (!(chi_n > 0.0) || chi_n > 2.0 * std::numbers::pi)
        throw std::invalid_argument("theta_calibration: chi must be in (0, 2pi]");
    if (weight == 0.0)
        throw std::domain_error("theta_calibration: zero weight");
    if (phase_curvature == 0.0)
        throw std::domain_error("theta_calibration: zero phase curvature");
    if (!(m1 > 0.0)) throw std::invalid_argument("theta_calibration: m1 <= 0");
    return m1 * std::log(chi_n / (2.0 * std::numbers::pi)) /
           (weight * phase_curvature);
}

}  // namespace nqlab
