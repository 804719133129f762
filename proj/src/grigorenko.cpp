#include "nqlab/grigorenko.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "nqlab/ode.hpp"

namespace nqlab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

SuperpositionState::SuperpositionState(std::vector<std::complex<double>> a)
    : amplitudes(std::move(a)) {
    if (amplitudes.empty())
        throw std::invalid_argument("SuperpositionState: empty amplitude vector");
    double norm2 = 0.0;
    for (auto& c : amplitudes) {
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw std::invalid_argument("SuperpositionState: non-finite amplitude");
        norm2 += std::norm(c);
    }
    if (std::abs(norm2 - 1.0) > 1e-10)
        throw std::invalid_argument("SuperpositionState: not normalized");
}

SuperpositionState SuperpositionState::from_weights(
    const std::vector<double>& weights) {
    std::vector<std::complex<double>> a;
    a.reserve(weights.size());
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("negative weight");
        sum += w;
    }
    if (sum <= 0.0) throw std::invalid_argument("all weights zero");
    for (double w : weights) a.emplace_back(std::sqrt(w / sum), 0.0);
    return SuperpositionState(std::move(a));
}

std::vector<double> SuperpositionState::populations() const {
    std::vector<double> p(amplitudes.size());
    for (std::size_t i = 0; i < amplitudes.size(); ++i) p[i] = std::norm(amplitudes[i]);
    return p;
}

void CollapseParams::validate(std::size_t n_states) const {
    if (gamma < 0.0) throw std::invalid_argument("CollapseParams: gamma < 0");
    if (q.size() != n_states)
        throw std::invalid_argument("CollapseParams: q size mismatch");
}

std::size_t argmax_winner(const std::vector<double>& q,
                          const std::vector<double>& weights) {
    std::size_t best = q.size();
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        if (best == q.size() || q[i] > q[best]) best = i;
    }
    if (best == q.size())
        throw std::invalid_argument("argmax_winner: all weights zero");
    return best;
}

SuperpositionState evolve_closed_form(const SuperpositionState& state,
                                      const CollapseParams& params, double t) {
    params.validate(state.size());
    if (t < 0.0) throw std::invalid_argument("evolve_closed_form: t < 0");
    const std::size_t n = state.size();

    // shift exponents by the max over states that actually contribute
    double emax = -kInf;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::norm(state.amplitudes[i]) == 0.0) continue;
        emax = std::max(emax, params.gamma * params.q[i] * t);
    }
    if (!std::isfinite(emax)) emax = 0.0;

    std::vector<std::complex<double>> out(n);
    double norm2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::norm(state.amplitudes[i]) == 0.0) {
            out[i] = 0.0;
            continue;
        }
        double e = params.gamma * params.q[i] * t - emax;
        out[i] = state.amplitudes[i] * std::exp(e);
        norm2 += std::norm(out[i]);
    }
    double inv = 1.0 / std::sqrt(norm2);
    for (auto& c : out) c *= inv;
    return SuperpositionState(std::move(out));
}

CollapseTrajectory evolve_ode(const SuperpositionState& state,
                              const CollapseParams& params, double t,
                              double dt_max) {
    params.validate(state.size());
    if (t < 0.0) throw std::invalid_argument("evolve_ode: t < 0");
    if (dt_max <= 0.0) throw std::invalid_argument("evolve_ode: dt_max <= 0");
    const std::size_t n = state.size();
    const auto w0 = state.populations();

    auto rhs = [&](double, const std::vector<std::complex<double>>& a,
                   std::vector<std::complex<double>>& da) {
        double mean_q = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            double pk = std::norm(a[k]);
            if (pk > 0.0 && std::isfinite(params.q[k])) mean_q += params.q[k] * pk;
        }
        for (std::size_t k = 0; k < n; ++k) {
            if (w0[k] == 0.0) {
                da[k] = 0.0;  // zero stays zero, exactly
            } else {
                da[k] = params.gamma * a[k] * (params.q[k] - mean_q);
            }
        }
    };

    CollapseTrajectory traj;
    OdeOptions opt;
    // one decade tighter than the nominal 1e-10 so that error accumulated
    // over long strongly-driven runs stays below 1e-8 in the populations
    opt.abs_tol = 1e-11;
    opt.rel_tol = 1e-11;
    opt.dt_max = dt_max;
    opt.observer = [&](double tt, const std::vector<std::complex<double>>& a) {
        traj.times.push_back(tt);
        std::vector<double> p(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = std::norm(a[i]);
        traj.populations.push_back(std::move(p));
    };
    integrate_rk45(rhs, state.amplitudes, 0.0, t, opt);

    // winner is decided by the q alone, restricted to populated states
    std::size_t best = argmax_winner(params.q, w0);
    bool distinct = false;
    for (std::size_t i = 0; i < n; ++i)
        if (w0[i] > 0.0 && params.q[i] != params.q[best]) distinct = true;
    if (params.gamma > 0.0 && distinct) traj.winner = best;
    return traj;
}

double ratio_log_slope(const CollapseTrajectory& traj, std::size_t i,
                       std::size_t j) {
    if (traj.times.size() < 2)
        throw std::invalid_argument("ratio_log_slope: need >= 2 samples");
    std::vector<double> x, y;
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        double pi = traj.populations[k][i];
        double pj = traj.populations[k][j];
        if (pi <= 0.0 || pj <= 0.0)
            throw std::domain_error(
                "ratio_log_slope: zero population for state " +
                std::to_string(pi <= 0.0 ? i : j) + " at t = " +
                std::to_string(traj.times[k]));
        x.push_back(traj.times[k]);
        y.push_back(std::log(pi / pj));
    }
    double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sx += x[k]; sy += y[k]; sxx += x[k] * x[k]; sxy += x[k] * y[k];
    }
    double denom = n * sxx - sx * sx;
    if (denom == 0.0) return 0.0;  // single distinct time
    return (n * sxy - sx * sy) / denom;
}

double collapse_time(const CollapseParams& params, std::size_t i,
                     std::size_t j) {
    double dq = params.q.at(i) - params.q.at(j);
    if (params.gamma == 0.0 || dq == 0.0)
        throw std::domain_error("collapse_time: infinite timescale (gamma or q_i - q_j is zero)");
    return 1.0 / (params.gamma * dq);
}

std::vector<double> sample_q_born(const std::vector<double>& weights,
                                  RngStream& rng) {
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("sample_q_born: negative weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-10)
        throw std::invalid_argument("sample_q_born: weights must sum to 1");
    std::vector<double> q(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] == 0.0) {
            q[i] = -kInf;
        } else {
            q[i] = std::log(rng.uniform_oc()) / weights[i];
        }
    }
    return q;
}

double sample_u_phase(RngStream& rng) {
    double chi = rng.uniform_angle();
    while (chi == 0.0) chi = rng.uniform_angle();
    return std::log(chi / (2.0 * std::numbers::pi));
}

std::size_t run_collapse_trial(const SuperpositionState& state, double gamma,
                               RngStream& rng, Sampling sampling) {
    if (gamma <= 0.0) throw std::invalid_argument("run_collapse_trial: gamma <= 0");
    auto weights = state.populations();
    std::vector<double> q(weights.size());
    if (sampling == Sampling::born_distribution) {
        q = sample_q_born(weights, rng);
    } else {
        for (std::size_t i = 0; i < weights.size(); ++i) {
            double u = sample_u_phase(rng);
            q[i] = weights[i] > 0.0 ? u / weights[i] : -kInf;
        }
    }
    return argmax_winner(q, weights);
}

}  // namespace nqlab
