#include "nqlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace nqlab {

void EnsembleConfig::validate() const {
    if (trials < 1) throw std::invalid_argument("EnsembleConfig: trials < 1");
}

namespace {

// Lanczos ln(Gamma)
double ln_gamma(double x) {
    static const double c[6] = {76.18009172947146,   -86.50532032941677,
                                24.01409824083091,   -1.231739572450155,
                                0.1208650973866179e-2, -0.5395239384953e-5};
    double y = x;
    double tmp = x + 5.5;
    tmp -= (x + 0.5) * std::log(tmp);
    double ser = 1.000000000190015;
    for (double ci : c) ser += ci / ++y;
    return -tmp + std::log(2.5066282746310005 * ser / x);
}

// series for P(a, x), x < a + 1
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - ln_gamma(a));
}

// continued fraction for Q(a, x), x >= a + 1
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - ln_gamma(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double chi_square_p_value(double statistic, std::size_t dof) {
    if (dof == 0) return 1.0;
    return gamma_q(0.5 * static_cast<double>(dof), 0.5 * statistic);
}

BornTestReport chi_square_gof(const std::vector<double>& weights,
                              const std::vector<std::size_t>& counts) {
    if (weights.size() != counts.size())
        throw std::invalid_argument("chi_square_gof: size mismatch");
    std::size_t trials = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
    if (trials == 0) throw std::invalid_argument("chi_square_gof: no counts");

    // merge the smallest-weight states until every expected count >= 5
    std::vector<std::size_t> order(weights.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return weights[a] < weights[b]; });

    BornTestReport rep;
    rep.trials = trials;
    rep.merge_map.resize(weights.size());

    std::vector<double> w = weights;
    std::vector<std::size_t> c = counts;
    std::vector<std::vector<std::size_t>> groups(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) groups[i] = {i};

    // repeatedly fold the smallest expected bin into the next smallest
    auto expected_of = [&](std::size_t i) { return w[i] * static_cast<double>(trials); };
    bool merged = true;
    while (merged && groups.size() > 1) {
        merged = false;
        std::size_t lo = 0;
        for (std::size_t i = 1; i < groups.size(); ++i)
            if (w[i] < w[lo]) lo = i;
        if (expected_of(lo) < 5.0) {
            std::size_t next = lo == 0 ? 1 : 0;
            for (std::size_t i = 0; i < groups.size(); ++i)
                if (i != lo && w[i] < w[next]) next = i;
            w[next] += w[lo];
            c[next] += c[lo];
            groups[next].insert(groups[next].end(), groups[lo].begin(), groups[lo].end());
            w.erase(w.begin() + static_cast<std::ptrdiff_t>(lo));
            c.erase(c.begin() + static_cast<std::ptrdiff_t>(lo));
            groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(lo));
            rep.bins_merged = true;
            merged = true;
        }
    }
    for (std::size_t g = 0; g < groups.size(); ++g)
        for (std::size_t orig : groups[g]) rep.merge_map[orig] = g;

    rep.expected = w;
    rep.observed_counts = c;
    double stat = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        double e = w[i] * static_cast<double>(trials);
        if (e <= 0.0) continue;
        double d = static_cast<double>(c[i]) - e;
        stat += d * d / e;
    }
    rep.chi_square = stat;
    rep.p_value = chi_square_p_value(stat, w.size() > 1 ? w.size() - 1 : 0);
    rep.pass = rep.p_value > 0.01;
    return rep;
}

double chi_square_two_sample_p(const std::vector<std::size_t>& counts_a,
                               const std::vector<std::size_t>& counts_b) {
    if (counts_a.size() != counts_b.size() || counts_a.empty())
        throw std::invalid_argument("chi_square_two_sample_p: size mismatch");
    double na = 0, nb = 0;
    for (auto v : counts_a) na += static_cast<double>(v);
    for (auto v : counts_b) nb += static_cast<double>(v);
    if (na == 0 || nb == 0)
        throw std::invalid_argument("chi_square_two_sample_p: empty sample");
    double k_a = std::sqrt(nb / na), k_b = std::sqrt(na / nb);
    double stat = 0.0;
    std::size_t dof = 0;
    for (std::size_t i = 0; i < counts_a.size(); ++i) {
        double a = static_cast<double>(counts_a[i]);
        double b = static_cast<double>(counts_b[i]);
        if (a + b == 0.0) continue;
        double d = k_a * a - k_b * b;
        stat += d * d / (a + b);
        ++dof;
    }
    if (dof > 1) --dof;
    return chi_square_p_value(stat, dof);
}

KsResult ks_test(std::vector<double> samples, double (*cdf)(double)) {
    if (samples.size() < 100)
        throw std::invalid_argument("ks_test: need >= 100 samples");
    for (double s : samples)
        if (std::isnan(s)) throw std::invalid_argument("ks_test: NaN sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double f = cdf(samples[i]);
        double lo = static_cast<double>(i) / n;
        double hi = static_cast<double>(i + 1) / n;
        d = std::max(d, std::max(std::abs(f - lo), std::abs(hi - f)));
    }
    KsResult res;
    res.statistic = d;
    // asymptotic Kolmogorov distribution with the usual finite-n correction
    double sqn = std::sqrt(n);
    double lambda = (sqn + 0.12 + 0.11 / sqn) * d;
    double p = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 100; ++j) {
        double term = std::exp(-2.0 * j * j * lambda * lambda);
        p += 2.0 * sign * term;
        sign = -sign;
        if (term < 1e-12) break;
    }
    res.p_value = std::clamp(p, 0.0, 1.0);
    res.pass = res.p_value > 0.01;
    return res;
}

double exp_u_cdf(double u) { return u >= 0.0 ? 1.0 : std::exp(u); }

namespace {

template <typename TrialFn>
std::vector<std::size_t> parallel_tally(std::size_t n_states, std::size_t trials,
                                        unsigned parallelism, TrialFn&& trial_fn) {
    unsigned workers = std::max(1u, parallelism);
    workers = std::min<unsigned>(workers, std::thread::hardware_concurrency() > 0
                                              ? std::thread::hardware_concurrency()
                                              : 1u);
    std::vector<std::vector<std::size_t>> partial(workers,
                                                  std::vector<std::size_t>(n_states, 0));
    std::vector<std::thread> threads;
    for (unsigned wkr = 0; wkr < workers; ++wkr) {
        threads.emplace_back([&, wkr]() {
            for (std::size_t t = wkr; t < trials; t += workers)
                ++partial[wkr][trial_fn(t)];
        });
    }
    for (auto& th : threads) th.join();
    std::vector<std::size_t> counts(n_states, 0);
    for (auto& p : partial)
        for (std::size_t i = 0; i < n_states; ++i) counts[i] += p[i];
    return counts;
}

}  // namespace

std::vector<std::size_t> tally_winners(const SuperpositionState& state,
                                       const EnsembleConfig& config,
                                       Sampling sampling, double gamma) {
    config.validate();
    return parallel_tally(state.size(), config.trials, config.parallelism,
                          [&](std::size_t t) {
                              RngStream rng(config.master_seed, t);
                              return run_collapse_trial(state, gamma, rng, sampling);
                          });
}

std::vector<std::size_t> tally_winners_uniform_q(const SuperpositionState& state,
                                                 const EnsembleConfig& config) {
    config.validate();
    auto weights = state.populations();
    return parallel_tally(state.size(), config.trials, config.parallelism,
                          [&](std::size_t t) {
                              RngStream rng(config.master_seed, t);
                              std::vector<double> q(weights.size());
                              for (auto& v : q) v = rng.uniform_co();
                              return argmax_winner(q, weights);
                          });
}

BornTestReport run_born_ensemble(const SuperpositionState& state,
                                 const EnsembleConfig& config, BornEngine engine,
                                 Sampling sampling, double gamma) {
    config.validate();
    std::vector<std::size_t> counts;
    if (engine == BornEngine::grigorenko) {
        counts = tally_winners(state, config, sampling, gamma);
    } else {
        auto composite = composite_from_weights(state.populations());
        counts = parallel_tally(state.size(), config.trials, config.parallelism,
                                [&](std::size_t t) {
                                    RngStream rng(config.master_seed, t);
                                    return run_measurement(composite, rng, sampling).winner;
                                });
    }
    return chi_square_gof(state.populations(), counts);
}

}  // namespace nqlab
