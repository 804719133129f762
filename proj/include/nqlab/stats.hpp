#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nqlab/grigorenko.hpp"
#include "nqlab/measurement.hpp"

namespace nqlab {

struct EnsembleConfig {
    std::size_t trials = 1;
    std::uint64_t master_seed = 0;
    unsigned parallelism = 1;  // worker count hint

    void validate() const;
};

struct BornTestReport {
    std::vector<double> expected;         // weight vector (after any merge)
    std::vector<std::size_t> observed_counts;
    double chi_square = 0.0;
    double p_value = 1.0;
    bool pass = false;                    // at significance 0.01
    std::size_t trials = 0;
    bool bins_merged = false;
    std::vector<std::size_t> merge_map;   // original state -> merged bin
};

enum class BornEngine { grigorenko, measurement };

/// Upper regularized incomplete gamma Q(a, x); chi-square survival function
/// is Q(df/2, x/2).
double gamma_q(double a, double x);

double chi_square_p_value(double statistic, std::size_t dof);

/// Tally of winner counts against expected weights. States whose expected
/// count falls below 5 are merged (smallest first) before the test.
BornTestReport chi_square_gof(const std::vector<double>& weights,
                              const std::vector<std::size_t>& counts);

/// Two-sample chi-square on two count vectors over the same categories.
double chi_square_two_sample_p(const std::vector<std::size_t>& counts_a,
                               const std::vector<std::size_t>& counts_b);

struct KsResult {
    double statistic = 0.0;
    double p_value = 0.0;
    bool pass = false;  // at significance 0.01
};

/// One-sample Kolmogorov-Smirnov test against a closed-form CDF.
KsResult ks_test(std::vector<double> samples, double (*cdf)(double));

/// CDF of the phase variable u = ln(chi / 2 pi): F(u) = e^u on (-inf, 0].
double exp_u_cdf(double u);

/// Runs `trials` collapse trials (stream index = trial number) and tests
/// the winner tally against the Born weights. Counts are identical for any
/// parallelism at fixed master_seed.
BornTestReport run_born_ensemble(const SuperpositionState& state,
                                 const EnsembleConfig& config,
                                 BornEngine engine,
                                 Sampling sampling = Sampling::born_distribution,
                                 double gamma = 1.0);

/// Winner counts only, without the verdict; used by the cross-mode checks.
std::vector<std::size_t> tally_winners(const SuperpositionState& state,
                                       const EnsembleConfig& config,
                                       Sampling sampling, double gamma = 1.0);

/// Negative-control sampler: q uniform on [0, 1), independent of weights.
std::vector<std::size_t> tally_winners_uniform_q(const SuperpositionState& state,
                                                 const EnsembleConfig& config);

}  // namespace nqlab
