#pragma once

#include <string>

#include "nqlab/grigorenko.hpp"
#include "nqlab/lifetime.hpp"
#include "nqlab/measurement.hpp"
#include "nqlab/pde.hpp"
#include "nqlab/stats.hpp"

namespace nqlab {

/// CSV with header t,pop_1,...,pop_N at 17 significant digits.
std::string trajectory_csv(const CollapseTrajectory& traj);

/// CSV with header x,re_psi,im_psi,rho,j for one snapshot.
std::string snapshot_csv(const GridWavefunction& psi, const DensityCurrent& dc);

std::string born_report_json(const BornTestReport& rep);
std::string born_counts_csv(const BornTestReport& rep);

std::string measurement_record_json(const MeasurementOutcome& outcome,
                                    Sampling sampling, std::uint64_t seed);

std::string lifetime_table_csv(const std::vector<LifetimePrediction>& rows);
std::string lifetime_table_json(const std::vector<LifetimePrediction>& rows);

void write_file(const std::string& path, const std::string& contents);

}  // namespace nqlab
