#include "nqlab/export.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace nqlab {

namespace {
std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double json_safe(double v) {
    // JSON has no literal for infinities; clamp to a sentinel
    if (std::isinf(v)) return v > 0 ? 1e308 : -1e308;
    return v;
}
}  // namespace

std::string trajectory_csv(const CollapseTrajectory& traj) {
    std::ostringstream out;
    std::size_t n = traj.populations.empty() ? 0 : traj.populations.front().size();
    out << "t";
    for (std::size_t i = 1; i <= n; ++i) out << ",pop_" << i;
    out << "\n";
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        out << fmt17(traj.times[k]);
        for (double p : traj.populations[k]) out << "," << fmt17(p);
        out << "\n";
    }
    return out.str();
}

std::string snapshot_csv(const GridWavefunction& psi, const DensityCurrent& dc) {
    std::ostringstream out;
    out << "x,re_psi,im_psi,rho,j\n";
    for (std::size_t i = 0; i < psi.size(); ++i) {
        out << fmt17(psi.x(i)) << "," << fmt17(psi.values[i].real()) << ","
            << fmt17(psi.values[i].imag()) << "," << fmt17(dc.rho[i]) << ","
            << fmt17(dc.j[i]) << "\n";
    }
    return out.str();
}

std::string born_report_json(const BornTestReport& rep) {
    nlohmann::json j;
    j["trials"] = rep.trials;
    j["expected"] = rep.expected;
    j["observed_counts"] = rep.observed_counts;
    j["chi_square"] = rep.chi_square;
    j["p_value"] = rep.p_value;
    j["pass"] = rep.pass;
    j["bins_merged"] = rep.bins_merged;
    j["merge_map"] = rep.merge_map;
    return j.dump(2) + "\n";
}

std::string born_counts_csv(const BornTestReport& rep) {
    std::ostringstream out;
    out << "state_index,expected,observed\n";
    for (std::size_t i = 0; i < rep.expected.size(); ++i)
        out << i << "," << fmt17(rep.expected[i] * static_cast<double>(rep.trials))
            << "," << rep.observed_counts[i] << "\n";
    return out.str();
}

std::string measurement_record_json(const MeasurementOutcome& outcome,
                                    Sampling sampling, std::uint64_t seed) {
    nlohmann::json j;
    std::vector<double> q;
    for (double v : outcome.sampled_Q) q.push_back(json_safe(v));
    j["sampled_Q"] = q;
    j["winner"] = outcome.winner;
    j["collapse_time_scale"] = json_safe(outcome.collapse_time_scale);
    j["sampling"] =
        sampling == Sampling::born_distribution ? "born_distribution" : "phase_mechanism";
    j["seed"] = seed;
    nlohmann::json traj;
    traj["times"] = outcome.trajectory.times;
    traj["populations"] = outcome.trajectory.populations;
    j["trajectory"] = traj;
    return j.dump(2) + "\n";
}

std::string lifetime_table_csv(const std::vector<LifetimePrediction>& rows) {
    std::ostringstream out;
    out << "name,N,a,L,mass,formula,tau_s,log10_tier,quoted_prediction\n";
    PhysicalConstants k;
    for (const auto& r : rows) {
        out << r.name << "," << fmt17(r.spec.n_atoms) << ","
            << fmt17(r.spec.atomic_length) << "," << fmt17(r.spec.size(k)) << ","
            << fmt17(r.spec.total_mass(k)) << "," << r.formula << ","
            << fmt17(r.tau) << "," << r.tier << ",\"" << r.quoted_prediction
            << "\"\n";
    }
    return out.str();
}

std::string lifetime_table_json(const std::vector<LifetimePrediction>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    PhysicalConstants k;
    for (const auto& r : rows) {
        nlohmann::json j;
        j["name"] = r.name;
        j["N"] = r.spec.n_atoms;
        j["a"] = r.spec.atomic_length;
        j["L"] = r.spec.size(k);
        j["mass"] = r.spec.total_mass(k);
        j["formula"] = r.formula;
        j["tau_s"] = r.tau;
        j["log10_tier"] = r.tier;
        j["quoted_prediction"] = r.quoted_prediction;
        arr.push_back(j);
    }
    return arr.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << contents;
    if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace nqlab
