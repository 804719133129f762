#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nqlab/constants.hpp"
#include "nqlab/export.hpp"
#include "nqlab/grigorenko.hpp"
#include "nqlab/lifetime.hpp"
#include "nqlab/measurement.hpp"
#include "nqlab/pde.hpp"
#include "nqlab/rng.hpp"
#include "nqlab/stats.hpp"

namespace py = pybind11;
using namespace nqlab;

PYBIND11_MODULE(_core, m) {
    m.doc() = "numerical laboratory for nonlinear collapse dynamics";

    // constants
    py::class_<PhysicalConstants>(m, "PhysicalConstants")
        .def(py::init<>())
        .def_readwrite("hbar", &PhysicalConstants::hbar)
        .def_readwrite("c", &PhysicalConstants::c)
        .def_readwrite("G", &PhysicalConstants::G)
        .def_readwrite("m_atom", &PhysicalConstants::m_atom)
        .def("planck_mass", &PhysicalConstants::planck_mass);
    m.def("planck_mass", &planck_mass, py::arg("constants") = PhysicalConstants{});
    m.def("theta_of_mass", &theta_of_mass, py::arg("mass"),
          py::arg("constants") = PhysicalConstants{});

    // rng
    py::class_<RngStream>(m, "RngStream")
        .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("master_seed"),
             py::arg("stream_index"))
        .def("next_u64", &RngStream::next_u64)
        .def("uniform_oc", &RngStream::uniform_oc)
        .def("uniform_co", &RngStream::uniform_co)
        .def("uniform_angle", &RngStream::uniform_angle);

    // collapse dynamics on a discrete basis
    py::class_<SuperpositionState>(m, "SuperpositionState")
        .def(py::init<std::vector<std::complex<double>>>(), py::arg("amplitudes"))
        .def_static("from_weights", &SuperpositionState::from_weights)
        .def_readonly("amplitudes", &SuperpositionState::amplitudes)
        .def("populations", &SuperpositionState::populations)
        .def("__len__", &SuperpositionState::size);

    py::class_<CollapseParams>(m, "CollapseParams")
        .def(py::init<>())
        .def_readwrite("gamma", &CollapseParams::gamma)
        .def_readwrite("q", &CollapseParams::q);

    py::class_<CollapseTrajectory>(m, "CollapseTrajectory")
        .def_readonly("times", &CollapseTrajectory::times)
        .def_readonly("populations", &CollapseTrajectory::populations)
        .def_readonly("winner", &CollapseTrajectory::winner);

    py::enum_<Sampling>(m, "Sampling")
        .value("born_distribution", Sampling::born_distribution)
        .value("phase_mechanism", Sampling::phase_mechanism);

    m.def("evolve_closed_form", &evolve_closed_form, py::arg("state"),
          py::arg("params"), py::arg("t"));
    m.def("evolve_ode", &evolve_ode, py::arg("state"), py::arg("params"),
          py::arg("t"), py::arg("dt_max"));
    m.def("ratio_log_slope", &ratio_log_slope);
    m.def("collapse_time", &collapse_time);
    m.def("sample_q_born", &sample_q_born);
    m.def("sample_u_phase", &sample_u_phase);
    m.def("run_collapse_trial", &run_collapse_trial, py::arg("state"),
          py::arg("gamma"), py::arg("rng"),
          py::arg("sampling") = Sampling::born_distribution);
    m.def("argmax_winner", &argmax_winner);

    // grid states and PDE engines
    py::enum_<Boundary>(m, "Boundary")
        .value("periodic", Boundary::periodic)
        .value("absorbing", Boundary::absorbing);

    py::enum_<PdeEngine>(m, "PdeEngine")
        .value("linear", PdeEngine::linear)
        .value("doebner_goldin", PdeEngine::doebner_goldin)
        .value("nonlinear_theta", PdeEngine::nonlinear_theta);

    py::enum_<ContinuityMode>(m, "ContinuityMode")
        .value("standard", ContinuityMode::standard)
        .value("fokker_planck", ContinuityMode::fokker_planck)
        .value("effective", ContinuityMode::effective);

    py::class_<GridWavefunction>(m, "GridWavefunction")
        .def(py::init<>())
        .def_readwrite("x0", &GridWavefunction::x0)
        .def_readwrite("dx", &GridWavefunction::dx)
        .def_readwrite("values", &GridWavefunction::values)
        .def_readwrite("boundary", &GridWavefunction::boundary)
        .def("x", &GridWavefunction::x)
        .def("norm", &GridWavefunction::norm)
        .def("normalize", &GridWavefunction::normalize)
        .def("mean_x", &GridWavefunction::mean_x)
        .def("width", &GridWavefunction::width)
        .def("__len__", &GridWavefunction::size);

    py::class_<PDEParams>(m, "PDEParams")
        .def(py::init<>())
        .def_readwrite("mass", &PDEParams::mass)
        .def_readwrite("theta", &PDEParams::theta)
        .def_readwrite("diffusion_D", &PDEParams::diffusion_D)
        .def_readwrite("potential", &PDEParams::potential)
        .def_readwrite("dt", &PDEParams::dt)
        .def_readwrite("hbar", &PDEParams::hbar)
        .def_readwrite("abs_strength", &PDEParams::abs_strength);

    py::class_<PdeSnapshot>(m, "PdeSnapshot")
        .def_readonly("t", &PdeSnapshot::t)
        .def_readonly("psi", &PdeSnapshot::psi);

    py::class_<DensityCurrent>(m, "DensityCurrent")
        .def_readonly("rho", &DensityCurrent::rho)
        .def_readonly("j", &DensityCurrent::j);

    py::class_<ResidualReport>(m, "ResidualReport")
        .def_readonly("field", &ResidualReport::field)
        .def_readonly("max_norm", &ResidualReport::max_norm)
        .def_readonly("l2_norm", &ResidualReport::l2_norm);

    m.def("make_gaussian", &make_gaussian, py::arg("n"), py::arg("x0"),
          py::arg("dx"), py::arg("center"), py::arg("sigma0"), py::arg("k0") = 0.0);
    m.def("make_plane_wave", &make_plane_wave, py::arg("n"), py::arg("x0"),
          py::arg("dx"), py::arg("mode"));
    m.def("evolve", &evolve, py::arg("engine"), py::arg("psi"), py::arg("params"),
          py::arg("t"));
    m.def("evolve_snapshots", &evolve_snapshots, py::arg("engine"), py::arg("psi"),
          py::arg("params"), py::arg("t_final"), py::arg("n_snapshots"));
    m.def("effective_wavefunction", &effective_wavefunction, py::arg("psi"),
          py::arg("theta"));
    m.def("density_current", &density_current, py::arg("psi"), py::arg("params"),
          py::arg("effective") = false);
    m.def("continuity_residual", &continuity_residual, py::arg("trajectory"),
          py::arg("params"), py::arg("mode"));
    m.def("theta_nonlinear_term", &theta_nonlinear_term);
    m.def("quasi_hj_phase", &quasi_hj_phase, py::arg("psi"), py::arg("hbar") = 1.0);

    // measurement chain
    py::enum_<QMode>(m, "QMode")
        .value("full", QMode::full)
        .value("nonlinear_dominant", QMode::nonlinear_dominant);

    py::class_<PointerBin>(m, "PointerBin")
        .def(py::init<double, double>(), py::arg("x_lo"), py::arg("x_hi"))
        .def_readwrite("x_lo", &PointerBin::x_lo)
        .def_readwrite("x_hi", &PointerBin::x_hi);

    py::class_<PointerModel>(m, "PointerModel")
        .def(py::init<>())
        .def_readwrite("bins", &PointerModel::bins)
        .def_readwrite("apparatus_psi", &PointerModel::apparatus_psi)
        .def_readwrite("m1", &PointerModel::m1)
        .def_readwrite("m2", &PointerModel::m2)
        .def_readwrite("gamma", &PointerModel::gamma)
        .def("validate", &PointerModel::validate)
        .def_static("default_bins", &PointerModel::default_bins);

    py::class_<OverlapResult>(m, "OverlapResult")
        .def_readonly("weights", &OverlapResult::weights)
        .def_readonly("raw_weights", &OverlapResult::raw_weights)
        .def_readonly("midpoint", &OverlapResult::midpoint)
        .def_readonly("residual", &OverlapResult::residual);

    py::class_<CompositeState>(m, "CompositeState")
        .def(py::init<SuperpositionState, PointerModel, std::vector<double>>(),
             py::arg("system_amplitudes"), py::arg("pointer"), py::arg("phase_field"))
        .def_static("from_apparatus", &CompositeState::from_apparatus)
        .def_readonly("system_amplitudes", &CompositeState::system_amplitudes)
        .def_readonly("pointer", &CompositeState::pointer)
        .def_readonly("phase_field", &CompositeState::phase_field);

    py::class_<MeasurementOutcome>(m, "MeasurementOutcome")
        .def_readonly("winner", &MeasurementOutcome::winner)
        .def_readonly("collapse_time_scale", &MeasurementOutcome::collapse_time_scale)
        .def_readonly("sampled_Q", &MeasurementOutcome::sampled_Q)
        .def_readonly("trajectory", &MeasurementOutcome::trajectory);

    py::class_<PartialMeasurementResult>(m, "PartialMeasurementResult")
        .def_readonly("coefficients", &PartialMeasurementResult::coefficients)
        .def_readonly("norm", &PartialMeasurementResult::norm)
        .def_readonly("closed_form_amplitudes",
                      &PartialMeasurementResult::closed_form_amplitudes)
        .def_readonly("winner", &PartialMeasurementResult::winner);

    py::class_<SequentialResult>(m, "SequentialResult")
        .def_readonly("outcome_frequencies", &SequentialResult::outcome_frequencies)
        .def_readonly("repeat_probability", &SequentialResult::repeat_probability)
        .def_readonly("trials", &SequentialResult::trials);

    m.def("pointer_overlap", &pointer_overlap);
    m.def("compute_Q", &compute_Q, py::arg("phase_field"), py::arg("psi"),
          py::arg("gamma"), py::arg("m1"), py::arg("hbar"), py::arg("x_n"),
          py::arg("mode"));
    m.def("evolve_populations", &evolve_populations);
    m.def("run_measurement", &run_measurement, py::arg("composite"), py::arg("rng"),
          py::arg("sampling"));
    m.def("partial_measurement", &partial_measurement, py::arg("composite"),
          py::arg("Q"), py::arg("gamma"), py::arg("t"), py::arg("winner"));
    m.def("sequential_measurement_discriminator",
          &sequential_measurement_discriminator, py::arg("composite"),
          py::arg("t_partial"), py::arg("master_seed"), py::arg("trials"),
          py::arg("sampling") = Sampling::born_distribution,
          py::arg("t_in_collapse_units") = false);
    m.def("composite_from_weights", &composite_from_weights, py::arg("weights"),
          py::arg("gamma") = 0.5);
    m.def("theta_calibration", &theta_calibration);

    // lifetime estimates
    py::class_<ObjectSpec>(m, "ObjectSpec")
        .def(py::init<>())
        .def_readwrite("n_atoms", &ObjectSpec::n_atoms)
        .def_readwrite("atomic_length", &ObjectSpec::atomic_length)
        .def_readwrite("linear_size", &ObjectSpec::linear_size)
        .def_readwrite("mass", &ObjectSpec::mass)
        .def("size", &ObjectSpec::size)
        .def("total_mass", &ObjectSpec::total_mass);

    py::class_<LifetimePrediction>(m, "LifetimePrediction")
        .def_readonly("name", &LifetimePrediction::name)
        .def_readonly("spec", &LifetimePrediction::spec)
        .def_readonly("formula", &LifetimePrediction::formula)
        .def_readonly("tau", &LifetimePrediction::tau)
        .def_readonly("tier", &LifetimePrediction::tier)
        .def_readonly("quoted_prediction", &LifetimePrediction::quoted_prediction);

    m.def("tau_general", &tau_general);
    m.def("tau_apparatus", &tau_apparatus, py::arg("L"),
          py::arg("constants") = PhysicalConstants{});
    m.def("tau_mesoscopic", &tau_mesoscopic, py::arg("spec"),
          py::arg("constants") = PhysicalConstants{});
    m.def("tau_planck_regime", &tau_planck_regime, py::arg("spec"),
          py::arg("constants") = PhysicalConstants{});
    m.def("log10_tier", &log10_tier);
    m.def("experiment_presets", &experiment_presets,
          py::arg("constants") = PhysicalConstants{});

    // ensemble statistics
    py::enum_<BornEngine>(m, "BornEngine")
        .value("grigorenko", BornEngine::grigorenko)
        .value("measurement", BornEngine::measurement);

    py::class_<EnsembleConfig>(m, "EnsembleConfig")
        .def(py::init<>())
        .def_readwrite("trials", &EnsembleConfig::trials)
        .def_readwrite("master_seed", &EnsembleConfig::master_seed)
        .def_readwrite("parallelism", &EnsembleConfig::parallelism);

    py::class_<BornTestReport>(m, "BornTestReport")
        .def_readonly("expected", &BornTestReport::expected)
        .def_readonly("observed_counts", &BornTestReport::observed_counts)
        .def_readonly("chi_square", &BornTestReport::chi_square)
        .def_readonly("p_value", &BornTestReport::p_value)
        .def_readonly("passed", &BornTestReport::pass)
        .def_readonly("trials", &BornTestReport::trials)
        .def_readonly("bins_merged", &BornTestReport::bins_merged)
        .def_readonly("merge_map", &BornTestReport::merge_map);

    py::class_<KsResult>(m, "KsResult")
        .def_readonly("statistic", &KsResult::statistic)
        .def_readonly("p_value", &KsResult::p_value)
        .def_readonly("passed", &KsResult::pass);

    m.def("gamma_q", &gamma_q);
    m.def("chi_square_p_value", &chi_square_p_value);
    m.def("chi_square_gof", &chi_square_gof);
    m.def("chi_square_two_sample_p", &chi_square_two_sample_p);
    m.def("ks_test_exp_u",
          [](std::vector<double> samples) { return ks_test(std::move(samples), exp_u_cdf); },
          "KS test of u samples against the e^u law");
    m.def("run_born_ensemble", &run_born_ensemble, py::arg("state"), py::arg("config"),
          py::arg("engine"), py::arg("sampling") = Sampling::born_distribution,
          py::arg("gamma") = 1.0);
    m.def("tally_winners", &tally_winners, py::arg("state"), py::arg("config"),
          py::arg("sampling"), py::arg("gamma") = 1.0);
    m.def("tally_winners_uniform_q", &tally_winners_uniform_q);

    // exports
    m.def("trajectory_csv", &trajectory_csv);
    m.def("snapshot_csv", &snapshot_csv);
    m.def("born_report_json", &born_report_json);
    m.def("lifetime_table_json", &lifetime_table_json);
}
