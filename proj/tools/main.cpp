#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "nqlab/export.hpp"
#include "nqlab/grigorenko.hpp"
#include "nqlab/lifetime.hpp"
#include "nqlab/measurement.hpp"
#include "nqlab/ode.hpp"
#include "nqlab/pde.hpp"
#include "nqlab/stats.hpp"

using json = nlohmann::json;
using namespace nqlab;

namespace {

constexpr const char* kVersion = "0.1.0";

const std::vector<std::string> kConstantKeys = {
    "constants.hbar", "constants.c", "constants.G", "constants.m_atom"};

const std::map<std::string, std::vector<std::string>> kValidKeys = {
    {"collapse", {"weights", "q", "sampling", "gamma", "t_max", "dt"}},
    {"born-test", {"weights", "trials", "engine", "sampling", "parallelism"}},
    {"pde-run",
     {"engine", "grid_n", "dx", "x0", "dt", "theta", "D", "mass", "initial",
      "initial_csv", "center", "sigma0", "k0", "mode", "t_max", "snapshot_every",
      "boundary"}},
    {"measure",
     {"weights", "apparatus_csv", "bins", "gamma", "sampling", "trials",
      "t_partial"}},
    {"lifetime", {"N", "a", "L", "formula"}},
    {"presets", {}},
};

struct RunConfig {
    std::string command;
    std::map<std::string, std::string> params;
    std::uint64_t seed = 0;
    std::string out = "nqlab_out";
    std::string format = "csv";
};

class Validator {
  public:
    void fail(const std::string& msg) { errors_.push_back(msg); }
    bool ok() const { return errors_.empty(); }
    void report() const {
        for (const auto& e : errors_) std::cerr << "error: " << e << "\n";
    }

  private:
    std::vector<std::string> errors_;
};

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

void parse_kv_line(const std::string& line, std::map<std::string, std::string>& out,
                   Validator& v, const std::string& origin) {
    std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') return;
    auto eq = stripped.find('=');
    if (eq == std::string::npos) {
        v.fail(origin + ": expected key=value, got '" + stripped + "'");
        return;
    }
    std::string key = trim(stripped.substr(0, eq));
    std::string val = trim(stripped.substr(eq + 1));
    if (key.empty()) {
        v.fail(origin + ": empty key in '" + stripped + "'");
        return;
    }
    out[key] = val;
}

void check_keys(const RunConfig& cfg, Validator& v) {
    const auto& valid = kValidKeys.at(cfg.command);
    std::set<std::string> allowed(valid.begin(), valid.end());
    allowed.insert(kConstantKeys.begin(), kConstantKeys.end());
    std::vector<std::string> unknown;
    for (const auto& [k, _] : cfg.params)
        if (!allowed.count(k)) unknown.push_back(k);
    if (unknown.empty()) return;
    std::ostringstream msg;
    for (const auto& k : unknown) {
        msg.str("");
        msg << "unknown key '" << k << "' for command '" << cfg.command
            << "'; valid keys:";
        for (const auto& a : valid) msg << " " << a;
        for (const auto& a : kConstantKeys) msg << " " << a;
        v.fail(msg.str());
    }
}

bool has(const RunConfig& cfg, const std::string& key) {
    return cfg.params.count(key) > 0;
}

std::string get(const RunConfig& cfg, const std::string& key,
                const std::string& fallback = "") {
    auto it = cfg.params.find(key);
    return it == cfg.params.end() ? fallback : it->second;
}

double get_double(const RunConfig& cfg, const std::string& key, double fallback,
                  Validator& v) {
    auto it = cfg.params.find(key);
    if (it == cfg.params.end()) return fallback;
    try {
        std::size_t pos = 0;
        double val = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing text");
        return val;
    } catch (const std::exception&) {
        v.fail("key '" + key + "': cannot parse '" + it->second + "' as a number");
        return fallback;
    }
}

std::size_t get_size(const RunConfig& cfg, const std::string& key,
                     std::size_t fallback, Validator& v) {
    double d = get_double(cfg, key, static_cast<double>(fallback), v);
    if (d < 0.0 || d != std::floor(d)) {
        v.fail("key '" + key + "': expected a non-negative integer");
        return fallback;
    }
    return static_cast<std::size_t>(d);
}

std::vector<double> get_list(const RunConfig& cfg, const std::string& key,
                             Validator& v) {
    std::vector<double> out;
    auto it = cfg.params.find(key);
    if (it == cfg.params.end()) return out;
    std::stringstream ss(it->second);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            out.push_back(std::stod(trim(tok)));
        } catch (const std::exception&) {
            v.fail("key '" + key + "': cannot parse list element '" + tok + "'");
        }
    }
    if (out.empty()) v.fail("key '" + key + "': empty list");
    return out;
}

PhysicalConstants constants_from(const RunConfig& cfg, Validator& v) {
    PhysicalConstants k;
    k.hbar = get_double(cfg, "constants.hbar", k.hbar, v);
    k.c = get_double(cfg, "constants.c", k.c, v);
    k.G = get_double(cfg, "constants.G", k.G, v);
    k.m_atom = get_double(cfg, "constants.m_atom", k.m_atom, v);
    return k;
}

struct RunArtifacts {
    std::vector<std::string> outputs;
};

void write_manifest(const RunConfig& cfg, const RunArtifacts& art,
                    double wall_seconds) {
    json m;
    m["command"] = cfg.command;
    m["parameters"] = json::object();
    for (const auto& [k, val] : cfg.params) m["parameters"][k] = val;
    m["seed"] = cfg.seed;
    m["format"] = cfg.format;
    m["version"] = kVersion;
    m["wall_time_s"] = wall_seconds;
    m["outputs"] = art.outputs;
    write_file(cfg.out + ".manifest.json", m.dump(2) + "\n");
}

void write_plot_sidecar(const RunConfig& cfg, const std::string& data_file,
                        const std::string& x_label, const std::string& y_label,
                        const std::vector<std::string>& series) {
    json p;
    p["data"] = data_file;
    p["x_label"] = x_label;
    p["y_label"] = y_label;
    p["series"] = series;
    write_file(cfg.out + ".plot.json", p.dump(2) + "\n");
}

// ---- collapse -------------------------------------------------------------

int run_collapse(const RunConfig& cfg, RunArtifacts& art) {
    Validator v;
    auto weights = get_list(cfg, "weights", v);
    double gamma = get_double(cfg, "gamma", 1.0, v);
    double t_max = get_double(cfg, "t_max", 1.0, v);
    double dt = get_double(cfg, "dt", t_max / 100.0, v);
    std::string sampling_name = get(cfg, "sampling", "born");
    bool explicit_q = has(cfg, "q");
    std::vector<double> q;
    if (explicit_q) q = get_list(cfg, "q", v);

    if (!has(cfg, "weights")) v.fail("collapse: key 'weights' is required");
    if (!(t_max > 0.0)) v.fail("collapse: t_max must be positive");
    if (!(dt > 0.0) || dt > t_max) v.fail("collapse: dt must be in (0, t_max]");
    if (gamma < 0.0) v.fail("collapse: gamma must be non-negative");
    if (explicit_q && q.size() != weights.size())
        v.fail("collapse: q list length must match weights");
    if (sampling_name != "born" && sampling_name != "phase")
        v.fail("collapse: sampling must be 'born' or 'phase'");
    if (!v.ok()) {
        v.report();
        return 2;
    }

    auto state = SuperpositionState::from_weights(weights);
    CollapseParams params;
    params.gamma = gamma;
    if (explicit_q) {
        params.q = q;
    } else {
        RngStream rng(cfg.seed, 0);
        if (sampling_name == "born") {
            params.q = sample_q_born(state.populations(), rng);
        } else {
            auto pops = state.populations();
            params.q.resize(pops.size());
            for (std::size_t i = 0; i < pops.size(); ++i)
                params.q[i] = pops[i] > 0.0
                                  ? sample_u_phase(rng) / pops[i]
                                  : -std::numeric_limits<double>::infinity();
        }
    }

    CollapseTrajectory traj;
    auto n_steps = static_cast<std::size_t>(std::llround(t_max / dt));
    for (std::size_t s = 0; s <= n_steps; ++s) {
        double t = std::min(t_max, dt * static_cast<double>(s));
        traj.times.push_back(t);
        traj.populations.push_back(
            evolve_closed_form(state, params, t).populations());
    }
    traj.winner = argmax_winner(params.q, state.populations());

    if (cfg.format == "csv") {
        std::string file = cfg.out + ".csv";
        write_file(file, trajectory_csv(traj));
        art.outputs.push_back(file);
        std::vector<std::string> series;
        for (std::size_t i = 0; i < state.size(); ++i)
            series.push_back("pop_" + std::to_string(i + 1));
        write_plot_sidecar(cfg, file, "t", "population", series);
    } else {
        json j;
        j["times"] = traj.times;
        j["populations"] = traj.populations;
        j["q"] = json::array();
        for (double qi : params.q)
            j["q"].push_back(std::isfinite(qi) ? json(qi) : json(nullptr));
        j["gamma"] = gamma;
        j["winner"] = *traj.winner;
        std::string file = cfg.out + ".json";
        write_file(file, j.dump(2) + "\n");
        art.outputs.push_back(file);
    }
    return 0;
}

// ---- born-test ------------------------------------------------------------

int run_born_test(const RunConfig& cfg, RunArtifacts& art) {
    Validator v;
    auto weights = get_list(cfg, "weights", v);
    std::size_t trials = get_size(cfg, "trials", 0, v);
    std::string engine_name = get(cfg, "engine", "grigorenko");
    std::string sampling_name = get(cfg, "sampling", "born");
    std::size_t parallelism = get_size(cfg, "parallelism", 1, v);

    if (!has(cfg, "weights")) v.fail("born-test: key 'weights' is required");
    if (!has(cfg, "trials") || trials == 0)
        v.fail("born-test: key 'trials' is required and must be positive");
    if (engine_name != "grigorenko" && engine_name != "measurement")
        v.fail("born-test: engine must be 'grigorenko' or 'measurement'");
    if (sampling_name != "born" && sampling_name != "phase")
        v.fail("born-test: sampling must be 'born' or 'phase'");
    if (!v.ok()) {
        v.report();
        return 2;
    }

    auto state = SuperpositionState::from_weights(weights);
    EnsembleConfig ecfg;
    ecfg.trials = trials;
    ecfg.master_seed = cfg.seed;
    ecfg.parallelism = static_cast<unsigned>(std::max<std::size_t>(1, parallelism));
    auto engine = engine_name == "grigorenko" ? BornEngine::grigorenko
                                              : BornEngine::measurement;
    auto sampling = sampling_name == "born" ? Sampling::born_distribution
                                            : Sampling::phase_mechanism;
    auto rep = run_born_ensemble(state, ecfg, engine, sampling);

    if (cfg.format == "csv") {
        std::string file = cfg.out + ".csv";
        write_file(file, born_counts_csv(rep));
        art.outputs.push_back(file);
        write_plot_sidecar(cfg, file, "state_index", "count",
                           {"expected", "observed"});
    } else {
        std::string file = cfg.out + ".json";
        write_file(file, born_report_json(rep));
        art.outputs.push_back(file);
    }
    return rep.pass ? 0 : 0;  // a failed GOF is a result, not an error
}

// ---- pde-run --------------------------------------------------------------

GridWavefunction initial_from_csv(const std::string& path, Validator& v) {
    std::ifstream in(path);
    if (!in) {
        v.fail("pde-run: cannot open initial_csv '" + path + "'");
        return {};
    }
    GridWavefunction g;
    std::string line;
    std::getline(in, line);  // header x,re_psi,im_psi
    std::vector<double> xs;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        std::stringstream ss(line);
        std::string a, b, c;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') ||
            !std::getline(ss, c, ',')) {
            v.fail("pde-run: malformed row in initial_csv: '" + line + "'");
            return {};
        }
        try {
            xs.push_back(std::stod(a));
            g.values.emplace_back(std::stod(b), std::stod(c));
        } catch (const std::exception&) {
            v.fail("pde-run: non-numeric row in initial_csv: '" + line + "'");
            return {};
        }
    }
    if (xs.size() < 16) {
        v.fail("pde-run: initial_csv needs at least 16 rows");
        return {};
    }
    g.x0 = xs.front();
    g.dx = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
    return g;
}

int run_pde(const RunConfig& cfg, RunArtifacts& art) {
    Validator v;
    std::string engine_name = get(cfg, "engine", "");
    std::string initial = get(cfg, "initial", "gaussian");
    std::size_t grid_n = get_size(cfg, "grid_n", 256, v);
    double dx = get_double(cfg, "dx", 0.0625, v);
    double x0 = get_double(cfg, "x0",
                           -0.5 * dx * static_cast<double>(grid_n), v);
    double dt = get_double(cfg, "dt", 0.0, v);
    double theta = get_double(cfg, "theta", 1.0, v);
    double D = get_double(cfg, "D", 0.0, v);
    double mass = get_double(cfg, "mass", 1.0, v);
    double t_max = get_double(cfg, "t_max", 0.0, v);
    double snapshot_every = get_double(cfg, "snapshot_every", 0.0, v);
    std::string boundary_name = get(cfg, "boundary", "periodic");

    PdeEngine engine{};
    if (engine_name == "linear")
        engine = PdeEngine::linear;
    else if (engine_name == "dg")
        engine = PdeEngine::doebner_goldin;
    else if (engine_name == "theta")
        engine = PdeEngine::nonlinear_theta;
    else
        v.fail("pde-run: engine must be one of linear, dg, theta");

    if (!(t_max > 0.0)) v.fail("pde-run: t_max must be positive");
    if (!(snapshot_every > 0.0) || snapshot_every > t_max)
        v.fail("pde-run: snapshot_every must be in (0, t_max]");
    if (initial != "gaussian" && initial != "plane_wave" && initial != "custom_csv")
        v.fail("pde-run: initial must be one of gaussian, plane_wave, custom_csv");
    if (initial == "custom_csv" && !has(cfg, "initial_csv"))
        v.fail("pde-run: initial=custom_csv requires key 'initial_csv'");
    if (boundary_name != "periodic" && boundary_name != "absorbing")
        v.fail("pde-run: boundary must be 'periodic' or 'absorbing'");

    GridWavefunction psi;
    if (v.ok()) {
        if (initial == "gaussian") {
            double center = get_double(cfg, "center", 0.0, v);
            double sigma0 = get_double(cfg, "sigma0", 1.0, v);
            double k0 = get_double(cfg, "k0", 0.0, v);
            psi = make_gaussian(grid_n, x0, dx, center, sigma0, k0);
        } else if (initial == "plane_wave") {
            auto mode = static_cast<int>(get_size(cfg, "mode", 1, v));
            psi = make_plane_wave(grid_n, x0, dx, mode);
        } else {
            psi = initial_from_csv(get(cfg, "initial_csv"), v);
        }
    }
    if (!v.ok()) {
        v.report();
        return 2;
    }
    psi.boundary =
        boundary_name == "periodic" ? Boundary::periodic : Boundary::absorbing;

    PDEParams params;
    params.mass = mass;
    params.theta = theta;
    params.diffusion_D = D;
    params.dt = dt;

    auto n_snapshots =
        static_cast<std::size_t>(std::llround(t_max / snapshot_every)) + 1;
    auto traj = evolve_snapshots(engine, psi, params, t_max, n_snapshots);

    bool effective_current = engine == PdeEngine::nonlinear_theta;
    std::vector<std::string> files;
    for (std::size_t s = 0; s < traj.size(); ++s) {
        auto dc = density_current(traj[s].psi, params, effective_current);
        char suffix[32];
        std::snprintf(suffix, sizeof suffix, "_snap%03zu.csv", s);
        std::string file = cfg.out + suffix;
        write_file(file, snapshot_csv(traj[s].psi, dc));
        files.push_back(file);
        art.outputs.push_back(file);
    }

    json run;
    run["grid"] = {{"n", grid_n}, {"x0", psi.x0}, {"dx", psi.dx},
                   {"boundary", boundary_name}};
    run["params"] = {{"engine", engine_name}, {"mass", mass}, {"theta", theta},
                     {"D", D},                {"dt", dt},     {"t_max", t_max}};
    run["times"] = json::array();
    for (const auto& s : traj) run["times"].push_back(s.t);
    if (traj.size() >= 3) {
        ContinuityMode mode = engine == PdeEngine::doebner_goldin
                                  ? ContinuityMode::fokker_planck
                                  : engine == PdeEngine::nonlinear_theta
                                        ? ContinuityMode::effective
                                        : ContinuityMode::standard;
        auto rep = continuity_residual(traj, params, mode);
        run["residual"] = {{"max_norm", rep.max_norm}, {"l2_norm", rep.l2_norm}};
    }
    std::string run_file = cfg.out + ".run.json";
    write_file(run_file, run.dump(2) + "\n");
    art.outputs.push_back(run_file);
    write_plot_sidecar(cfg, files.back(), "x", "rho", {"rho", "j"});
    return 0;
}

// ---- measure --------------------------------------------------------------

int run_measure(const RunConfig& cfg, RunArtifacts& art) {
    Validator v;
    double gamma = get_double(cfg, "gamma", 0.5, v);
    std::string sampling_name = get(cfg, "sampling", "born");
    std::size_t trials = get_size(cfg, "trials", 1, v);
    double t_partial = get_double(cfg, "t_partial", 0.0, v);

    bool from_weights = has(cfg, "weights");
    bool from_csv = has(cfg, "apparatus_csv");
    if (from_weights == from_csv)
        v.fail("measure: exactly one of 'weights' or 'apparatus_csv' is required");
    if (sampling_name != "born" && sampling_name != "phase")
        v.fail("measure: sampling must be 'born' or 'phase'");
    if (trials == 0) v.fail("measure: trials must be positive");
    if (t_partial < 0.0) v.fail("measure: t_partial must be non-negative");
    if (gamma < 0.0 || gamma >= 1.0) v.fail("measure: gamma must be in [0, 1)");

    std::vector<double> weights;
    GridWavefunction apparatus;
    if (from_weights) weights = get_list(cfg, "weights", v);
    if (from_csv) {
        apparatus = initial_from_csv(get(cfg, "apparatus_csv"), v);
        if (!has(cfg, "bins"))
            v.fail("measure: apparatus_csv requires key 'bins'");
    }
    std::size_t bins = get_size(cfg, "bins", 0, v);
    if (!v.ok()) {
        v.report();
        return 2;
    }

    auto sampling = sampling_name == "born" ? Sampling::born_distribution
                                            : Sampling::phase_mechanism;
    CompositeState composite = [&]() {
        if (from_weights) return composite_from_weights(weights, gamma);
        PointerModel pm;
        pm.apparatus_psi = apparatus;
        pm.bins = PointerModel::default_bins(apparatus, bins);
        pm.gamma = gamma;
        std::vector<double> phase(apparatus.size(), 0.0);
        return CompositeState::from_apparatus(std::move(pm), std::move(phase));
    }();

    if (trials == 1) {
        RngStream rng(cfg.seed, 0);
        auto outcome = run_measurement(composite, rng, sampling);
        std::string file = cfg.out + ".json";
        write_file(file, measurement_record_json(outcome, sampling, cfg.seed));
        art.outputs.push_back(file);
        if (cfg.format == "csv") {
            std::string tfile = cfg.out + ".csv";
            write_file(tfile, trajectory_csv(outcome.trajectory));
            art.outputs.push_back(tfile);
            std::vector<std::string> series;
            for (std::size_t i = 0; i < outcome.sampled_Q.size(); ++i)
                series.push_back("pop_" + std::to_string(i + 1));
            write_plot_sidecar(cfg, tfile, "t", "population", series);
        }
        return 0;
    }

    auto seq = sequential_measurement_discriminator(composite, t_partial,
                                                    cfg.seed, trials, sampling);
    json j;
    j["t_partial"] = t_partial;
    j["trials"] = seq.trials;
    j["repeat_probability"] = seq.repeat_probability;
    j["outcome_frequencies"] = seq.outcome_frequencies;
    j["sampling"] = sampling_name;
    j["seed"] = cfg.seed;
    std::string file = cfg.out + ".json";
    write_file(file, j.dump(2) + "\n");
    art.outputs.push_back(file);
    if (cfg.format == "csv") {
        std::ostringstream csv;
        csv << "state_index,frequency\n";
        for (std::size_t i = 0; i < seq.outcome_frequencies.size(); ++i) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i,
                          seq.outcome_frequencies[i]);
            csv << buf;
        }
        std::string cfile = cfg.out + ".csv";
        write_file(cfile, csv.str());
        art.outputs.push_back(cfile);
        write_plot_sidecar(cfg, cfile, "state_index", "frequency", {"frequency"});
    }
    return 0;
}

// ---- lifetime / presets ---------------------------------------------------

int run_lifetime(const RunConfig& cfg, RunArtifacts& art) {
    Validator v;
    PhysicalConstants k = constants_from(cfg, v);
    double n_atoms = get_double(cfg, "N", 0.0, v);
    double a = get_double(cfg, "a", 1e-10, v);
    std::string formula = get(cfg, "formula", "mesoscopic");

    if (!has(cfg, "N") && formula != "apparatus")
        v.fail("lifetime: key 'N' is required");
    if (formula != "mesoscopic" && formula != "planck" && formula != "apparatus")
        v.fail("lifetime: formula must be one of mesoscopic, planck, apparatus");
    if (formula == "apparatus" && !has(cfg, "L"))
        v.fail("lifetime: formula=apparatus requires key 'L'");
    if (!v.ok()) {
        v.report();
        return 2;
    }

    ObjectSpec spec;
    spec.n_atoms = has(cfg, "N") ? n_atoms : 1.0;
    spec.atomic_length = a;
    if (has(cfg, "L")) spec.linear_size = get_double(cfg, "L", 0.0, v);

    double tau = 0.0;
    if (formula == "mesoscopic")
        tau = tau_mesoscopic(spec, k);
    else if (formula == "planck")
        tau = tau_planck_regime(spec, k);
    else
        tau = tau_apparatus(*spec.linear_size, k);

    std::vector<LifetimePrediction> rows = {
        {"custom", spec, formula, tau, log10_tier(tau), ""}};
    std::string file = cfg.out + (cfg.format == "csv" ? ".csv" : ".json");
    write_file(file, cfg.format == "csv" ? lifetime_table_csv(rows)
                                         : lifetime_table_json(rows));
    art.outputs.push_back(file);
    if (cfg.format == "csv")
        write_plot_sidecar(cfg, file, "N", "tau_s", {"tau_s"});
    return 0;
}

int run_presets(const RunConfig& cfg, RunArtifacts& art) {
    Validator v;
    PhysicalConstants k = constants_from(cfg, v);
    if (!v.ok()) {
        v.report();
        return 2;
    }
    auto rows = experiment_presets(k);
    std::string file = cfg.out + (cfg.format == "csv" ? ".csv" : ".json");
    write_file(file, cfg.format == "csv" ? lifetime_table_csv(rows)
                                         : lifetime_table_json(rows));
    art.outputs.push_back(file);
    if (cfg.format == "csv")
        write_plot_sidecar(cfg, file, "N", "tau_s", {"tau_s"});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for nonlinear collapse dynamics"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::vector<std::string> sets;
    RunConfig cfg;
    app.add_option("--config", config_path, "flat key=value configuration file");
    app.add_option("--seed", cfg.seed, "master RNG seed");
    app.add_option("--out", cfg.out, "output path prefix");
    app.add_option("--format", cfg.format, "output format: csv or json");
    app.add_option("--set", sets, "override: key=value (repeatable)");

    for (const auto& [name, _] : kValidKeys) app.add_subcommand(name);

    CLI11_PARSE(app, argc, argv);
    cfg.command = app.get_subcommands().front()->get_name();

    Validator v;
    if (cfg.format != "csv" && cfg.format != "json")
        v.fail("--format must be 'csv' or 'json'");
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            v.fail("cannot open config file '" + config_path + "'");
        } else {
            std::string line;
            std::size_t ln = 0;
            while (std::getline(in, line))
                parse_kv_line(line, cfg.params, v,
                              config_path + ":" + std::to_string(++ln));
        }
    }
    for (const auto& s : sets) parse_kv_line(s, cfg.params, v, "--set");
    if (v.ok()) check_keys(cfg, v);
    if (!v.ok()) {
        v.report();
        return 2;
    }

    auto t0 = std::chrono::steady_clock::now();
    RunArtifacts art;
    int status = 0;
    try {
        if (cfg.command == "collapse")
            status = run_collapse(cfg, art);
        else if (cfg.command == "born-test")
            status = run_born_test(cfg, art);
        else if (cfg.command == "pde-run")
            status = run_pde(cfg, art);
        else if (cfg.command == "measure")
            status = run_measure(cfg, art);
        else if (cfg.command == "lifetime")
            status = run_lifetime(cfg, art);
        else
            status = run_presets(cfg, art);
    } catch (const StiffnessError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::domain_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    if (status != 0) return status;

    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                      .count();
    write_manifest(cfg, art, wall);
    return 0;
}
