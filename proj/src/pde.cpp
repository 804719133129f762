#include "nqlab/pde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "nqlab/ode.hpp"

namespace nqlab {

namespace {

using cd = std::complex<double>;
using cvec = std::vector<cd>;
constexpr double kTaperEps = 1e-10;

inline std::size_t wrap(std::ptrdiff_t i, std::size_t n) {
    std::ptrdiff_t m = static_cast<std::ptrdiff_t>(n);
    return static_cast<std::size_t>(((i % m) + m) % m);
}

// fourth-order centered stencils, periodic wrap
inline cd d2_4th(const cvec& v, std::size_t i, double inv_dx2) {
    std::size_t n = v.size();
    return (-v[wrap(i + 2, n)] + 16.0 * v[wrap(i + 1, n)] - 30.0 * v[i] +
            16.0 * v[wrap(i - 1, n)] - v[wrap(i - 2, n)]) *
           (inv_dx2 / 12.0);
}

inline cd d1_4th(const cvec& v, std::size_t i, double inv_dx) {
    std::size_t n = v.size();
    return (-v[wrap(i + 2, n)] + 8.0 * v[wrap(i + 1, n)] -
            8.0 * v[wrap(i - 1, n)] + v[wrap(i - 2, n)]) *
           (inv_dx / 12.0);
}

// second-order centered stencils, used by the residual diagnostics
inline double d1_2nd(const std::vector<double>& v, std::size_t i, double inv_dx) {
    std::size_t n = v.size();
    return (v[wrap(i + 1, n)] - v[wrap(i - 1, n)]) * (0.5 * inv_dx);
}

inline double d2_2nd(const std::vector<double>& v, std::size_t i, double inv_dx2) {
    std::size_t n = v.size();
    return (v[wrap(i + 1, n)] - 2.0 * v[i] + v[wrap(i - 1, n)]) * inv_dx2;
}

inline cd d1c_2nd(const cvec& v, std::size_t i, double inv_dx) {
    std::size_t n = v.size();
    return (v[wrap(i + 1, n)] - v[wrap(i - 1, n)]) * (0.5 * inv_dx);
}

double max_abs(const cvec& v) {
    double m = 0.0;
    for (auto& c : v) m = std::max(m, std::abs(c));
    return m;
}

// smooth suppression of the nonlinear term where |psi| is near the floor
inline double taper(double abs_psi, double floor) {
    if (floor <= 0.0) return 1.0;
    double r = abs_psi / floor;
    return r >= 1.0 ? 1.0 : r * r;
}

// psi * d2(log psi)/dx2 via principal-branch logs of neighbor ratios;
// exactly zero on grid plane waves since the log phase is linear in x
cd log_curvature_term(const cvec& v, std::size_t i, double inv_dx2,
                      double floor) {
    std::size_t n = v.size();
    double a = std::abs(v[i]);
    double tp = taper(a, floor);
    if (tp == 0.0 || a == 0.0) return 0.0;
    cd rp = v[wrap(i + 1, n)] / v[i];
    cd rm = v[i] / v[wrap(i - 1, n)];
    if (rp == cd(0.0) || rm == cd(0.0) || std::abs(v[wrap(i - 1, n)]) == 0.0)
        return 0.0;
    cd d2log = (std::log(rp) - std::log(rm)) * inv_dx2;
    return tp * d2log * v[i];
}

void check_degenerate(const cvec& v) {
    double floor = kTaperEps * max_abs(v);
    std::size_t below = 0;
    for (auto& c : v)
        if (std::abs(c) < floor) ++below;
    if (below * 20 > v.size())
        throw std::domain_error(
            "degenerate state: |psi| below floor on more than 5% of the grid");
}

struct AbsorberMask {
    std::vector<double> gamma;  // damping rate per point, 0 in the interior
    AbsorberMask(std::size_t n, double strength) : gamma(n, 0.0) {
        std::size_t ramp = n / 10;
        for (std::size_t k = 0; k < ramp; ++k) {
            double s = 1.0 - static_cast<double>(k) / static_cast<double>(ramp);
            double g = strength * std::pow(std::cos(0.5 * std::numbers::pi * (1.0 - s)), 2);
            gamma[k] = std::max(gamma[k], g);
            gamma[n - 1 - k] = std::max(gamma[n - 1 - k], g);
        }
    }
};

}  // namespace

void GridWavefunction::validate() const {
    if (!(dx > 0.0)) throw std::invalid_argument("GridWavefunction: dx <= 0");
    if (values.size() < 16)
        throw std::invalid_argument("GridWavefunction: fewer than 16 grid points");
    double n2 = norm();
    if (!std::isfinite(n2))
        throw std::invalid_argument("GridWavefunction: non-finite norm");
}

double GridWavefunction::norm() const {
    double s = 0.0;
    for (auto& c : values) s += std::norm(c);
    return s * dx;
}

void GridWavefunction::normalize() {
    double inv = 1.0 / std::sqrt(norm());
    for (auto& c : values) c *= inv;
}

double GridWavefunction::mean_x() const {
    double s = 0.0, w = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        double p = std::norm(values[i]);
        s += p * x(i);
        w += p;
    }
    return s / w;
}

double GridWavefunction::width() const {
    double mu = mean_x();
    double s = 0.0, w = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        double p = std::norm(values[i]);
        double d = x(i) - mu;
        s += p * d * d;
        w += p;
    }
    return std::sqrt(s / w);
}

void PDEParams::validate() const {
    if (!(mass > 0.0)) throw std::invalid_argument("PDEParams: mass <= 0");
    if (!(theta > 0.0) || theta > 1.0)
        throw std::invalid_argument("PDEParams: theta must be in (0, 1]");
    if (!(hbar > 0.0)) throw std::invalid_argument("PDEParams: hbar <= 0");
    if (dt < 0.0) throw std::invalid_argument("PDEParams: dt < 0");
}

GridWavefunction evolve(PdeEngine engine, const GridWavefunction& psi,
                        const PDEParams& params, double t) {
    auto traj = evolve_snapshots(engine, psi, params, t, 2);
    return std::move(traj.back().psi);
}

std::vector<PdeSnapshot> evolve_snapshots(PdeEngine engine,
                                          const GridWavefunction& psi,
                                          const PDEParams& params,
                                          double t_final,
                                          std::size_t n_snapshots) {
    psi.validate();
    params.validate();
    if (t_final < 0.0) throw std::invalid_argument("evolve: t < 0");
    if (n_snapshots < 2) n_snapshots = 2;

    const std::size_t n = psi.size();
    const double inv_dx = 1.0 / psi.dx;
    const double inv_dx2 = inv_dx * inv_dx;
    const double kinetic = params.hbar / (2.0 * params.mass);  // hbar/2m
    const double one_minus_theta = 1.0 - params.theta;
    const double D = params.diffusion_D;
    const bool nonlinear = engine != PdeEngine::linear;

    std::vector<double> pot;
    if (params.potential) {
        pot.resize(n);
        for (std::size_t i = 0; i < n; ++i) pot[i] = params.potential(psi.x(i));
    }

    AbsorberMask mask(n, params.abs_strength);
    const bool absorbing = psi.boundary == Boundary::absorbing;

    auto rhs = [&](double, const cvec& v, cvec& dv) {
        double floor = nonlinear ? kTaperEps * max_abs(v) : 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            cd lap = d2_4th(v, i, inv_dx2);
            cd out;
            switch (engine) {
                case PdeEngine::linear:
                    out = cd(0.0, kinetic) * lap;
                    break;
                case PdeEngine::doebner_goldin: {
                    out = cd(0.0, kinetic) * lap;
                    if (D != 0.0) {
                        double a2 = std::norm(v[i]);
                        double tp = taper(std::abs(v[i]), floor);
                        cd grad = d1_4th(v, i, inv_dx);
                        cd nl = a2 > 0.0 ? cd(std::norm(grad) / a2) * v[i] : cd(0.0);
                        out += D * (lap + tp * nl);
                    }
                    break;
                }
                case PdeEngine::nonlinear_theta: {
                    cd nl = one_minus_theta != 0.0
                                ? one_minus_theta * log_curvature_term(v, i, inv_dx2, floor)
                                : cd(0.0);
                    out = cd(0.0, kinetic) * (lap - nl);
                    break;
                }
            }
            if (!pot.empty()) out -= cd(0.0, pot[i] / params.hbar) * v[i];
            if (absorbing) out -= mask.gamma[i] * v[i];
            dv[i] = out;
        }
    };

    const double dt_bound = params.mass * psi.dx * psi.dx / params.hbar;
    double dt_max = params.dt > 0.0 ? std::min(params.dt, dt_bound) : dt_bound;

    std::vector<PdeSnapshot> traj;
    traj.push_back({0.0, psi});
    if (t_final == 0.0) {
        traj.push_back({0.0, psi});
        return traj;
    }

    double norm0 = psi.norm();
    cvec state = psi.values;
    OdeOptions opt;
    opt.abs_tol = 1e-11;
    opt.rel_tol = 1e-11;
    opt.dt_max = dt_max;
    opt.dt_initial = dt_max;

    for (std::size_t k = 1; k < n_snapshots; ++k) {
        if (nonlinear) check_degenerate(state);
        double t0 = t_final * static_cast<double>(k - 1) /
                    static_cast<double>(n_snapshots - 1);
        double t1 = t_final * static_cast<double>(k) /
                    static_cast<double>(n_snapshots - 1);
        state = integrate_rk45(rhs, std::move(state), t0, t1, opt);
        GridWavefunction snap = psi;
        snap.values = state;
        if (engine == PdeEngine::linear && !absorbing) {
            if (std::abs(snap.norm() - norm0) > 1e-4 * norm0)
                throw std::runtime_error(
                    "evolve_linear: norm drift exceeds 1e-4, time step unstable");
        }
        traj.push_back({t1, std::move(snap)});
    }
    return traj;
}

GridWavefunction effective_wavefunction(const GridWavefunction& psi,
                                        double theta) {
    psi.validate();
    if (!(theta > 0.0) || theta > 1.0)
        throw std::invalid_argument("effective_wavefunction: theta must be in (0, 1]");
    const std::size_t n = psi.size();
    GridWavefunction out = psi;

    double phase = std::arg(psi.values[0]);
    for (std::size_t i = 0; i < n; ++i) {
        double r = std::abs(psi.values[i]);
        if (r == 0.0)
            throw std::domain_error(
                "effective_wavefunction: zero modulus, complex branch undefined");
        if (i > 0) {
            double jump = std::arg(psi.values[i] / psi.values[i - 1]);
            if (std::abs(jump) > 3.0)
                throw std::runtime_error(
                    "effective_wavefunction: phase unwrap failure (adjacent jump > pi)");
            phase += jump;
        }
        out.values[i] = std::polar(std::exp(std::log(r) / theta), phase / theta);
    }
    return out;
}

DensityCurrent density_current(const GridWavefunction& psi,
                               const PDEParams& params, bool effective) {
    params.validate();
    // theta = 1 makes the effective field the state itself; skip the
    // log/exp reconstruction so the reduction is bitwise exact
    const GridWavefunction field = effective && params.theta != 1.0
                                       ? effective_wavefunction(psi, params.theta)
                                       : psi;
    field.validate();
    const std::size_t n = field.size();
    const double inv_dx = 1.0 / field.dx;
    const double coeff = effective ? params.hbar * params.theta / params.mass
                                   : params.hbar / params.mass;
    DensityCurrent dc;
    dc.rho.resize(n);
    dc.j.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        dc.rho[i] = std::norm(field.values[i]);
        cd grad = d1c_2nd(field.values, i, inv_dx);
        dc.j[i] = coeff * std::imag(std::conj(field.values[i]) * grad);
    }
    return dc;
}

ResidualReport continuity_residual(const std::vector<PdeSnapshot>& traj,
                                   const PDEParams& params,
                                   ContinuityMode mode) {
    if (traj.size() < 3)
        throw std::invalid_argument("continuity_residual: need >= 3 snapshots");
    const std::size_t n = traj.front().psi.size();
    const double dx = traj.front().psi.dx;
    const double dt = traj[1].t - traj[0].t;
    for (std::size_t k = 1; k < traj.size(); ++k) {
        if (traj[k].psi.size() != n || traj[k].psi.dx != dx)
            throw std::invalid_argument("continuity_residual: mismatched grids");
        if (std::abs((traj[k].t - traj[k - 1].t) - dt) > 1e-9 * std::abs(dt))
            throw std::invalid_argument("continuity_residual: nonuniform time spacing");
    }
    const bool effective = mode == ContinuityMode::effective;
    const double inv_dx = 1.0 / dx;
    const double inv_dx2 = inv_dx * inv_dx;

    std::vector<DensityCurrent> dc(traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k)
        dc[k] = density_current(traj[k].psi, params, effective);

    ResidualReport rep;
    const std::size_t mid = traj.size() / 2;
    for (std::size_t k = 1; k + 1 < traj.size(); ++k) {
        std::vector<double> r(n);
        double sum2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double drho_dt = (dc[k + 1].rho[i] - dc[k - 1].rho[i]) / (2.0 * dt);
            double div_j = d1_2nd(dc[k].j, i, inv_dx);
            double res = drho_dt + div_j;
            if (mode == ContinuityMode::fokker_planck)
                res -= params.diffusion_D * d2_2nd(dc[k].rho, i, inv_dx2);
            r[i] = res;
            rep.max_norm = std::max(rep.max_norm, std::abs(res));
            sum2 += res * res;
        }
        rep.l2_norm = std::max(rep.l2_norm, std::sqrt(sum2 * dx));
        if (k == mid || (mid == 0 && k == 1)) rep.field = std::move(r);
    }
    if (rep.field.empty()) rep.field.assign(n, 0.0);
    return rep;
}

std::vector<std::complex<double>> theta_nonlinear_term(
    const GridWavefunction& psi) {
    psi.validate();
    const std::size_t n = psi.size();
    const double inv_dx2 = 1.0 / (psi.dx * psi.dx);
    double floor = kTaperEps * max_abs(psi.values);
    std::vector<cd> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = log_curvature_term(psi.values, i, inv_dx2, floor);
    return out;
}

std::vector<std::complex<double>> quasi_hj_phase(const GridWavefunction& psi,
                                                 double hbar) {
    psi.validate();
    const std::size_t n = psi.size();
    std::vector<cd> out(n);
    double phase = std::arg(psi.values[0]);
    for (std::size_t i = 0; i < n; ++i) {
        double r = std::abs(psi.values[i]);
        if (r == 0.0)
            throw std::domain_error("quasi_hj_phase: zero modulus");
        if (i > 0) phase += std::arg(psi.values[i] / psi.values[i - 1]);
        // S = -i hbar log(psi) = hbar*phase - i hbar ln|psi|
        out[i] = cd(hbar * phase, -hbar * std::log(r));
    }
    return out;
}

GridWavefunction make_gaussian(std::size_t n, double x0, double dx,
                               double center, double sigma0, double k0) {
    GridWavefunction g;
    g.x0 = x0;
    g.dx = dx;
    g.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double x = x0 + dx * static_cast<double>(i);
        double arg = -(x - center) * (x - center) / (4.0 * sigma0 * sigma0);
        g.values[i] = std::polar(std::exp(arg), k0 * x);
    }
    g.normalize();
    return g;
}

GridWavefunction make_plane_wave(std::size_t n, double x0, double dx,
                                 int mode) {
    GridWavefunction g;
    g.x0 = x0;
    g.dx = dx;
    g.values.resize(n);
    double L = dx * static_cast<double>(n);
    double k = 2.0 * std::numbers::pi * static_cast<double>(mode) / L;
    double amp = 1.0 / std::sqrt(L);
    for (std::size_t i = 0; i < n; ++i) {
        double x = x0 + dx * static_cast<double>(i);
        g.values[i] = std::polar(amp, k * x);
    }
    return g;
}

}  // namespace nqlab
