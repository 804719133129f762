#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nqlab {

struct StiffnessError : std::runtime_error {
    double t_fail;
    explicit StiffnessError(double t)
        : std::runtime_error("step size underflow at t = " + std::to_string(t)),
          t_fail(t) {}
};

struct OdeOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    double dt_max = 0.0;        // 0 = unlimited
    double dt_initial = 0.0;    // 0 = auto
    // callback invoked after every accepted step
    std::function<void(double, const std::vector<std::complex<double>>&)> observer;
};

/// Dormand-Prince 5(4) embedded pair with standard step-size control.
/// Integrates dy/dt = f(t, y) for complex state vectors from t0 to t1.
inline std::vector<std::complex<double>> integrate_rk45(
    const std::function<void(double, const std::vector<std::complex<double>>&,
                             std::vector<std::complex<double>>&)>& f,
    std::vector<std::complex<double>> y, double t0, double t1,
    const OdeOptions& opt = {}) {
    using cvec = std::vector<std::complex<double>>;
    if (t1 < t0) throw std::invalid_argument("integrate_rk45: t1 < t0");
    const std::size_t n = y.size();
    if (t1 == t0) {
        if (opt.observer) opt.observer(t0, y);
        return y;
    }

    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                            a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // difference between 5th and embedded 4th order weights
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    cvec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n);

    double t = t0;
    double span = t1 - t0;
    double dt = opt.dt_initial > 0 ? opt.dt_initial : span / 100.0;
    if (opt.dt_max > 0) dt = std::min(dt, opt.dt_max);

    if (opt.observer) opt.observer(t, y);
    f(t, y, k1);
    bool k1_fresh = true;

    while (t < t1) {
        dt = std::min(dt, t1 - t);
        if (dt < 1e-15 * std::max(std::abs(t), std::abs(span)))
            throw StiffnessError(t);
        if (!k1_fresh) { f(t, y, k1); k1_fresh = true; }

        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + dt * (a21 * k1[i]);
        f(t + dt / 5.0, ytmp, k2);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + dt * (a31 * k1[i] + a32 * k2[i]);
        f(t + 3.0 * dt / 10.0, ytmp, k3);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + dt * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        f(t + 4.0 * dt / 5.0, ytmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + dt * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        f(t + 8.0 * dt / 9.0, ytmp, k5);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + dt * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                                   a64 * k4[i] + a65 * k5[i]);
        f(t + dt, ytmp, k6);
        for (std::size_t i = 0; i < n; ++i)
            ynew[i] = y[i] + dt * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] +
                                   b5 * k5[i] + b6 * k6[i]);
        f(t + dt, ynew, k7);

        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            std::complex<double> de =
                dt * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                      e6 * k6[i] + e7 * k7[i]);
            double scale = opt.abs_tol +
                           opt.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err = std::max(err, std::abs(de) / scale);
        }

        if (err <= 1.0) {
            t += dt;
            y.swap(ynew);
            k1.swap(k7);  // FSAL
            k1_fresh = true;
            if (opt.observer) opt.observer(t, y);
        } else {
            k1_fresh = true;  // k1 still valid for same (t, y)
        }
        double factor = 0.9 * std::pow(err > 0 ? err : 1e-10, -0.2);
        dt *= std::clamp(factor, 0.2, 5.0);
        if (opt.dt_max > 0) dt = std::min(dt, opt.dt_max);
    }
    return y;
}

}  // namespace nqlab
