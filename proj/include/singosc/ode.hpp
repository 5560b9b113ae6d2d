#pragma once

// Adaptive embedded Runge-Kutta integration (Dormand-Prince 5(4), FSAL).
// The callers' contract is the self-convergence property checked in the
// tests, not this particular tableau.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

#include "errors.hpp"

namespace singosc {

template <std::size_t N>
struct IntegrationResult {
    std::array<double, N> y{};
    long steps = 0;
};

// Integrates y' = rhs(t, y) from t0 to t1 > t0. The error norm is the RMS of
// componentwise errors against atol + rtol * max(|y|, |y_new|).
template <std::size_t N, class Rhs>
IntegrationResult<N> integrate_adaptive(Rhs&& rhs, double t0, double t1,
                                        std::array<double, N> y,
                                        double abs_tol, double rel_tol,
                                        long max_steps = 20000000L) {
    if (!(t1 > t0)) throw validation_error("integration window must have t1 > t0");
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
        throw validation_error("integration tolerances must be > 0");

    using State = std::array<double, N>;
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                     a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                     a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                     b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // difference between the 5th and embedded 4th order weights
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    State k1, k2, k3, k4, k5, k6, k7, ytmp, ynew;
    const auto stage = [&](const State& base, double t, State& k) {
        rhs(t, base, k);
    };
    stage(y, t0, k1);

    double t = t0;
    double h = std::min((t1 - t0) * 1e-4, 1.0);
    long steps = 0;
    while (t < t1) {
        h = std::min(h, t1 - t);
        if (!(h > std::abs(t) * 1e-14 + 1e-290))
            throw numerical_error("integration step size underflow");
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * a21 * k1[i];
        stage(ytmp, t + c2 * h, k2);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        stage(ytmp, t + c3 * h, k3);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        stage(ytmp, t + c4 * h, k4);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] +
                                  a54 * k4[i]);
        stage(ytmp, t + c5 * h, k5);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                                  a64 * k4[i] + a65 * k5[i]);
        stage(ytmp, t + h, k6);
        for (std::size_t i = 0; i < N; ++i)
            ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] +
                                  b5 * k5[i] + b6 * k6[i]);
        stage(ynew, t + h, k7); // FSAL

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                                   e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc =
                abs_tol + rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (ei / sc) * (ei / sc);
        }
        err = std::sqrt(err / N);

        if (err <= 1.0) {
            t += h;
            y = ynew;
            k1 = k7;
        }
        const double factor = std::clamp(
            0.9 * std::pow(std::max(err, 1e-300), -0.2), 0.2, 5.0);
        h *= factor;
        if (++steps > max_steps)
            throw numerical_error("integration exceeded the step budget");
    }
    return {y, steps};
}

} // namespace singosc
