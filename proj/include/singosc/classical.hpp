#pragma once

// Classical scattering problem xi'' + omega^2(t) xi = 0: frequency profiles
// omega(t) that plateau at omega- / omega+, and the Bogoliubov projection
// that turns one integration into the reflection coefficient rho.
//
// Parametric profiles size their own integration window so that the profile
// has settled to its plateaus within a 1e-8 relative tolerance at both ends;
// rho is then window-independent at that level. A window that cuts into the
// ramp is reported as an error rather than silently producing a
// window-dependent rho.

#include <cmath>
#include <complex>
#include <fstream>
#include <istream>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

// math.h (not just cmath) must precede pchip.hpp: boost 1.74 calls plain
// isnan, which only the global-namespace header provides
#include <math.h>

#include <boost/math/interpolators/pchip.hpp>

#include "errors.hpp"
#include "ode.hpp"

namespace singosc {

enum class ProfileKind { step, tanh_ramp, linear_ramp, gaussian_bump, tabulated };

struct FrequencyProfile {
    ProfileKind kind = ProfileKind::step;
    double omega_minus = 1.0; // left plateau (bump: baseline)
    double omega_plus = 1.0;  // right plateau (bump: baseline)
    double time_scale = 1.0;  // ramp switching scale
    double amplitude = 0.0;   // bump height (signed)
    double width = 1.0;       // bump gaussian width
    double t0 = 0.0, t1 = 0.0;
    double plateau_tol = 1e-8; // relative settling requirement at the ends
    std::vector<double> table_t, table_omega;
    std::shared_ptr<const boost::math::interpolators::pchip<std::vector<double>>>
        table_interp;
};

namespace detail {

inline void require_positive_frequency(double w, const char* which) {
    if (!(w > 0.0))
        throw validation_error(std::string(which) + " frequency must be > 0");
}

} // namespace detail

inline double evaluate_profile(const FrequencyProfile& p, double t) {
    switch (p.kind) {
    case ProfileKind::step:
        return t < 0.0 ? p.omega_minus : p.omega_plus;
    case ProfileKind::tanh_ramp: {
        const double wm2 = p.omega_minus * p.omega_minus;
        const double wp2 = p.omega_plus * p.omega_plus;
        return std::sqrt((wm2 + wp2) / 2.0 +
                         (wp2 - wm2) / 2.0 * std::tanh(t / p.time_scale));
    }
    case ProfileKind::linear_ramp: {
        const double half = p.time_scale / 2.0;
        if (t <= -half) return p.omega_minus;
        if (t >= half) return p.omega_plus;
        return p.omega_minus +
               (p.omega_plus - p.omega_minus) * (t / p.time_scale + 0.5);
    }
    case ProfileKind::gaussian_bump:
        return p.omega_minus +
               p.amplitude * std::exp(-t * t / (2.0 * p.width * p.width));
    case ProfileKind::tabulated:
        if (t < p.table_t.front() || t > p.table_t.back())
            throw validation_error("tabulated profile evaluated outside the table");
        return (*p.table_interp)(t);
    }
    throw validation_error("unknown profile kind");
}

inline FrequencyProfile step_profile(double omega_minus, double omega_plus) {
    detail::require_positive_frequency(omega_minus, "left");
    detail::require_positive_frequency(omega_plus, "right");
    FrequencyProfile p;
    p.kind = ProfileKind::step;
    p.omega_minus = omega_minus;
    p.omega_plus = omega_plus;
    p.t0 = -5.0 / omega_minus;
    p.t1 = 5.0 / omega_plus;
    return p;
}

inline FrequencyProfile tanh_ramp_profile(double omega_minus, double omega_plus,
                                          double time_scale) {
    detail::require_positive_frequency(omega_minus, "left");
    detail::require_positive_frequency(omega_plus, "right");
    if (!(time_scale > 0.0)) throw validation_error("ramp time scale must be > 0");
    FrequencyProfile p;
    p.kind = ProfileKind::tanh_ramp;
    p.omega_minus = omega_minus;
    p.omega_plus = omega_plus;
    p.time_scale = time_scale;
    // |omega - omega_-+| decays like exp(-2|t|/T). The window is sized far
    // tighter than the plateau check: reflection off the truncated tail
    // perturbs rho relatively by ~(end residual)/sqrt(rho), which must stay
    // below the integrator's own accuracy even for strongly suppressed rho.
    constexpr double window_tol = 1e-13;
    const double gap = std::abs(omega_plus * omega_plus - omega_minus * omega_minus);
    const double argl = 2.0 * gap / (window_tol * omega_minus * omega_minus);
    const double argr = 2.0 * gap / (window_tol * omega_plus * omega_plus);
    p.t0 = -(time_scale / 2.0) * std::log(std::max(argl, 1.0)) - time_scale;
    p.t1 = +(time_scale / 2.0) * std::log(std::max(argr, 1.0)) + time_scale;
    return p;
}

inline FrequencyProfile linear_ramp_profile(double omega_minus, double omega_plus,
                                            double time_scale) {
    detail::require_positive_frequency(omega_minus, "left");
    detail::require_positive_frequency(omega_plus, "right");
    if (!(time_scale > 0.0)) throw validation_error("ramp time scale must be > 0");
    FrequencyProfile p;
    p.kind = ProfileKind::linear_ramp;
    p.omega_minus = omega_minus;
    p.omega_plus = omega_plus;
    p.time_scale = time_scale;
    p.t0 = -time_scale / 2.0 - 4.0 / omega_minus;
    p.t1 = +time_scale / 2.0 + 4.0 / omega_plus;
    return p;
}

inline FrequencyProfile gaussian_bump_profile(double omega0, double amplitude,
                                              double width) {
    detail::require_positive_frequency(omega0, "baseline");
    if (!(width > 0.0)) throw validation_error("bump width must be > 0");
    if (!(omega0 + std::min(amplitude, 0.0) > 0.0))
        throw validation_error("bump must keep omega(t) > 0 everywhere");
    FrequencyProfile p;
    p.kind = ProfileKind::gaussian_bump;
    p.omega_minus = omega0;
    p.omega_plus = omega0;
    p.amplitude = amplitude;
    p.width = width;
    constexpr double window_tol = 1e-13; // see tanh_ramp_profile
    const double lnarg = 8.0 * std::abs(amplitude) / (window_tol * omega0);
    const double reach =
        width * std::sqrt(2.0 * std::max(std::log(lnarg), 0.0)) + 2.0 * width;
    p.t0 = -reach;
    p.t1 = +reach;
    return p;
}

inline FrequencyProfile tabulated_profile(std::vector<double> t,
                                          std::vector<double> omega) {
    if (t.size() != omega.size())
        throw validation_error("tabulated profile columns differ in length");
    if (t.size() < 4)
        throw validation_error("tabulated profile needs at least 4 samples");
    for (size_t k = 0; k + 1 < t.size(); ++k)
        if (!(t[k] < t[k + 1]))
            throw validation_error("tabulated profile times must be strictly increasing");
    for (double w : omega)
        if (!(w > 0.0))
            throw validation_error("tabulated profile frequencies must be > 0");
    FrequencyProfile p;
    p.kind = ProfileKind::tabulated;
    p.omega_minus = omega.front();
    p.omega_plus = omega.back();
    p.t0 = t.front();
    p.t1 = t.back();
    p.table_t = t;
    p.table_omega = omega;
    p.table_interp = std::make_shared<
        const boost::math::interpolators::pchip<std::vector<double>>>(
        std::move(t), std::move(omega));
    return p;
}

// Same profile on a caller-chosen window. Shrinking the window into the ramp
// makes compute_rho fail its plateau check, by design.
inline FrequencyProfile with_span(FrequencyProfile p, double t0, double t1) {
    if (!(t0 < t1)) throw validation_error("window must have t0 < t1");
    if (p.kind == ProfileKind::tabulated &&
        (t0 < p.table_t.front() || t1 > p.table_t.back()))
        throw validation_error("window exceeds the tabulated range");
    p.t0 = t0;
    p.t1 = t1;
    return p;
}

inline double sudden_rho(double omega_minus, double omega_plus) {
    detail::require_positive_frequency(omega_minus, "left");
    detail::require_positive_frequency(omega_plus, "right");
    const double r = (omega_plus - omega_minus) / (omega_plus + omega_minus);
    return r * r;
}

struct ReflectionResult {
    double rho = 0.0;
    std::complex<double> c1, c2;      // Bogoliubov coefficients at t1
    double wronskian_drift = 0.0;     // relative conservation error
    double plateau_residual = 0.0;    // max relative |omega - plateau| at ends
    double rho_error_estimate = 0.0;  // from a tolerance-refinement pair
    long steps = 0;
};

namespace detail {

struct Projection {
    std::complex<double> c1, c2;
    double rho, drift;
};

inline Projection project_bogoliubov(const std::array<double, 4>& y, double t1,
                                     double omega_minus, double omega_plus) {
    const std::complex<double> i(0.0, 1.0);
    const std::complex<double> xi(y[0], y[1]);
    const std::complex<double> xip(y[2], y[3]);
    const std::complex<double> c1 =
        std::exp(i * (omega_plus * t1)) * (xi + i * xip / omega_plus) / 2.0;
    const std::complex<double> c2 =
        std::exp(-i * (omega_plus * t1)) * (xi - i * xip / omega_plus) / 2.0;
    const double rho = std::norm(c2) / std::norm(c1);
    // Im(conj(xi) xi') is -omega_minus for these initial conditions
    const double wronskian = y[0] * y[3] - y[1] * y[2];
    const double drift = std::abs(wronskian + omega_minus) / omega_minus;
    return {c1, c2, rho, drift};
}

} // namespace detail

// Integrates the profile across its window from left-plateau initial data
// xi(t0) = exp(-i w- t0), xi'(t0) = -i w- exp(-i w- t0) and projects the
// Bogoliubov pair at t1. Runs the integration twice (second at tolerance/8)
// and reports the refined rho with the pair difference as error estimate.
inline ReflectionResult compute_rho(const FrequencyProfile& p,
                                    double abs_tol = 1e-14,
                                    double rel_tol = 1e-13) {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
        throw validation_error("tolerances must be > 0");

    const double span = p.t1 - p.t0;
    if (!(span > 0.0)) throw validation_error("profile window is empty");
    double plateau_residual = 0.0;
    for (int k = 0; k <= 3; ++k) {
        const double d = 0.002 * span * k;
        plateau_residual = std::max(
            {plateau_residual,
             std::abs(evaluate_profile(p, p.t0 + d) - p.omega_minus) / p.omega_minus,
             std::abs(evaluate_profile(p, p.t1 - d) - p.omega_plus) / p.omega_plus});
    }
    if (plateau_residual > p.plateau_tol)
        throw validation_error(
            "profile has not settled at the window ends; rho would be "
            "window-dependent");

    const auto rhs = [&p](double t, const std::array<double, 4>& y,
                          std::array<double, 4>& dy) {
        const double w = evaluate_profile(p, t);
        const double w2 = w * w;
        dy[0] = y[2];
        dy[1] = y[3];
        dy[2] = -w2 * y[0];
        dy[3] = -w2 * y[1];
    };
    const double phase = p.omega_minus * p.t0;
    const std::array<double, 4> y0 = {std::cos(phase), -std::sin(phase),
                                      -p.omega_minus * std::sin(phase),
                                      -p.omega_minus * std::cos(phase)};

    const auto coarse = integrate_adaptive(rhs, p.t0, p.t1, y0, abs_tol, rel_tol);
    const auto fine =
        integrate_adaptive(rhs, p.t0, p.t1, y0, abs_tol / 8.0, rel_tol / 8.0);
    const auto pc = detail::project_bogoliubov(coarse.y, p.t1, p.omega_minus,
                                               p.omega_plus);
    const auto pf = detail::project_bogoliubov(fine.y, p.t1, p.omega_minus,
                                               p.omega_plus);

    ReflectionResult r;
    r.rho = pf.rho;
    r.c1 = pf.c1;
    r.c2 = pf.c2;
    r.wronskian_drift = pf.drift;
    r.plateau_residual = plateau_residual;
    r.rho_error_estimate = std::abs(pc.rho - pf.rho) + 1e-15 * (1.0 + pf.rho);
    r.steps = fine.steps;
    if (!(r.rho < 1.0))
        throw numerical_error("reflection coefficient reached 1; integration "
                              "inconsistent with flux conservation");
    return r;
}

// Two-column (t, omega) table: comma or whitespace separated, '#' comments
// and an optional single header line allowed.
inline std::pair<std::vector<double>, std::vector<double>>
parse_profile_table(std::istream& in) {
    std::vector<double> t, w;
    std::string line;
    bool first_content = true;
    while (std::getline(in, line)) {
        const auto pos = line.find_first_not_of(" \t\r");
        if (pos == std::string::npos || line[pos] == '#') continue;
        for (char& c : line)
            if (c == ',' || c == ';') c = ' ';
        std::istringstream row(line);
        double a = 0.0, b = 0.0;
        if (row >> a >> b) {
            t.push_back(a);
            w.push_back(b);
            first_content = false;
        } else if (first_content) {
            first_content = false; // header line
        } else {
            throw io_error("malformed profile table row: " + line);
        }
    }
    if (t.empty()) throw io_error("profile table holds no samples");
    return {std::move(t), std::move(w)};
}

inline FrequencyProfile load_profile_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open profile table: " + path);
    auto [t, w] = parse_profile_table(in);
    return tabulated_profile(std::move(t), std::move(w));
}

} // namespace singosc
