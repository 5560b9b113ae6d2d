#pragma once

// Generating function of the transition table,
//   G(u,v) = sum_{m,n} w_mn u^m v^n = nu^{2j} / (1 - uv nu^2),
//   nu = 2(1-rho) / (1 - rho(u+v) + uv + sqrt([1-rho(u+v)+uv]^2 - 4uv(1-rho)^2)),
// valid for |u|,|v| < 1, plus the adiabatic first-moment ratio (1+rho)/(1-rho)
// and coefficient-extraction consistency checks against direct row sums.

#include <cmath>
#include <complex>
#include <cstdio>
#include <string>
#include <vector>

#include "errors.hpp"
#include "report.hpp"
#include "transitions.hpp"
#include "weight.hpp"

namespace singosc {

namespace detail {

inline void require_genfunc_domain(double absu, double absv, double rho) {
    if (!(absu < 1.0 && absv < 1.0))
        throw validation_error("generating function requires |u| < 1 and |v| < 1");
    if (!(rho >= 0.0 && rho < 1.0))
        throw validation_error("rho must lie in [0, 1)");
}

} // namespace detail

// Principal-branch nu. On the real domain the radicand is strictly positive:
// with s^2 = uv >= 0, A - 2s(1-rho) >= (1-rho)(1-s)^2 > 0, and for uv < 0 the
// radicand is a sum of squares. The throws below are defensive.
inline double nu(double u, double v, double rho) {
    detail::require_genfunc_domain(std::abs(u), std::abs(v), rho);
    const double a = 1.0 - rho * (u + v) + u * v;
    const double d = a * a - 4.0 * u * v * (1.0 - rho) * (1.0 - rho);
    if (d < 0.0)
        throw numerical_error("square-root branch undefined: negative radicand");
    const double n = 2.0 * (1.0 - rho) / (a + std::sqrt(d));
    if (!(n > 0.0) || !(std::abs(u * v * n * n) < 1.0))
        throw numerical_error("branch condition |uv nu^2| < 1 violated");
    return n;
}

// Complex variant. The two roots of the defining quadratic multiply to
// 1/(uv), so taking the larger-modulus denominator keeps |uv nu^2| < 1.
inline std::complex<double> nu(std::complex<double> u, std::complex<double> v,
                               double rho) {
    detail::require_genfunc_domain(std::abs(u), std::abs(v), rho);
    const std::complex<double> a = 1.0 - rho * (u + v) + u * v;
    const std::complex<double> rt =
        std::sqrt(a * a - 4.0 * u * v * (1.0 - rho) * (1.0 - rho));
    const std::complex<double> den =
        std::abs(a + rt) >= std::abs(a - rt) ? a + rt : a - rt;
    if (den == std::complex<double>(0.0, 0.0))
        throw numerical_error("square-root branch undefined: degenerate roots");
    const std::complex<double> n = 2.0 * (1.0 - rho) / den;
    if (!(std::abs(u * v * n * n) < 1.0))
        throw numerical_error("branch condition |uv nu^2| < 1 violated");
    return n;
}

struct GenFuncQuery {
    RepresentationWeight weight{3.0, 1.0};
    double rho = 0.0;
    double u = 0.0;
    double v = 0.0;
};

inline double generating_function(const GenFuncQuery& q) {
    const double n = nu(q.u, q.v, q.rho);
    return std::exp(2.0 * q.weight.j * std::log(n)) / (1.0 - q.u * q.v * n * n);
}

inline std::complex<double> generating_function(const RepresentationWeight& w,
                                                double rho,
                                                std::complex<double> u,
                                                std::complex<double> v) {
    const std::complex<double> n = nu(u, v, rho);
    return std::exp(2.0 * w.j * std::log(n)) / (1.0 - u * v * n * n);
}

// Mean adiabatic-invariant growth <n+j>/(m+j) for any initial level m.
inline double adiabatic_ratio(double rho) {
    if (!(rho >= 0.0 && rho < 1.0))
        throw validation_error("rho must lie in [0, 1)");
    return (1.0 + rho) / (1.0 - rho);
}

namespace detail {

inline wide_float generating_function_wide(const wide_float& u,
                                           const wide_float& v,
                                           const wide_float& rho,
                                           const wide_float& two_j) {
    const wide_float a = 1 - rho * (u + v) + u * v;
    const wide_float d = a * a - 4 * u * v * (1 - rho) * (1 - rho);
    if (d < 0)
        throw numerical_error("square-root branch undefined: negative radicand");
    const wide_float n = 2 * (1 - rho) / (a + sqrt(d));
    return exp(two_j * log(n)) / (1 - u * v * n * n);
}

// m-th u-Taylor coefficient of G(., v) by minimal-width central differences
// (half-integer offsets for odd m) with two Richardson halvings. The samples
// are taken in 50-digit floats: in double the m = 4, 5 extractions bottom
// out near 3e-9 / 3e-8 however the step is tuned, while wide samples let a
// 1e-3 step reach ~1e-18 worst case over |v| <= 0.7, rho <= 0.8.
inline double taylor_coefficient_fd(const RepresentationWeight& w, double rho,
                                    int m, double v) {
    static const std::vector<double> offsets[] = {
        {},
        {0.5, -0.5},
        {1.0, 0.0, -1.0},
        {1.5, 0.5, -0.5, -1.5},
        {2.0, 1.0, 0.0, -1.0, -2.0},
        {2.5, 1.5, 0.5, -0.5, -1.5, -2.5},
    };
    static const std::vector<double> stencil[] = {
        {},
        {1.0, -1.0},
        {1.0, -2.0, 1.0},
        {1.0, -3.0, 3.0, -1.0},
        {1.0, -4.0, 6.0, -4.0, 1.0},
        {1.0, -5.0, 10.0, -10.0, 5.0, -1.0},
    };
    const wide_float wv = v, wrho = rho, two_j = 2.0 * w.j;
    if (m == 0)
        return static_cast<double>(
            generating_function_wide(0, wv, wrho, two_j));

    const wide_float base = wide_float(1) / 1000;
    wide_float diffs[3];
    for (int level = 0; level < 3; ++level) {
        const wide_float h = base / (1 << level);
        wide_float sum = 0;
        for (size_t k = 0; k < offsets[m].size(); ++k)
            sum += stencil[m][k] *
                   generating_function_wide(offsets[m][k] * h, wv, wrho, two_j);
        diffs[level] = sum / pow(h, m);
    }
    // Richardson in h^2, two levels (order 6)
    const wide_float r1a = (4 * diffs[1] - diffs[0]) / 3;
    const wide_float r1b = (4 * diffs[2] - diffs[1]) / 3;
    wide_float result = (16 * r1b - r1a) / 15;
    for (int k = 2; k <= m; ++k) result /= k;
    return static_cast<double>(result);
}

} // namespace detail

// For each v, compares the direct row sum sum_n w_mn v^n against the m-th
// u-Taylor coefficient of G extracted by finite differences at u = 0.
// Coefficient extraction is supported for m <= 5; higher rows should be
// checked by direct summation.
inline CheckReport row_generating_checks(const RepresentationWeight& w,
                                         double rho, int m,
                                         const std::vector<double>& v_samples,
                                         double tol = 1e-9) {
    if (m < 0 || m > 5)
        throw validation_error("coefficient extraction supports rows m <= 5");
    if (!(rho >= 0.0 && rho < 1.0))
        throw validation_error("rho must lie in [0, 1)");
    for (double v : v_samples)
        if (!(std::abs(v) < 1.0))
            throw validation_error("row check samples require |v| < 1");

    const TransitionTable table = build_table(w, rho, m, {1e-12, 0});
    const std::vector<double>& row = table.w[static_cast<size_t>(m)];
    CheckReport report;
    for (double v : v_samples) {
        double direct = 0.0, vp = 1.0;
        for (double wn : row) {
            direct += wn * vp;
            vp *= v;
        }
        const double coeff = detail::taylor_coefficient_fd(w, rho, m, v);
        char name[64];
        std::snprintf(name, sizeof(name), "u_coeff_m%d_v%+0.2f", m, v);
        report.add(name, std::abs(direct - coeff), tol);
    }
    return report;
}

} // namespace singosc
