#pragma once

// Transition probabilities w_mn between levels of the singular oscillator,
// parameterized by the classical reflection coefficient rho in [0, 1).
//
// Two deliberately independent evaluation routes are kept side by side:
//   hypergeometric - factorial/gamma prefactor times a terminating 2F1 sum,
//   jacobi         - the equivalent Jacobi-polynomial form at x = 1 - 2 rho
//                    via the forward degree recurrence.
// The polynomial cores accumulate in 50-digit software floats. The
// alternating 2F1 sum cancels down from term magnitudes ~1e21 near rho = 0.95
// at degree 30, which is unrecoverable in double or double-double.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "errors.hpp"
#include "weight.hpp"

namespace singosc {

using wide_float = boost::multiprecision::cpp_bin_float_50;

inline double energy_level(int n, double omega, const RepresentationWeight& w) {
    if (n < 0) throw validation_error("level index must be >= 0");
    if (!(omega > 0.0)) throw validation_error("omega must be > 0");
    return 2.0 * omega * (n + w.j);
}

enum class ProbabilityMethod { hypergeometric, jacobi };

struct TransitionQuery {
    int m = 0;
    int n = 0;
    RepresentationWeight weight{3.0, 1.0};
    double rho = 0.0;
};

namespace detail {

// Terminating 2F1(-S, L+2j; L-S+1; rho) summed directly with ratio-form
// terms. Requires 0 <= S <= L. Sum has S+1 terms.
inline wide_float hyp2f1_core(int S, int L, const wide_float& two_j,
                              const wide_float& rho, double log_bound) {
    wide_float term = 1, sum = 1;
    const wide_float limit = exp(wide_float(log_bound));
    for (int k = 0; k < S; ++k) {
        term *= (wide_float(-S + k) * (two_j + (L + k))) /
                (wide_float(L - S + 1 + k) * (k + 1)) * rho;
        if (abs(term) > limit)
            throw numerical_error("2f1 term magnitude exceeds the log bound");
        sum += term;
    }
    return sum;
}

// P_k^(alpha,beta)(x) by the forward three-term recurrence in the degree.
inline wide_float jacobi_core(int k, const wide_float& alpha,
                              const wide_float& beta, const wide_float& x,
                              double log_bound) {
    if (k == 0) return 1;
    const wide_float ab = alpha + beta;
    wide_float pm1 = 1;
    wide_float p = (ab + 2) / 2 * x + (alpha - beta) / 2;
    const wide_float limit = exp(wide_float(log_bound));
    for (int i = 2; i <= k; ++i) {
        const wide_float t = 2 * i + ab;
        const wide_float a = 2 * i * (i + ab) * (t - 2);
        const wide_float b = (t - 1) * (alpha * alpha - beta * beta);
        const wide_float c = (t - 1) * t * (t - 2);
        const wide_float d = 2 * (i + alpha - 1) * (i + beta - 1) * t;
        const wide_float pnext = ((b + c * x) * p - d * pm1) / a;
        if (abs(pnext) > limit)
            throw numerical_error("jacobi recurrence magnitude exceeds the log bound");
        pm1 = p;
        p = pnext;
    }
    return p;
}

inline wide_float log_prefactor_hypergeometric(int S, int L,
                                               const wide_float& two_j,
                                               const wide_float& rho) {
    using boost::math::lgamma;
    return lgamma(wide_float(L + 1)) - 2 * lgamma(wide_float(L - S + 1)) -
           lgamma(wide_float(S + 1)) + lgamma(two_j + L) - lgamma(two_j + S) +
           (L - S) * log(rho) + two_j * log(1 - rho);
}

inline wide_float log_prefactor_jacobi(int S, int L, const wide_float& two_j,
                                       const wide_float& rho) {
    using boost::math::lgamma;
    return lgamma(wide_float(S + 1)) - lgamma(wide_float(L + 1)) +
           lgamma(two_j + L) - lgamma(two_j + S) + (L - S) * log(rho) +
           two_j * log(1 - rho);
}

} // namespace detail

// Degree-k Jacobi polynomial, double interface over the wide recurrence.
inline double jacobi_polynomial(int k, double alpha, double beta, double x) {
    if (k < 0) throw validation_error("jacobi degree must be >= 0");
    return static_cast<double>(
        detail::jacobi_core(k, wide_float(alpha), wide_float(beta),
                            wide_float(x), 700.0));
}

inline double terminating_2f1(int S, int L, double two_j, double rho) {
    if (S < 0 || L < S) throw validation_error("terminating 2f1 requires 0 <= S <= L");
    return static_cast<double>(
        detail::hyp2f1_core(S, L, wide_float(two_j), wide_float(rho), 700.0));
}

// Probability of the m -> n transition. Both methods build the prefactor in
// log space (lgamma accumulation) and exponentiate once. Probabilities below
// the double range underflow cleanly to zero; the log bound only guards the
// overflow side (pathological index/rho combinations).
inline double transition_probability(const TransitionQuery& q,
                                     ProbabilityMethod method = ProbabilityMethod::jacobi,
                                     double log_bound = 700.0) {
    if (q.m < 0 || q.n < 0) throw validation_error("level indices must be >= 0");
    if (!(q.rho >= 0.0 && q.rho < 1.0)) throw validation_error("rho must lie in [0, 1)");
    if (!(q.weight.j > 0.5)) throw validation_error("representation weight requires j > 1/2");
    const int L = std::max(q.m, q.n), S = std::min(q.m, q.n);
    if (q.rho == 0.0) return L == S ? 1.0 : 0.0;

    const wide_float two_j = 2.0 * q.weight.j;
    const wide_float rho = q.rho;
    wide_float poly, logpref;
    if (method == ProbabilityMethod::hypergeometric) {
        poly = detail::hyp2f1_core(S, L, two_j, rho, log_bound);
        logpref = detail::log_prefactor_hypergeometric(S, L, two_j, rho);
    } else {
        poly = detail::jacobi_core(S, wide_float(L - S), two_j - 1,
                                   1 - 2 * rho, log_bound);
        logpref = detail::log_prefactor_jacobi(S, L, two_j, rho);
    }
    if (poly == 0) return 0.0;
    const wide_float logw = logpref + 2 * log(abs(poly));
    if (static_cast<double>(logpref) > log_bound ||
        static_cast<double>(logw) > log_bound)
        throw numerical_error("transition probability log magnitude exceeds the bound");
    return static_cast<double>(exp(logw));
}

struct TailPolicy {
    double epsilon = 1e-10; // row mass allowed beyond the kept extent
    long n_cap = 0;         // 0 = automatic cap (scales with the row mean)
};

struct TransitionTable {
    RepresentationWeight weight{3.0, 1.0};
    double rho = 0.0;
    int m_max = 0;
    std::vector<std::vector<double>> w; // w[m][n], ragged row extents
    std::vector<double> row_sums;       // tail-compensated
    std::vector<double> row_residuals;  // |1 - row_sums[m]|
    std::vector<double> tail_estimates; // geometric bound on the dropped mass
    long n_extent_max = 0;
};

namespace detail {

// Analytic row mean of n: sum_n n w_mn = (m+j)(1+rho)/(1-rho) - j.
inline double row_mean_n(const RepresentationWeight& wt, double rho, int m) {
    return (m + wt.j) * (1.0 + rho) / (1.0 - rho) - wt.j;
}

inline long auto_tail_cap(const RepresentationWeight& wt, double rho, int m_max) {
    const double mean = (m_max + wt.j) * (1.0 + rho) / (1.0 - rho);
    return std::lround(10.0 * (mean + 1.0 / (1.0 - rho) + 20.0));
}

// Walks one row for n >= m with the prefactor carried multiplicatively:
// pref(m,m) = (1-rho)^(2j), pref(m,n+1) = pref(m,n) * rho (n+2j)/(n+1).
// Calls visit(n, w_wide) for each entry and returns at the first n where
// stop(n, w, ratio_bound) held for three consecutive entries past the row
// mean. Throws when the cap binds first.
template <class Visit>
inline void walk_row_tail(const RepresentationWeight& wt, double rho, int m,
                          long n_start_min, long cap, double bound_target,
                          double weight_growth, Visit&& visit) {
    const wide_float two_j = 2.0 * wt.j;
    const wide_float wrho = rho;
    const wide_float x = 1 - 2 * wrho;
    wide_float pref = pow(wide_float(1 - wrho), two_j);
    const double mean = row_mean_n(wt, rho, m);
    double prev = -1.0;
    int quiet = 0;
    for (long n = m;; ++n) {
        if (n > m)
            pref *= wrho * (two_j + (n - 1)) / wide_float(n);
        const wide_float p =
            jacobi_core(m, wide_float(double(n - m)), two_j - 1, x, 700.0);
        const wide_float wv_wide = pref * p * p;
        const double wv = static_cast<double>(wv_wide);
        visit(n, wv_wide, wv);
        if (n >= n_start_min && n > mean && prev >= 0.0 && wv < prev) {
            const double rr = std::max(rho, prev > 0.0 ? wv / prev : 0.0);
            const double bound =
                rr < 1.0 ? wv * rr / (1.0 - rr) * (1.0 + weight_growth * (n + wt.j))
                         : bound_target * 2;
            if (bound < bound_target) {
                if (++quiet >= 3) return;
            } else {
                quiet = 0;
            }
        } else {
            quiet = 0;
        }
        prev = wv;
        if (n >= cap)
            throw numerical_error(
                "row extent cap bound before the tail target was reached");
    }
}

} // namespace detail

// Table of w_mn for m = 0..m_max. Row extents are chosen so the geometric
// tail estimate leaves less than tail.epsilon of each row uncollected; the
// estimate itself is added to row_sums (tail compensation).
inline TransitionTable build_table(const RepresentationWeight& wt, double rho,
                                   int m_max, TailPolicy tail = {}) {
    if (!(rho >= 0.0 && rho < 1.0)) throw validation_error("rho must lie in [0, 1)");
    if (m_max < 0) throw validation_error("m_max must be >= 0");
    if (!(tail.epsilon > 0.0 && tail.epsilon < 1.0))
        throw validation_error("tail epsilon must lie in (0, 1)");

    TransitionTable table;
    table.weight = wt;
    table.rho = rho;
    table.m_max = m_max;
    const long cap = tail.n_cap > 0 ? tail.n_cap
                                    : detail::auto_tail_cap(wt, rho, m_max);

    for (int m = 0; m <= m_max; ++m) {
        std::vector<double> row;
        if (rho == 0.0) {
            row.assign(static_cast<size_t>(m_max) + 1, 0.0);
            row[static_cast<size_t>(m)] = 1.0;
            table.w.push_back(std::move(row));
            table.row_sums.push_back(1.0);
            table.row_residuals.push_back(0.0);
            table.tail_estimates.push_back(0.0);
            table.n_extent_max = std::max(table.n_extent_max, long(m_max) + 1);
            continue;
        }
        wide_float sum = 0;
        // below-diagonal entries by symmetry of the closed form
        for (int n = 0; n < m; ++n) {
            const double wv = transition_probability({m, n, wt, rho});
            row.push_back(wv);
            sum += wv;
        }
        double last_w = 0.0, last_ratio = rho;
        detail::walk_row_tail(
            wt, rho, m, std::max<long>(m_max, m + 1), cap, tail.epsilon / 10.0,
            0.0, [&](long n, const wide_float& wv_wide, double wv) {
                row.push_back(wv);
                sum += wv_wide;
                if (wv > 0.0 && last_w > 0.0)
                    last_ratio = std::max(rho, wv / last_w);
                last_w = wv;
            });
        const double tail_est =
            last_ratio < 1.0 ? last_w * last_ratio / (1.0 - last_ratio) : 0.0;
        const double row_sum = static_cast<double>(sum) + tail_est;
        table.n_extent_max = std::max(table.n_extent_max, long(row.size()));
        table.w.push_back(std::move(row));
        table.row_sums.push_back(row_sum);
        table.row_residuals.push_back(std::abs(1.0 - row_sum));
        table.tail_estimates.push_back(tail_est);
    }
    return table;
}

// Rectangular table with a fixed n extent, no tail logic. row_residuals hold
// the raw |1 - partial sum|, which only approaches zero once n_max covers
// the rows' mass.
inline TransitionTable build_table_fixed(const RepresentationWeight& wt,
                                         double rho, int m_max, int n_max) {
    if (!(rho >= 0.0 && rho < 1.0)) throw validation_error("rho must lie in [0, 1)");
    if (m_max < 0 || n_max < 0) throw validation_error("extents must be >= 0");
    TransitionTable table;
    table.weight = wt;
    table.rho = rho;
    table.m_max = m_max;
    table.n_extent_max = n_max + 1;
    for (int m = 0; m <= m_max; ++m) {
        std::vector<double> row(static_cast<size_t>(n_max) + 1);
        double sum = 0.0;
        for (int n = 0; n <= n_max; ++n) {
            row[static_cast<size_t>(n)] = transition_probability({m, n, wt, rho});
            sum += row[static_cast<size_t>(n)];
        }
        table.w.push_back(std::move(row));
        table.row_sums.push_back(sum);
        table.row_residuals.push_back(std::abs(1.0 - sum));
        table.tail_estimates.push_back(0.0);
    }
    return table;
}

// Tail-compensated sum_n (n+j) w_mn. Equals (m+j)(1+rho)/(1-rho) exactly.
inline double first_moment(const RepresentationWeight& wt, double rho, int m,
                           double tol = 1e-9) {
    if (!(rho >= 0.0 && rho < 1.0)) throw validation_error("rho must lie in [0, 1)");
    if (m < 0) throw validation_error("m must be >= 0");
    if (rho == 0.0) return m + wt.j;
    wide_float sum = 0;
    for (int n = 0; n < m; ++n)
        sum += wide_float(n + wt.j) * transition_probability({m, n, wt, rho});
    const long cap = 2 * detail::auto_tail_cap(wt, rho, m);
    double last_w = 0.0, last_ratio = rho;
    long last_n = m;
    // weight_growth folds the (n+j) factor into the stop bound
    detail::walk_row_tail(wt, rho, m, m + 1, cap, tol / 10.0, 1.0,
                          [&](long n, const wide_float& wv_wide, double wv) {
                              sum += (wide_float(double(n)) + wt.j) * wv_wide;
                              if (wv > 0.0 && last_w > 0.0)
                                  last_ratio = std::max(rho, wv / last_w);
                              last_w = wv;
                              last_n = n;
                          });
    double tail_est = 0.0;
    if (last_ratio < 1.0) {
        const double r = last_ratio;
        tail_est = last_w * ((last_n + wt.j) * r / (1.0 - r) +
                             r / ((1.0 - r) * (1.0 - r)));
    }
    return static_cast<double>(sum) + tail_est;
}

} // namespace singosc
