#pragma once

// Finite truncations of the lowest-weight ladder representation behind the
// oscillator: J3 = diag(n+j), <n+1|J+|n> = sqrt((n+1)(n+2j)), J1 = (J+ + J-)/2,
// J2 = (J+ - J-)/(2i). Truncation corrupts products near the last rows, so
// every identity check runs on a leading interior block with a margin of at
// least two rows.
//
// Residuals are reported in backward-error form: the max-norm defect divided
// by (1 + the product of the operands' max-norms). The raw defect of a
// product of matrices with entries ~N^2 carries an irreducible rounding
// floor ~N^2 eps that says nothing about the construction being wrong.

#include <complex>

#include <Eigen/Dense>

#include "errors.hpp"
#include "expm.hpp"
#include "report.hpp"
#include "weight.hpp"

namespace singosc {

struct TruncatedRep {
    RepresentationWeight weight{3.0, 1.0};
    int dim = 0;
    int interior = 0; // leading block unaffected by the truncation edge
    Eigen::MatrixXcd J1, J2, J3;
};

inline TruncatedRep build_truncated_rep(const RepresentationWeight& w, int dim) {
    if (dim < 4) throw validation_error("representation dimension must be >= 4");
    TruncatedRep rep;
    rep.weight = w;
    rep.dim = dim;
    rep.interior = dim - 2;
    rep.J1 = Eigen::MatrixXcd::Zero(dim, dim);
    rep.J2 = Eigen::MatrixXcd::Zero(dim, dim);
    rep.J3 = Eigen::MatrixXcd::Zero(dim, dim);
    // incremental diagonal keeps the ladder spacing exactly 1.0
    double lambda = w.j;
    for (int n = 0; n < dim; ++n) {
        rep.J3(n, n) = lambda;
        lambda += 1.0;
    }
    const std::complex<double> i(0.0, 1.0);
    for (int n = 0; n + 1 < dim; ++n) {
        const double sigma = ladder_coefficient(w, n);
        rep.J1(n + 1, n) = sigma / 2.0;
        rep.J1(n, n + 1) = sigma / 2.0;
        rep.J2(n + 1, n) = -i * sigma / 2.0;
        rep.J2(n, n + 1) = +i * sigma / 2.0;
    }
    return rep;
}

namespace detail {

inline double max_abs(const Eigen::MatrixXcd& m) {
    return m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
}

// Backward-style commutator residual of [A,B] - C on the leading block.
inline double commutator_residual(const Eigen::MatrixXcd& a,
                                  const Eigen::MatrixXcd& b,
                                  const Eigen::MatrixXcd& c, int block) {
    const Eigen::MatrixXcd defect = (a * b - b * a - c).topLeftCorner(block, block);
    return max_abs(defect) / (1.0 + max_abs(a) * max_abs(b));
}

} // namespace detail

// Residuals of [J1,J2]+iJ3, [J2,J3]-iJ1, [J3,J1]-iJ2 on the interior block.
inline CheckReport verify_commutators(const TruncatedRep& rep, double tol,
                                      int interior_override = -1) {
    const int block = interior_override > 0
                          ? std::min(interior_override, rep.dim)
                          : rep.interior;
    const std::complex<double> i(0.0, 1.0);
    CheckReport report;
    report.add("commutator_j1_j2",
               detail::commutator_residual(rep.J1, rep.J2, -i * rep.J3, block), tol);
    report.add("commutator_j2_j3",
               detail::commutator_residual(rep.J2, rep.J3, i * rep.J1, block), tol);
    report.add("commutator_j3_j1",
               detail::commutator_residual(rep.J3, rep.J1, i * rep.J2, block), tol);
    return report;
}

// Casimir defect J3^2 - J1^2 - J2^2 - j(j-1) I on the interior block, plus
// the scalar identity j(j-1) = (g-3)/16 tying the weight to the coupling.
inline CheckReport verify_casimir(const TruncatedRep& rep, double tol,
                                  int interior_override = -1) {
    const int block = interior_override > 0
                          ? std::min(interior_override, rep.dim)
                          : rep.interior;
    const double j = rep.weight.j;
    const Eigen::MatrixXcd casimir =
        rep.J3 * rep.J3 - rep.J1 * rep.J1 - rep.J2 * rep.J2;
    const Eigen::MatrixXcd defect =
        (casimir - j * (j - 1.0) * Eigen::MatrixXcd::Identity(rep.dim, rep.dim))
            .topLeftCorner(block, block);
    const double scale = 1.0 + detail::max_abs(rep.J3) * detail::max_abs(rep.J3) +
                         detail::max_abs(rep.J1) * detail::max_abs(rep.J1) +
                         detail::max_abs(rep.J2) * detail::max_abs(rep.J2);
    CheckReport report;
    report.add("casimir_block", detail::max_abs(defect) / scale, tol);
    const double scalar_residual = std::abs(j * (j - 1.0) - (rep.weight.g - 3.0) / 16.0) /
                                   (1.0 + std::abs(j * (j - 1.0)));
    report.add("casimir_scalar", scalar_residual, 1e-14);
    return report;
}

// H = (w+ + w(t)^2/w+) J3 + (w+ - w(t)^2/w+) J1. For w(t) = w+ this is
// 2 w+ J3; in general the interior spectrum approaches 2 w(t) (n+j).
inline Eigen::MatrixXcd hamiltonian_decomposition(const RepresentationWeight&,
                                                  double omega_t,
                                                  double omega_plus,
                                                  const TruncatedRep& rep) {
    if (!(omega_plus > 0.0))
        throw validation_error("reference frequency must be > 0");
    const double w2 = omega_t * omega_t;
    return (omega_plus + w2 / omega_plus) * rep.J3 +
           (omega_plus - w2 / omega_plus) * rep.J1;
}

// Unitary boost exp(-beta (J+ - J-)/2) with tanh^2(beta/2) = rho, entrywise
// squared. The generator is real antisymmetric (same sigma on both
// off-diagonals), so the truncated exponential stays orthogonal to rounding
// and its rows/columns sum to one. Interior entries converge to the
// closed-form transition probabilities as dim grows.
inline Eigen::MatrixXd wigner_boost_oracle(const RepresentationWeight& w,
                                           double rho, int dim) {
    if (!(rho >= 0.0 && rho < 1.0)) throw validation_error("rho must lie in [0, 1)");
    if (dim < 4) throw validation_error("oracle dimension must be >= 4");
    const double beta = 2.0 * std::atanh(std::sqrt(rho));
    Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(dim, dim);
    for (int n = 0; n + 1 < dim; ++n) {
        const double half = beta / 2.0 * ladder_coefficient(w, n);
        gen(n + 1, n) = -half;
        gen(n, n + 1) = +half;
    }
    const Eigen::MatrixXd boost = matrix_exponential(gen);
    return boost.cwiseProduct(boost);
}

} // namespace singosc
