#pragma once

// Dense matrix exponential by Pade approximation with scaling and squaring
// (degree 3/5/7/9/13 selection on the 1-norm). Accuracy is what the callers
// rely on, not the method; the tests pin it with a halved-step squaring
// check, exp(A) vs exp(A/2)^2.

#include <cmath>

#include <Eigen/Dense>

#include "errors.hpp"

namespace singosc {

namespace detail {

template <class Mat>
double one_norm(const Mat& a) {
    return a.cwiseAbs().colwise().sum().maxCoeff();
}

// Numerators/denominators of the [m/m] Pade approximant to exp share these
// coefficients; U collects odd powers, V even ones.
template <class Mat>
void pade_uv_low(const Mat& a, int degree, Mat& u, Mat& v) {
    static const double b3[] = {120, 60, 12, 1};
    static const double b5[] = {30240, 15120, 3360, 420, 30, 1};
    static const double b7[] = {17297280, 8648640, 1995840, 277200,
                                25200,    1512,    56,      1};
    static const double b9[] = {17643225600., 8821612800., 2075673600.,
                                302702400.,   30270240.,   2162160.,
                                110880.,      3960.,       90.,
                                1.};
    const double* b = degree == 3 ? b3 : degree == 5 ? b5 : degree == 7 ? b7 : b9;
    const auto n = a.rows();
    const Mat id = Mat::Identity(n, n);
    const Mat a2 = a * a;
    Mat even = b[0] * id + b[2] * a2;
    Mat odd = b[1] * id + b[3] * a2;
    Mat power = a2;
    for (int k = 4; k <= degree; k += 2) {
        power = power * a2;
        even += b[k] * power;
        if (k + 1 <= degree) odd += b[k + 1] * power;
    }
    u = a * odd;
    v = even;
}

template <class Mat>
void pade_uv_13(const Mat& a, Mat& u, Mat& v) {
    static const double b[] = {64764752532480000., 32382376266240000.,
                               7771770303897600.,  1187353796428800.,
                               129060195264000.,   10559470521600.,
                               670442572800.,      33522128640.,
                               1323241920.,        40840800.,
                               960960.,            16380.,
                               182.,               1.};
    const auto n = a.rows();
    const Mat id = Mat::Identity(n, n);
    const Mat a2 = a * a;
    const Mat a4 = a2 * a2;
    const Mat a6 = a2 * a4;
    u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 +
             b[5] * a4 + b[3] * a2 + b[1] * id);
    v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 +
        b[2] * a2 + b[0] * id;
}

} // namespace detail

template <class Mat>
Mat matrix_exponential(const Mat& a) {
    if (a.rows() != a.cols())
        throw validation_error("matrix exponential requires a square matrix");
    const double theta[] = {0.01495585217958292, 0.2539398330063230,
                            0.9504178996162932, 2.097847961257068};
    const int degrees[] = {3, 5, 7, 9};
    const double theta13 = 5.371920351148152;

    const double nrm = detail::one_norm(a);
    if (!std::isfinite(nrm))
        throw numerical_error("matrix exponential of a non-finite matrix");

    Mat u, v;
    int squarings = 0;
    if (nrm <= theta[3]) {
        int degree = 9;
        for (int k = 0; k < 4; ++k)
            if (nrm <= theta[k]) {
                degree = degrees[k];
                break;
            }
        detail::pade_uv_low(a, degree, u, v);
    } else {
        squarings = std::max(0, static_cast<int>(
                                    std::ceil(std::log2(nrm / theta13))));
        const Mat scaled = a / std::pow(2.0, squarings);
        detail::pade_uv_13(scaled, u, v);
    }
    Mat r = (v - u).partialPivLu().solve(v + u);
    for (int k = 0; k < squarings; ++k) r = r * r;
    return r;
}

} // namespace singosc
