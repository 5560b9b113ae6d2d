#pragma once

#include <cmath>

#include "errors.hpp"

namespace singosc {

// Label of the positive discrete-series representation selected by the
// centrifugal coupling: j = 1/2 + sqrt(1+g)/4. Any g > -1 gives j > 1/2,
// and j(j-1) = (g-3)/16 is the Casimir eigenvalue.
struct RepresentationWeight {
    double g;
    double j;
};

inline RepresentationWeight weight_from_coupling(double g) {
    if (!(g > -1.0)) throw validation_error("coupling g must satisfy g > -1");
    return {g, 0.5 + 0.25 * std::sqrt(1.0 + g)};
}

// <n+1|J+|n> = <n|J-|n+1> = sqrt((n+1)(n+2j)), n >= 0.
inline double ladder_coefficient(const RepresentationWeight& w, int n) {
    return std::sqrt((n + 1.0) * (n + 2.0 * w.j));
}

} // namespace singosc
