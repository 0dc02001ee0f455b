#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "nfnls/normal_form.hpp"
#include "nfnls/spectral.hpp"

namespace testing {

using nfnls::cplx;
using nfnls::ModeVector;

inline ModeVector random_vector(int n_max, std::mt19937_64& rng, double scale = 1.0) {
    ModeVector u(n_max);
    for (int n = -n_max; n <= n_max; ++n) {
        const double re = 2.0 * nfnls::uniform01(rng) - 1.0;
        const double im = 2.0 * nfnls::uniform01(rng) - 1.0;
        u.at(n) = scale * cplx(re, im);
    }
    return u;
}

inline double max_abs(const ModeVector& u) {
    double m = 0.0;
    for (cplx c : u.coeffs()) m = std::max(m, std::abs(c));
    return m;
}

inline double max_diff(const ModeVector& a, const ModeVector& b) { return max_abs(a - b); }

/// max |a - b| relative to max(|a|, |b|); 0 when both vanish.
inline double rel_diff(const ModeVector& a, const ModeVector& b) {
    const double scale = std::max(max_abs(a), max_abs(b));
    return scale == 0.0 ? 0.0 : max_diff(a, b) / scale;
}

}  // namespace testing
