#pragma once

#include "wfp/grid.hpp"

#include <cmath>
#include <vector>

namespace wfp::testing {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline const double kSigma = 1.0 - 1.0 / std::sqrt(2.0);

/// closed-form normalization of mu for d = 1: 1 / (2 sqrt(2) pi)
inline double mu_norm_const_1d() { return 1.0 / (2.0 * std::sqrt(2.0) * kPi); }

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

inline double rel_l2(const WignerField& got, const WignerField& want) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) {
        const double d = got[i] - want[i];
        num += d * d;
        den += want[i] * want[i];
    }
    return std::sqrt(num / std::max(den, 1e-300));
}

inline double max_abs(const WignerField& w) {
    double m = 0.0;
    for (double v : w.values) m = std::max(m, std::abs(v));
    return m;
}

/// higher-resolution copy of a grid (finer spacing, same box)
inline GridSpec refined(const GridSpec& g, int factor) {
    return GridSpec::make(g.d, g.n_x * factor, g.n_xi * factor, g.x_max, g.xi_max);
}

} // namespace wfp::testing
