#pragma once

#include "wfp/grid.hpp"

#include <cmath>
#include <cstddef>

namespace wfp::detail {

/// compensated (Kahan) accumulator
struct Kahan {
    double s = 0.0, c = 0.0;
    void add(double x) {
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    double sum() const { return s; }
};

/// visit every grid point in flat order with its coordinates:
/// f(flat_index, x[], xi[])
template <typename F>
void for_each_point(const GridSpec& g, F&& f) {
    const int na = g.axes();
    int idx[4] = {0, 0, 0, 0};
    double x[2] = {0, 0}, xi[2] = {0, 0};
    const std::size_t n = g.size();
    for (std::size_t p = 0; p < n; ++p) {
        for (int a = 0; a < na; ++a) {
            const double c = g.coord(a, idx[a]);
            if (a < g.d) x[a] = c; else xi[a - g.d] = c;
        }
        f(p, static_cast<const double*>(x), static_cast<const double*>(xi));
        for (int a = na - 1; a >= 0; --a) {
            if (++idx[a] < g.axis_n(a)) break;
            idx[a] = 0;
        }
    }
}

} // namespace wfp::detail
