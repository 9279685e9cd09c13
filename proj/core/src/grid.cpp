#include "wfp/grid.hpp"
#include "wfp/detail/pointwise.hpp"
#include "wfp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <list>
#include <mutex>
#include <random>

namespace wfp {

using detail::Kahan;
using detail::for_each_point;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

} // namespace

GridSpec GridSpec::make(int d, int n_x, int n_xi, double x_max, double xi_max) {
    if (d != 1 && d != 2)
        throw ConfigError("GridSpec: d must be 1 or 2");
    if (n_x < 8 || n_xi < 8 || n_x % 2 != 0 || n_xi % 2 != 0)
        throw ConfigError("GridSpec: n_x and n_xi must be even and >= 8");
    if (!(x_max > 0.0) || !(xi_max > 0.0))
        throw ConfigError("GridSpec: box half-widths must be positive");
    GridSpec g;
    g.d = d;
    g.n_x = n_x;
    g.n_xi = n_xi;
    g.x_max = x_max;
    g.xi_max = xi_max;
    g.dx = 2.0 * x_max / n_x;
    g.dxi = 2.0 * xi_max / n_xi;
    const double tail = standard_form(d).tail_mass(x_max, xi_max);
    if (tail >= 1e-10)
        throw ConfigError("GridSpec: steady-state tail mass outside the box is " +
                          std::to_string(tail) + " (>= 1e-10); enlarge the box");
    return g;
}

double GridSpec::freq(int a, int j) const {
    const int n = axis_n(a);
    const int k = (j < n / 2) ? j : j - n;
    return kPi / axis_half_width(a) * k;
}

std::size_t GridSpec::size() const {
    std::size_t s = 1;
    for (int a = 0; a < axes(); ++a) s *= static_cast<std::size_t>(axis_n(a));
    return s;
}

double GridSpec::cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < axes(); ++a) v *= axis_h(a);
    return v;
}

void GridSpec::decode(std::size_t flat, int* idx) const {
    for (int a = axes() - 1; a >= 0; --a) {
        const int n = axis_n(a);
        idx[a] = static_cast<int>(flat % n);
        flat /= n;
    }
}

void WignerField::validate() const {
    if (values.size() != grid.size())
        throw InvariantError("WignerField: sample count does not match the grid");
    for (double v : values)
        if (!std::isfinite(v)) throw InvariantError("WignerField: non-finite sample");
}

QuadraticFormA::QuadraticFormA(int d, const std::array<double, 4>& pair_matrix)
    : d_(d), m_(pair_matrix) {
    if (d != 1 && d != 2) throw ConfigError("QuadraticFormA: d must be 1 or 2");
    if (std::abs(m_[1] - m_[2]) > 1e-14)
        throw ConfigError("QuadraticFormA: coefficient matrix must be symmetric");
    const double det = m_[0] * m_[3] - m_[1] * m_[2];
    if (m_[0] <= 0.0 || det <= 0.0)
        throw ConfigError("QuadraticFormA: coefficient matrix must be positive definite");
    // Hess A = M/2 per pair; sigma = smallest eigenvalue
    const double tr = 0.5 * (m_[0] + m_[3]);
    const double dd = 0.25 * det;
    const double disc = std::sqrt(tr * tr / 4.0 - dd);
    sigma_ = tr / 2.0 - disc;
    // integral of exp(-A) over R^{2d} = (4 pi / sqrt(det M))^d
    log_c_ = -d * std::log(4.0 * kPi / std::sqrt(det));
    c_ = std::exp(log_c_);
    // covariance of mu per pair: 2 M^{-1}
    var_x_ = 2.0 * m_[3] / det;
    var_xi_ = 2.0 * m_[0] / det;
}

double QuadraticFormA::eval_A(const double* x, const double* xi) const {
    double s = 0.0;
    for (int i = 0; i < d_; ++i)
        s += m_[0] * x[i] * x[i] + 2.0 * m_[1] * x[i] * xi[i] + m_[3] * xi[i] * xi[i];
    return 0.25 * s;
}

double QuadraticFormA::eval_mu(const double* x, const double* xi) const {
    return std::exp(log_c_ - eval_A(x, xi));
}

void QuadraticFormA::grad_A(const double* x, const double* xi, double* out) const {
    for (int i = 0; i < d_; ++i) {
        out[i] = 0.5 * (m_[0] * x[i] + m_[1] * xi[i]);
        out[d_ + i] = 0.5 * (m_[1] * x[i] + m_[3] * xi[i]);
    }
}

double QuadraticFormA::laplace_A() const { return 0.5 * d_ * (m_[0] + m_[3]); }

void QuadraticFormA::eval_F(const double* x, const double* xi, double* out) const {
    grad_A(x, xi, out);
    for (int i = 0; i < d_; ++i) {
        out[i] = -xi[i] - out[i];
        out[d_ + i] = x[i] + 2.0 * xi[i] - out[d_ + i];
    }
}

double QuadraticFormA::tail_mass(double x_max, double xi_max) const {
    // P(|x_i| > x_max) + P(|xi_i| > xi_max) per pair, Gaussian marginals
    const double px = std::erfc(x_max / std::sqrt(2.0 * var_x_));
    const double pxi = std::erfc(xi_max / std::sqrt(2.0 * var_xi_));
    return d_ * (px + pxi);
}

const QuadraticFormA& standard_form(int d) {
    static const QuadraticFormA q1 = QuadraticFormA::standard(1);
    static const QuadraticFormA q2 = QuadraticFormA::standard(2);
    if (d == 1) return q1;
    if (d == 2) return q2;
    throw ConfigError("standard_form: d must be 1 or 2");
}

// ---------------------------------------------------------------------------
// quadrature
// ---------------------------------------------------------------------------

double mass(const WignerField& w) {
    Kahan acc;
    for (double v : w.values) acc.add(v);
    return acc.sum() * w.grid.cell_volume();
}

double norm_L2(const WignerField& w) {
    Kahan acc;
    for (double v : w.values) acc.add(v * v);
    return std::sqrt(acc.sum() * w.grid.cell_volume());
}

double inner_L2(const WignerField& f, const WignerField& g) {
    if (!(f.grid == g.grid)) throw InvariantError("inner_L2: grid mismatch");
    Kahan acc;
    for (std::size_t i = 0; i < f.size(); ++i) acc.add(f[i] * g[i]);
    return acc.sum() * f.grid.cell_volume();
}

std::vector<double> a_values(const GridSpec& g) {
    const QuadraticFormA& q = standard_form(g.d);
    std::vector<double> out(g.size());
    for_each_point(g, [&](std::size_t p, const double* x, const double* xi) {
        out[p] = q.eval_A(x, xi);
    });
    return out;
}

std::vector<double> hm_weight(const GridSpec& g, int m) {
    if (m < 0) throw ConfigError("hm_weight: m must be >= 0");
    std::vector<double> out = a_values(g);
    for (double& a : out) a = (m == 0) ? 2.0 : 1.0 + std::pow(a, m);
    return out;
}

namespace {

// weight arrays are reused heavily by the steady-state iteration; cache them
struct WeightEntry {
    GridSpec grid;
    int m;
    std::vector<double> weights;
};

const std::vector<double>& cached_hm_weight(const GridSpec& g, int m) {
    static std::list<WeightEntry> cache;  // stable addresses
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    for (const WeightEntry& e : cache)
        if (e.grid == g && e.m == m) return e.weights;
    cache.push_back({g, m, hm_weight(g, m)});
    return cache.back().weights;
}

} // namespace

double inner_Hm(const WignerField& f, const WignerField& g, int m) {
    if (!(f.grid == g.grid)) throw InvariantError("inner_Hm: grid mismatch");
    const std::vector<double>& wgt = cached_hm_weight(f.grid, m);
    Kahan acc;
    for (std::size_t i = 0; i < f.size(); ++i) acc.add(f[i] * g[i] * wgt[i]);
    return acc.sum() * f.grid.cell_volume();
}

double norm_Hm(const WignerField& w, int m) {
    return std::sqrt(std::max(0.0, inner_Hm(w, w, m)));
}

double dist_Hm(const WignerField& f, const WignerField& g, int m) {
    if (!(f.grid == g.grid)) throw InvariantError("dist_Hm: grid mismatch");
    const std::vector<double>& wgt = cached_hm_weight(f.grid, m);
    Kahan acc;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double dfi = f[i] - g[i];
        acc.add(dfi * dfi * wgt[i]);
    }
    return std::sqrt(std::max(0.0, acc.sum() * f.grid.cell_volume()));
}

namespace {

/// log-domain accumulation of sum exp(l_p); two passes (max, then Kahan of
/// exp(l - max)) keeps e^A out of the overflow zone
double log_sum_exp_norm(const GridSpec& g, const std::vector<double>& avals,
                        const std::vector<double>& diff2_log, double a_cut,
                        double log_c) {
    // diff2_log[p] = 2 log|w_p| or -inf for zero samples
    double lmax = -1e308;
    const std::size_t n = diff2_log.size();
    std::vector<double> contrib(n, -1e308);
    for (std::size_t p = 0; p < n; ++p) {
        if (avals[p] > a_cut || diff2_log[p] == -1e308) continue;
        const double l = diff2_log[p] + avals[p] - log_c;
        contrib[p] = l;
        lmax = std::max(lmax, l);
    }
    if (lmax == -1e308) return 0.0;
    Kahan acc;
    for (std::size_t p = 0; p < n; ++p)
        if (contrib[p] != -1e308) acc.add(std::exp(contrib[p] - lmax));
    const double log_sq = lmax + std::log(acc.sum()) + std::log(g.cell_volume());
    if (0.5 * log_sq > 709.0)
        throw OverflowError("norm_H: result exceeds the double range");
    return std::exp(0.5 * log_sq);
}

} // namespace

double norm_H(const WignerField& w, double a_cut) {
    const std::vector<double> avals = a_values(w.grid);
    std::vector<double> lg(w.size(), -1e308);
    for (std::size_t p = 0; p < w.size(); ++p) {
        const double v = std::abs(w[p]);
        if (v > 0.0) lg[p] = 2.0 * std::log(v);
    }
    return log_sum_exp_norm(w.grid, avals, lg, a_cut,
                            standard_form(w.grid.d).log_norm_const());
}

double inner_H(const WignerField& f, const WignerField& g, double a_cut) {
    if (!(f.grid == g.grid)) throw InvariantError("inner_H: grid mismatch");
    const std::vector<double> avals = a_values(f.grid);
    const double log_c = standard_form(f.grid.d).log_norm_const();
    Kahan acc;
    for (std::size_t p = 0; p < f.size(); ++p) {
        if (avals[p] > a_cut) continue;
        const double prod = f[p] * g[p];
        if (prod == 0.0) continue;
        acc.add(prod * std::exp(avals[p] - log_c));
    }
    const double r = acc.sum() * f.grid.cell_volume();
    if (!std::isfinite(r)) throw OverflowError("inner_H: accumulation overflowed");
    return r;
}

double dist_H(const WignerField& f, const WignerField& g, double a_cut) {
    if (!(f.grid == g.grid)) throw InvariantError("dist_H: grid mismatch");
    const std::vector<double> avals = a_values(f.grid);
    std::vector<double> lg(f.size(), -1e308);
    for (std::size_t p = 0; p < f.size(); ++p) {
        const double v = std::abs(f[p] - g[p]);
        if (v > 0.0) lg[p] = 2.0 * std::log(v);
    }
    return log_sum_exp_norm(f.grid, avals, lg, a_cut,
                            standard_form(f.grid.d).log_norm_const());
}

double shell_residual(const WignerField& w) {
    const GridSpec& g = w.grid;
    double vmax = 0.0, smax = 0.0;
    const int na = g.axes();
    int idx[4];
    for (std::size_t p = 0; p < w.size(); ++p) {
        g.decode(p, idx);
        bool shell = false;
        for (int a = 0; a < na; ++a) {
            const double c = std::abs(g.coord(a, idx[a]));
            if (c > 0.9 * g.axis_half_width(a)) { shell = true; break; }
        }
        const double v = std::abs(w[p]);
        vmax = std::max(vmax, v);
        if (shell) smax = std::max(smax, v);
    }
    return vmax > 0.0 ? smax / vmax : 0.0;
}

// ---------------------------------------------------------------------------
// standard fields
// ---------------------------------------------------------------------------

WignerField sample_mu(const GridSpec& g) {
    const QuadraticFormA& q = standard_form(g.d);
    WignerField w(g);
    for_each_point(g, [&](std::size_t p, const double* x, const double* xi) {
        w[p] = q.eval_mu(x, xi);
    });
    return w;
}

WignerField displaced_gaussian(const GridSpec& g, double shift_x, double shift_xi) {
    const QuadraticFormA& q = standard_form(g.d);
    WignerField w(g);
    for_each_point(g, [&](std::size_t p, const double* x, const double* xi) {
        double xs[2], xis[2];
        for (int i = 0; i < g.d; ++i) {
            xs[i] = x[i] - shift_x;
            xis[i] = xi[i] - shift_xi;
        }
        w[p] = q.eval_mu(xs, xis);
    });
    const double m = mass(w);
    for (double& v : w.values) v /= m;
    return w;
}

WignerField random_field(const GridSpec& g, std::uint64_t seed, double band_frac,
                         double envelope_pow) {
    // random trigonometric polynomial: cosine/sine modes up to band_frac of
    // the Nyquist band, coefficients from a seeded mt19937
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int na = g.axes();
    int kmax[4];
    for (int a = 0; a < na; ++a)
        kmax[a] = std::max(1, static_cast<int>(band_frac * g.axis_n(a) / 2));

    struct Mode { double k[4]; double amp, phase_c, phase_s; };
    std::vector<Mode> modes;
    const int n_modes = 32;
    for (int m = 0; m < n_modes; ++m) {
        Mode mo{};
        for (int a = 0; a < na; ++a) {
            std::uniform_int_distribution<int> ki(-kmax[a], kmax[a]);
            mo.k[a] = ki(rng) * kPi / g.axis_half_width(a);
        }
        mo.amp = gauss(rng);
        mo.phase_c = gauss(rng);
        mo.phase_s = gauss(rng);
        modes.push_back(mo);
    }
    // smooth window, identically 1 for t <= 0.7 and 0 for t >= 0.9, so
    // enveloped fields vanish exactly near the periodic seam
    auto window = [](double t) {
        if (t <= 0.7) return 1.0;
        if (t >= 0.9) return 0.0;
        const double u = (t - 0.7) / 0.2;
        const double a = std::exp(-1.0 / (1.0 - u)), b = std::exp(-1.0 / u);
        return a / (a + b);
    };
    const QuadraticFormA& q = standard_form(g.d);
    WignerField w(g);
    for_each_point(g, [&](std::size_t p, const double* x, const double* xi) {
        double v = 0.0;
        for (const Mode& mo : modes) {
            double ph = 0.0;
            for (int i = 0; i < g.d; ++i)
                ph += mo.k[i] * x[i] + mo.k[g.d + i] * xi[i];
            v += mo.amp * (mo.phase_c * std::cos(ph) + mo.phase_s * std::sin(ph));
        }
        if (envelope_pow > 0.0) {
            v *= std::exp(-envelope_pow * q.eval_A(x, xi));
            for (int i = 0; i < g.d; ++i) {
                v *= window(std::abs(x[i]) / g.x_max);
                v *= window(std::abs(xi[i]) / g.xi_max);
            }
        }
        w[p] = v;
    });
    const double nrm = norm_L2(w);
    if (nrm > 0.0)
        for (double& v : w.values) v /= nrm;
    return w;
}

std::vector<double> quasi_random_points(const GridSpec& g, std::size_t count) {
    // R2 low-discrepancy sequence (generalized golden ratio)
    const int na = g.axes();
    double phi = 2.0;
    for (int it = 0; it < 64; ++it) phi = std::pow(1.0 + phi, 1.0 / (na + 1));
    double alpha[4], state[4];
    for (int a = 0; a < na; ++a) {
        alpha[a] = std::pow(1.0 / phi, a + 1);
        state[a] = 0.5;
    }
    std::vector<double> pts(count * na);
    for (std::size_t i = 0; i < count; ++i) {
        for (int a = 0; a < na; ++a) {
            state[a] += alpha[a];
            state[a] -= std::floor(state[a]);
            const double L = g.axis_half_width(a);
            pts[i * na + a] = -L + 2.0 * L * state[a];
        }
    }
    return pts;
}

} // namespace wfp
