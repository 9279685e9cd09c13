#include "wfp/operators.hpp"
#include "wfp/detail/pointwise.hpp"
#include "wfp/errors.hpp"
#include "wfp/fft.hpp"

#include <algorithm>
#include <cmath>
#include <list>
#include <mutex>

namespace wfp {

using detail::for_each_point;

LindbladResult lindblad_check(const DiffusionCoefficients& c) {
    const double margin = c.D_pp * c.D_qq - (c.D_pq * c.D_pq + 0.25 * c.D_f * c.D_f);
    return {c.D_pp >= 0.0 && margin >= 0.0, margin};
}

double CutoffSpec::max_epsilon(int m) {
    const double a = 1.0 / (12.0 * std::sqrt(static_cast<double>(std::max(1, m))));
    return std::min(a, 1.0 / 24.0);
}

CutoffSpec::CutoffSpec(double eps, int m) : epsilon(eps) {
    if (!(eps > 0.0) || eps >= 1.0)
        throw ConfigError("CutoffSpec: epsilon must lie in (0,1)");
    if (eps > max_epsilon(m) * (1.0 + 1e-12))
        throw ConfigError("CutoffSpec: epsilon exceeds min(1/(12 sqrt(m)), 1/24) for m = " +
                          std::to_string(m));
}

namespace {
// C^1 ramp on [0,1]: plateau-matched quadratic / linear / quadratic pieces,
// max slope 4/3
constexpr double kRampA = 0.25;
constexpr double kRampM = 4.0 / 3.0;

double ramp(double t) {  // 1 at t<=0, 0 at t>=1
    if (t <= 0.0) return 1.0;
    if (t >= 1.0) return 0.0;
    if (t < kRampA) return 1.0 - 0.5 * kRampM / kRampA * t * t;
    if (t <= 1.0 - kRampA) return 1.0 - kRampM * (t - 0.5 * kRampA);
    const double u = 1.0 - t;
    return 0.5 * kRampM / kRampA * u * u;
}

double dramp(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    if (t < kRampA) return -kRampM / kRampA * t;
    if (t <= 1.0 - kRampA) return -kRampM;
    return -kRampM / kRampA * (1.0 - t);
}
} // namespace

double CutoffSpec::chi(double r) const { return ramp(r - 1.0); }
double CutoffSpec::dchi(double r) const { return dramp(r - 1.0); }

double CutoffSpec::chi_eps_at(const double* x, const double* xi, int d) const {
    double r2 = 0.0;
    for (int i = 0; i < d; ++i) r2 += x[i] * x[i] + xi[i] * xi[i];
    return chi(epsilon * std::sqrt(r2));
}

// ---------------------------------------------------------------------------

namespace {

/// sum_a D_a(G_a w) with caller-supplied coefficient field G per axis
WignerField conservative_div(const WignerField& w,
                             const std::vector<std::vector<double>>& coeff) {
    const GridSpec& g = w.grid;
    WignerField out(g);
    for (int a = 0; a < g.axes(); ++a) {
        WignerField prod(g);
        for (std::size_t p = 0; p < w.size(); ++p) prod[p] = coeff[a][p] * w[p];
        WignerField dp = spectral_derivative(prod, a);
        for (std::size_t p = 0; p < w.size(); ++p) out[p] += dp[p];
    }
    return out;
}

/// per-axis coefficient tables for G = (-xi, x + 2 xi), grad A and F
struct CoeffTables {
    GridSpec grid;
    std::vector<std::vector<double>> G, gradA, F;
};

const CoeffTables& coeff_tables(const GridSpec& g) {
    static std::list<CoeffTables> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    for (const CoeffTables& t : cache)
        if (t.grid == g) return t;
    cache.emplace_back();
    CoeffTables& t = cache.back();
    t.grid = g;
    const int na = g.axes();
    t.G.assign(na, std::vector<double>(g.size()));
    t.gradA.assign(na, std::vector<double>(g.size()));
    t.F.assign(na, std::vector<double>(g.size()));
    const QuadraticFormA& q = standard_form(g.d);
    for_each_point(g, [&](std::size_t p, const double* x, const double* xi) {
        double ga[4], f[4];
        q.grad_A(x, xi, ga);
        q.eval_F(x, xi, f);
        for (int a = 0; a < na; ++a) {
            t.gradA[a][p] = ga[a];
            t.F[a][p] = f[a];
            t.G[a][p] = (a < g.d) ? -xi[a] : x[a - g.d] + 2.0 * xi[a - g.d];
        }
    });
    return t;
}

WignerField laplacian(const WignerField& w) {
    std::vector<cplx> s = fftops::forward(w);
    fftops::mult_minus_k2(w.grid, s);
    s = fftops::inverse(w.grid, s);
    return fftops::to_real(w.grid, s, nullptr);
}

} // namespace

WignerField apply_L(const WignerField& w) {
    const CoeffTables& t = coeff_tables(w.grid);
    WignerField out = laplacian(w);
    WignerField div = conservative_div(w, t.G);
    for (std::size_t p = 0; p < w.size(); ++p) out[p] += div[p];
    return out;
}

WignerField apply_Ls(const WignerField& w) {
    const CoeffTables& t = coeff_tables(w.grid);
    WignerField out = laplacian(w);
    WignerField div = conservative_div(w, t.gradA);
    for (std::size_t p = 0; p < w.size(); ++p) out[p] += div[p];
    return out;
}

WignerField apply_Las(const WignerField& w) {
    const CoeffTables& t = coeff_tables(w.grid);
    return conservative_div(w, t.F);
}

WignerField apply_Q(const WignerField& w, const DiffusionCoefficients& c) {
    const GridSpec& g = w.grid;
    std::vector<cplx> base = fftops::forward(w);
    const std::size_t n = g.size();

    // D_pp Lap_xi + 2 D_pq sum_i d_xi d_xj mixed + D_qq Lap_x, assembled as
    // one frequency multiplier
    std::vector<cplx> spec(n);
    int idx[4];
    for (std::size_t p = 0; p < n; ++p) {
        g.decode(p, idx);
        double kx2 = 0.0, kxi2 = 0.0, mixed = 0.0;
        for (int i = 0; i < g.d; ++i) {
            const bool nx = idx[i] == g.n_x / 2;           // dead Nyquist axes
            const bool nxi = idx[g.d + i] == g.n_xi / 2;
            const double kx = nx ? 0.0 : g.freq(i, idx[i]);
            const double kxi = nxi ? 0.0 : g.freq(g.d + i, idx[g.d + i]);
            kx2 += kx * kx;
            kxi2 += kxi * kxi;
            mixed += kx * kxi;
        }
        spec[p] = base[p] * (-(c.D_pp * kxi2 + c.D_qq * kx2 + 2.0 * c.D_pq * mixed));
    }
    std::vector<cplx> v = fftops::inverse(g, spec);
    WignerField out = fftops::to_real(g, v, nullptr);

    if (c.D_f != 0.0) {
        // 2 D_f div_xi(xi w), conservative
        for (int i = 0; i < g.d; ++i) {
            const int a = g.d + i;
            WignerField prod(g);
            for_each_point(g, [&](std::size_t p, const double*, const double* xi) {
                prod[p] = xi[i] * w[p];
            });
            WignerField dp = spectral_derivative(prod, a);
            for (std::size_t p = 0; p < n; ++p) out[p] += 2.0 * c.D_f * dp[p];
        }
    }
    return out;
}

WignerField apply_L1eps(const WignerField& w, int m, const CutoffSpec& cut) {
    if (m < 0) throw ConfigError("apply_L1eps: m must be >= 0");
    const GridSpec& g = w.grid;
    GradLap gl = gradient_and_laplacian(w);
    const CoeffTables& t = coeff_tables(g);
    const std::vector<double> avals = a_values(g);
    WignerField out(g);
    const double dd = static_cast<double>(g.d);
    for_each_point(g, [&](std::size_t p, const double* x, const double* xi) {
        double conv = 0.0;
        if (m >= 1) {
            const double a = avals[p];
            const double fac = m * std::pow(a, m - 1) / (1.0 + std::pow(a, m));
            double gdot = 0.0;
            for (int ax = 0; ax < g.axes(); ++ax) gdot += t.gradA[ax][p] * gl.grad[ax][p];
            conv = fac * gdot;
        }
        out[p] = (dd * w[p] - conv) * cut.chi_eps_at(x, xi, g.d);
    });
    return out;
}

WignerField apply_L2eps(const WignerField& w, int m, const CutoffSpec& cut) {
    WignerField lw = apply_L(w);
    WignerField l1 = apply_L1eps(w, m, cut);
    for (std::size_t p = 0; p < w.size(); ++p) lw[p] -= l1[p];
    return lw;
}

// ---------------------------------------------------------------------------

double potential_U(int d, const double* x, const double* xi) {
    const QuadraticFormA& q = standard_form(d);
    double ga[4];
    q.grad_A(x, xi, ga);
    double g2 = 0.0;
    for (int a = 0; a < 2 * d; ++a) g2 += ga[a] * ga[a];
    return 0.5 * q.laplace_A() - 0.25 * g2;
}

WignerField groundstate_transform(const WignerField& w) {
    const GridSpec& g = w.grid;
    const QuadraticFormA& q = standard_form(g.d);
    WignerField v(g);
    bool underflow = false;
    for_each_point(g, [&](std::size_t p, const double* x, const double* xi) {
        const double half_a = 0.5 * (q.eval_A(x, xi) - q.log_norm_const());
        if (half_a > 700.0) underflow = true;
        v[p] = w[p] * std::exp(half_a);
    });
    if (underflow)
        throw OverflowError("groundstate_transform: sqrt(mu) underflows inside the box");
    return v;
}

WignerField groundstate_untransform(const WignerField& v) {
    const GridSpec& g = v.grid;
    const QuadraticFormA& q = standard_form(g.d);
    WignerField w(g);
    for_each_point(g, [&](std::size_t p, const double* x, const double* xi) {
        w[p] = v[p] * std::exp(-0.5 * (q.eval_A(x, xi) - q.log_norm_const()));
    });
    return w;
}

WignerField apply_H(const WignerField& v) {
    const GridSpec& g = v.grid;
    const CoeffTables& t = coeff_tables(g);
    GradLap gl = gradient_and_laplacian(v);
    WignerField divFv = conservative_div(v, t.F);
    WignerField out(g);
    for_each_point(g, [&](std::size_t p, const double* x, const double* xi) {
        double adv = 0.0;
        for (int a = 0; a < g.axes(); ++a) adv += t.F[a][p] * gl.grad[a][p];
        out[p] = gl.lap[p] + 0.5 * (adv + divFv[p]) + potential_U(g.d, x, xi) * v[p];
    });
    return out;
}

} // namespace wfp
