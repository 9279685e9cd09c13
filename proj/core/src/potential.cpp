#include "wfp/potential.hpp"
#include "wfp/detail/pointwise.hpp"
#include "wfp/errors.hpp"
#include "wfp/fft.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace wfp {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r *= static_cast<double>(n - k + i) / i;
    return r;
}

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

/// max_v |He_j(v)| exp(-v^2/2), probabilists' Hermite, dense scan
double hermite_gauss_max(int j) {
    double best = 0.0;
    const double vmax = std::sqrt(2.0 * j + 9.0) + 3.0;
    const int steps = 200000;
    for (int s = 0; s <= steps; ++s) {
        const double v = vmax * s / steps;
        double h0 = 1.0, h1 = v;
        if (j == 0) h1 = 1.0;
        for (int i = 1; i < j; ++i) {
            const double h2 = v * h1 - i * h0;
            h0 = h1;
            h1 = h2;
        }
        best = std::max(best, std::abs(h1) * std::exp(-0.5 * v * v));
    }
    return best;
}

} // namespace

PotentialSpec PotentialSpec::none_potential(double lambda) {
    PotentialSpec s;
    s.lambda = lambda;
    s.kind = PotentialKind::none;
    return s;
}

PotentialSpec PotentialSpec::sinusoidal(int d, double lambda, const std::vector<double>& k0,
                                        double amp) {
    if (static_cast<int>(k0.size()) != d)
        throw ConfigError("sinusoidal potential: k0 needs one component per dimension");
    PotentialSpec s;
    s.dim_ = d;
    s.lambda = lambda;
    s.kind = PotentialKind::sinusoidal;
    s.k0 = k0;
    s.amp = amp;
    return s;
}

PotentialSpec PotentialSpec::gaussian_bump(int d, double lambda,
                                           const std::vector<double>& center, double width,
                                           double amp) {
    if (static_cast<int>(center.size()) != d)
        throw ConfigError("gaussian_bump potential: center needs one component per dimension");
    if (!(width > 0.0)) throw ConfigError("gaussian_bump potential: width must be positive");
    PotentialSpec s;
    s.dim_ = d;
    s.lambda = lambda;
    s.kind = PotentialKind::gaussian_bump;
    s.center = center;
    s.width = width;
    s.amp = amp;
    return s;
}

PotentialSpec PotentialSpec::tabulated(double lambda, const std::vector<double>& samples,
                                       double x_max) {
    if (samples.size() < 8 || samples.size() % 2 != 0)
        throw ConfigError("tabulated potential: need an even sample count >= 8");
    if (!(x_max > 0.0)) throw ConfigError("tabulated potential: x_max must be positive");
    double vmax = 0.0;
    for (double v : samples) {
        if (!std::isfinite(v)) throw ConfigError("tabulated potential: non-finite sample");
        vmax = std::max(vmax, std::abs(v));
    }
    // decay check at the box edge (first/last 5% of samples)
    const std::size_t edge = std::max<std::size_t>(1, samples.size() / 20);
    double emax = 0.0;
    for (std::size_t i = 0; i < edge; ++i) {
        emax = std::max(emax, std::abs(samples[i]));
        emax = std::max(emax, std::abs(samples[samples.size() - 1 - i]));
    }
    if (vmax > 0.0 && emax > 1e-8 * vmax)
        throw ConfigError("tabulated potential: samples do not decay below 1e-8 at the box edge");
    PotentialSpec s;
    s.dim_ = 1;
    s.lambda = lambda;
    s.kind = PotentialKind::tabulated;
    s.samples = samples;
    s.tab_x_max = x_max;
    s.amp = 1.0;
    return s;
}

namespace {

/// trigonometric interpolation of periodic samples on [-L, L), direct sum
double trig_eval(const std::vector<double>& samples, double L, double x) {
    const int n = static_cast<int>(samples.size());
    // DFT once per call chain would be better; n <= 512 keeps this cheap
    // and the call sites cache the symbol table anyway.
    const double h = 2.0 * L / n;
    // evaluate via the Dirichlet-kernel form of the interpolant
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
        const double xj = -L + j * h;
        double t = kPi * (x - xj) / (2.0 * L);
        // periodic sinc weight for even n
        double w;
        const double st = std::sin(t);
        if (std::abs(st) < 1e-14) {
            w = 1.0;
        } else {
            w = std::sin(n * t) / (n * std::tan(t));
        }
        acc += samples[j] * w;
    }
    return acc;
}

} // namespace

double PotentialSpec::eval_V0(const double* x) const {
    switch (kind) {
        case PotentialKind::none:
            return 0.0;
        case PotentialKind::sinusoidal: {
            double ph = 0.0;
            for (int i = 0; i < dim_; ++i) ph += k0[i] * x[i];
            return amp * std::sin(ph);
        }
        case PotentialKind::gaussian_bump: {
            double q = 0.0;
            for (int i = 0; i < dim_; ++i) {
                const double u = x[i] - center[i];
                q += u * u;
            }
            return amp * std::exp(-q / (2.0 * width * width));
        }
        case PotentialKind::tabulated:
            return trig_eval(samples, tab_x_max, x[0]);
    }
    return 0.0;
}

std::vector<double> PotentialSpec::deriv_sup(int j_max) const {
    std::vector<double> out(j_max + 1, 0.0);
    switch (kind) {
        case PotentialKind::none:
            break;
        case PotentialKind::sinusoidal: {
            double kmax = 0.0;
            for (double k : k0) kmax = std::max(kmax, std::abs(k));
            double p = std::abs(amp);
            for (int j = 0; j <= j_max; ++j) {
                out[j] = p;
                p *= kmax;
            }
            break;
        }
        case PotentialKind::gaussian_bump: {
            for (int j = 0; j <= j_max; ++j)
                out[j] = std::abs(amp) * hermite_gauss_max(j) / std::pow(width, j);
            break;
        }
        case PotentialKind::tabulated: {
            const int n = static_cast<int>(samples.size());
            const int over = 4;  // evaluate the sup on a refined grid
            GridSpec gx;  // 1-D helper grid for the spectral differentiation
            gx.d = 1;
            gx.n_x = 1;
            gx.n_xi = n;
            gx.x_max = 1.0;
            gx.xi_max = tab_x_max;
            gx.dx = 2.0;
            gx.dxi = 2.0 * tab_x_max / n;
            GridSpec gfine = gx;
            gfine.n_xi = over * n;
            gfine.dxi = gx.dxi / over;
            std::vector<cplx> spec = fftops::partial_forward_xi(gx, samples);
            for (int j = 0; j <= j_max; ++j) {
                std::vector<cplx> s(static_cast<std::size_t>(over) * n, 0.0);
                for (int b = 0; b < n; ++b) {
                    if (b == n / 2) continue;  // unpaired Nyquist bin
                    const double k = gx.freq(1, b);
                    const int fb = b < n / 2 ? b : b + (over - 1) * n;
                    s[fb] = spec[b] * std::pow(cplx(0.0, k), j);
                }
                std::vector<cplx> v = fftops::partial_inverse_xi(gfine, s);
                double m = 0.0;
                for (const cplx& c : v) m = std::max(m, std::abs(c.real()));
                out[j] = m * over;  // undo the padded 1/(over n) normalization
            }
            break;
        }
    }
    for (double v : out)
        if (!std::isfinite(v) || v < 0.0)
            throw InvariantError("deriv_sup: entries must be finite and nonnegative");
    return out;
}

PotentialSpec PotentialSpec::snapped_to(const GridSpec& g) const {
    if (kind != PotentialKind::sinusoidal) return *this;
    PotentialSpec s = *this;
    for (double& k : s.k0) {
        const double unit = 2.0 * g.dxi;
        double snapped = std::round(k / unit) * unit;
        if (snapped == 0.0 && k != 0.0) snapped = (k > 0 ? unit : -unit);
        k = snapped;
    }
    return s;
}

bool PotentialSpec::shifts_exact_on(const GridSpec& g) const {
    if (kind != PotentialKind::sinusoidal) return false;
    for (double k : k0) {
        const double steps = 0.5 * k / g.dxi;
        if (std::abs(steps - std::round(steps)) > 1e-9) return false;
    }
    return true;
}

std::string PotentialSpec::kind_name() const {
    switch (kind) {
        case PotentialKind::none: return "none";
        case PotentialKind::sinusoidal: return "sinusoidal";
        case PotentialKind::gaussian_bump: return "gaussian_bump";
        case PotentialKind::tabulated: return "tabulated";
    }
    return "?";
}

double delta_V(const PotentialSpec& spec, const double* x, const double* eta) {
    double xp[2], xm[2];
    for (int i = 0; i < spec.dim(); ++i) {
        xp[i] = x[i] + 0.5 * eta[i];
        xm[i] = x[i] - 0.5 * eta[i];
    }
    return spec.eval_V0(xp) - spec.eval_V0(xm);
}

// ---------------------------------------------------------------------------
// Theta application
// ---------------------------------------------------------------------------

namespace {

/// table of deltaV(x_i, eta_j) over the full grid; eta rows containing an
/// unpaired Nyquist bin are zeroed so odd symbols keep real fields real
std::vector<double> symbol_table(const GridSpec& g, const SymbolFn& symbol) {
    std::vector<double> tab(g.size());
    const int na = g.axes();
    int idx[4];
    double x[2], eta[2];
    for (std::size_t p = 0; p < g.size(); ++p) {
        g.decode(p, idx);
        bool nyq = false;
        for (int a = 0; a < na; ++a) {
            if (a < g.d) {
                x[a] = g.coord(a, idx[a]);
            } else {
                if (idx[a] == g.axis_n(a) / 2) nyq = true;
                eta[a - g.d] = g.freq(a, idx[a]);
            }
        }
        tab[p] = nyq ? 0.0 : symbol(x, eta);
    }
    return tab;
}

WignerField apply_with_table(const WignerField& w, const std::vector<double>& tab) {
    const GridSpec& g = w.grid;
    std::vector<cplx> spec = fftops::partial_forward_xi(g, w.values);
    for (std::size_t p = 0; p < spec.size(); ++p)
        spec[p] *= cplx(0.0, -tab[p]);
    spec = fftops::partial_inverse_xi(g, spec);
    double residue = 0.0;
    WignerField out = fftops::to_real(g, spec, &residue);
    if (residue > 1e-8)
        throw InvariantError("apply_theta: imaginary residue " + std::to_string(residue) +
                             " exceeds 1e-8 (grid too coarse for this potential)");
    return out;
}

} // namespace

WignerField apply_theta_symbol(const WignerField& w, const SymbolFn& symbol) {
    return apply_with_table(w, symbol_table(w.grid, symbol));
}

WignerField apply_theta(const WignerField& w, const PotentialSpec& spec) {
    if (spec.kind == PotentialKind::none || spec.amp == 0.0) return WignerField(w.grid);
    if (spec.dim() != w.grid.d)
        throw ConfigError("apply_theta: potential dimension does not match the grid");
    return apply_theta_symbol(
        w, [&spec](const double* x, const double* eta) { return delta_V(spec, x, eta); });
}

WignerField apply_theta_quadrature(const WignerField& w, const PotentialSpec& spec) {
    const GridSpec& g = w.grid;
    if (g.size() > (1u << 20))
        throw ConfigError("apply_theta_quadrature: grid larger than 2^20 points");
    if (spec.kind == PotentialKind::none || spec.amp == 0.0) return WignerField(g);

    const int d = g.d;
    const std::size_t nxi_line = [&] {
        std::size_t s = 1;
        for (int a = 0; a < d; ++a) s *= static_cast<std::size_t>(g.n_xi);
        return s;
    }();
    const std::size_t nx_lines = g.size() / nxi_line;

    // per-axis coordinates and frequencies
    std::vector<double> xi_c(g.n_xi), eta_c(g.n_xi);
    for (int j = 0; j < g.n_xi; ++j) {
        xi_c[j] = g.coord(d, j);
        eta_c[j] = g.freq(d, j);
    }

    double dxi_d = 1.0, deta_d = 1.0;
    for (int a = 0; a < d; ++a) {
        dxi_d *= g.dxi;
        deta_d *= kPi / g.xi_max;
    }
    const double pref = dxi_d * deta_d / std::pow(2.0 * kPi, d);

    WignerField out(g);
    int etad[2];
    double xpt[2], epts[2];
    for (std::size_t lx = 0; lx < nx_lines; ++lx) {
        // decode the x multi-index of this line
        std::size_t r = lx;
        for (int a = d - 1; a >= 0; --a) {
            xpt[a] = g.coord(a, static_cast<int>(r % g.n_x));
            r /= g.n_x;
        }
        const double* wline = w.values.data() + lx * nxi_line;

        // what(eta_j) = sum_k' w(xi_k') exp(-i xi_k'.eta_j)
        std::vector<cplx> what(nxi_line, 0.0);
        for (std::size_t j = 0; j < nxi_line; ++j) {
            std::size_t rj = j;
            bool nyq = false;
            for (int a = d - 1; a >= 0; --a) {
                etad[a] = static_cast<int>(rj % g.n_xi);
                if (etad[a] == g.n_xi / 2) nyq = true;
                epts[a] = eta_c[etad[a]];
                rj /= g.n_xi;
            }
            if (nyq) continue;
            cplx acc = 0.0;
            for (std::size_t kp = 0; kp < nxi_line; ++kp) {
                std::size_t rk = kp;
                double ph = 0.0;
                for (int a = d - 1; a >= 0; --a) {
                    ph += xi_c[rk % g.n_xi] * epts[a];
                    rk /= g.n_xi;
                }
                acc += wline[kp] * cplx(std::cos(ph), -std::sin(ph));
            }
            what[j] = acc * delta_V(spec, xpt, epts);
        }

        // out(xi_k) = Re[ -i pref sum_j what_j exp(+i xi_k.eta_j) ]
        for (std::size_t k = 0; k < nxi_line; ++k) {
            std::size_t rk = k;
            double xiv[2];
            for (int a = d - 1; a >= 0; --a) {
                xiv[a] = xi_c[rk % g.n_xi];
                rk /= g.n_xi;
            }
            cplx acc = 0.0;
            for (std::size_t j = 0; j < nxi_line; ++j) {
                if (what[j] == cplx(0.0)) continue;
                std::size_t rj = j;
                double ph = 0.0;
                for (int a = d - 1; a >= 0; --a) {
                    ph += xiv[a] * eta_c[rj % g.n_xi];
                    rj /= g.n_xi;
                }
                acc += what[j] * cplx(std::cos(ph), std::sin(ph));
            }
            out.values[lx * nxi_line + k] = (cplx(0.0, -pref) * acc).real();
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// operator norms
// ---------------------------------------------------------------------------

double gamma_m_estimate(const GridSpec& g, const PotentialSpec& spec, int m) {
    if (m < 0) throw ConfigError("gamma_m_estimate: m must be >= 0");
    if (spec.kind == PotentialKind::none || spec.amp == 0.0) return 0.0;
    const std::vector<double> wgt = hm_weight(g, m);
    WignerField v = random_field(g, 20240901u, 0.5, 1.0);

    auto hm_norm = [&](const WignerField& f) {
        detail::Kahan acc;
        for (std::size_t i = 0; i < f.size(); ++i) acc.add(f[i] * f[i] * wgt[i]);
        return std::sqrt(acc.sum() * g.cell_volume());
    };

    double est = 0.0;
    double prev = -1.0;
    const int max_iter = 500;
    for (int it = 0; it < max_iter; ++it) {
        WignerField tv = apply_theta(v, spec);
        const double num = hm_norm(tv), den = hm_norm(v);
        if (den == 0.0) return 0.0;
        est = num / den;
        if (prev >= 0.0 && std::abs(est - prev) <= 1e-6 * std::max(est, 1e-300)) return est;
        if (it >= 50) return est;  // accepted lower bound
        prev = est;
        // one step of power iteration on Theta*_m Theta_m
        for (std::size_t i = 0; i < tv.size(); ++i) tv[i] *= wgt[i];
        WignerField bv = apply_theta(tv, spec);
        double nrm = 0.0;
        for (std::size_t i = 0; i < bv.size(); ++i) {
            bv[i] = -bv[i] / wgt[i];
            nrm = std::max(nrm, std::abs(bv[i]));
        }
        if (!(nrm > 0.0) || !std::isfinite(nrm))
            throw DivergenceError("gamma_m_estimate: power iteration degenerated");
        for (std::size_t i = 0; i < bv.size(); ++i) bv[i] /= nrm;
        v = std::move(bv);
    }
    throw DivergenceError("gamma_m_estimate: no convergence after 500 iterations");
}

double gamma_m_bound(const PotentialSpec& spec, int m, int d) {
    if (m < 0) throw ConfigError("gamma_m_bound: m must be >= 0");
    const std::vector<double> D = spec.deriv_sup(m);
    if (m == 0) return 2.0 * D[0];

    // sum over j of C(m,j) * sum_{|n|=j} multinom(j,n) (sum_{k<=n} C(n,k) 2^{1-|k|} D_{|k|})^2,
    // the Leibniz expansion of |d_eta^n (deltaV what)| with |d^k deltaV| <= 2^{1-|k|} D_k
    double total = 4.0 * D[0] * D[0];  // plain L2 part of the weight 1 + |z|^{2m}
    for (int j = 0; j <= m; ++j) {
        double tj = 0.0;
        if (d == 1) {
            double inner = 0.0;
            for (int k = 0; k <= j; ++k)
                inner += binom(j, k) * std::pow(2.0, 1 - k) * D[k];
            tj = inner * inner;
        } else {
            for (int n1 = 0; n1 <= j; ++n1) {
                const int n2 = j - n1;
                const double multi = factorial(j) / (factorial(n1) * factorial(n2));
                double inner = 0.0;
                for (int k1 = 0; k1 <= n1; ++k1)
                    for (int k2 = 0; k2 <= n2; ++k2)
                        inner += binom(n1, k1) * binom(n2, k2) *
                                 std::pow(2.0, 1 - k1 - k2) * D[k1 + k2];
                tj += multi * inner * inner;
            }
        }
        total += binom(m, j) * tj;
    }
    // norm equivalence 1 + A^m <-> 1 + (|x|^2+|xi|^2)^m costs 12^{m/2}
    return std::sqrt(std::pow(12.0, m) * total);
}

// ---------------------------------------------------------------------------
// ThetaOp
// ---------------------------------------------------------------------------

ThetaOp::ThetaOp(const GridSpec& g, const PotentialSpec& spec) : grid_(g), spec_(spec) {
    if (spec.kind != PotentialKind::none && spec.dim() != g.d)
        throw ConfigError("ThetaOp: potential dimension does not match the grid");
    symbol_ = symbol_table(
        g, [&](const double* x, const double* eta) { return delta_V(spec_, x, eta); });
    if (spec.kind == PotentialKind::none || spec.amp == 0.0)
        std::fill(symbol_.begin(), symbol_.end(), 0.0);
}

WignerField ThetaOp::apply(const WignerField& w) const {
    if (!(w.grid == grid_)) throw InvariantError("ThetaOp: grid mismatch");
    return apply_with_table(w, symbol_);
}

WignerField ThetaOp::exact_substep(const WignerField& w, double tau) const {
    if (!(w.grid == grid_)) throw InvariantError("ThetaOp: grid mismatch");
    std::vector<cplx> spec = fftops::partial_forward_xi(grid_, w.values);
    const double lt = spec_.lambda * tau;
    for (std::size_t p = 0; p < spec.size(); ++p) {
        const double ph = lt * symbol_[p];
        spec[p] *= cplx(std::cos(ph), std::sin(ph));
    }
    spec = fftops::partial_inverse_xi(grid_, spec);
    double residue = 0.0;
    WignerField out = fftops::to_real(grid_, spec, &residue);
    if (residue > 1e-8)
        throw InvariantError("theta substep: imaginary residue exceeds 1e-8");
    return out;
}

} // namespace wfp
