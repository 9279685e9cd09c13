#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace wfp {

/// Uniform truncated phase-space box [-x_max,x_max)^d x [-xi_max,xi_max)^d
/// with periodic boundary conditions. Grid points sit at -L + i*h, so the
/// equal-weight quadrature below is the midpoint rule for the cells centred
/// at the nodes (= periodic trapezoid rule, spectrally accurate for fields
/// that decay below roundoff at the box edge).
struct GridSpec {
    int d = 1;
    int n_x = 128;
    int n_xi = 128;
    double x_max = 12.0;
    double xi_max = 12.0;
    double dx = 0.0;
    double dxi = 0.0;

    /// Validates and fills the derived spacings. Throws ConfigError when
    /// n < 8 / odd, the box is degenerate, or the steady-state tail mass
    /// outside the box exceeds 1e-10.
    static GridSpec make(int d, int n_x, int n_xi, double x_max, double xi_max);
    static GridSpec make_default(int d = 1) { return make(d, 128, 128, 12.0, 12.0); }

    int axes() const { return 2 * d; }
    int axis_n(int a) const { return a < d ? n_x : n_xi; }
    double axis_half_width(int a) const { return a < d ? x_max : xi_max; }
    double axis_h(int a) const { return a < d ? dx : dxi; }
    /// physical coordinate of node i along axis a
    double coord(int a, int i) const { return -axis_half_width(a) + i * axis_h(a); }
    /// FFT frequency of bin j along axis a (bins [0,n/2) positive, [n/2,n) negative)
    double freq(int a, int j) const;

    std::size_t size() const;
    double cell_volume() const;

    /// decode flat row-major index (axis 0 slowest) into per-axis indices
    void decode(std::size_t flat, int* idx) const;

    bool operator==(const GridSpec&) const = default;
};

/// Real-valued Wigner function samples w(x_i, xi_j) in row-major order.
struct WignerField {
    GridSpec grid;
    std::vector<double> values;

    WignerField() = default;
    explicit WignerField(const GridSpec& g) : grid(g), values(g.size(), 0.0) {}

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
    std::size_t size() const { return values.size(); }

    /// throws InvariantError on non-finite entries or length mismatch
    void validate() const;
};

/// The quadratic form A(x,xi) = (1/4)(|x|^2 + 2 x.xi + 3|xi|^2) together
/// with the Gaussian steady state mu = c exp(-A) and its convexity constant
/// sigma (smallest eigenvalue of Hess A). The per-pair 2x2 coefficient
/// matrix is a constructor parameter; the normalized form above is the
/// built-in default.
class QuadraticFormA {
public:
    /// pair_matrix M: A = (1/4) sum_i (x_i,xi_i)^T M (x_i,xi_i)
    QuadraticFormA(int d, const std::array<double, 4>& pair_matrix);
    static QuadraticFormA standard(int d) { return QuadraticFormA(d, {1.0, 1.0, 1.0, 3.0}); }

    int dim() const { return d_; }
    double sigma() const { return sigma_; }
    double norm_const() const { return c_; }       // c with integral(mu) = 1
    double log_norm_const() const { return log_c_; }
    /// marginal variances of mu along an x axis resp. xi axis
    double var_x() const { return var_x_; }
    double var_xi() const { return var_xi_; }

    double eval_A(const double* x, const double* xi) const;
    double eval_mu(const double* x, const double* xi) const;
    /// gradient (d/dx, d/dxi), 2d components
    void grad_A(const double* x, const double* xi, double* out) const;
    double laplace_A() const;  // constant for a quadratic form
    /// rotation field F = (-xi, x+2xi) - grad A, 2d components
    void eval_F(const double* x, const double* xi, double* out) const;

    /// Gaussian tail mass of mu outside the box (union bound over the
    /// marginals, evaluated with erfc).
    double tail_mass(double x_max, double xi_max) const;

private:
    int d_;
    std::array<double, 4> m_;  // row-major 2x2
    double sigma_, c_, log_c_, var_x_, var_xi_;
};

/// convenience: the standard form for the grid's dimension
const QuadraticFormA& standard_form(int d);

// ---------------------------------------------------------------------------
// quadrature and weighted norms
// ---------------------------------------------------------------------------

/// equal-weight quadrature of w over the box, compensated summation,
/// deterministic order
double mass(const WignerField& w);

double norm_L2(const WignerField& w);
double inner_L2(const WignerField& f, const WignerField& g);

/// H_m norm: sqrt( sum w^2 (1 + A^m) dV ), m >= 0 (m = 0 gives weight 2)
double norm_Hm(const WignerField& w, int m);
double inner_Hm(const WignerField& f, const WignerField& g, int m);
double dist_Hm(const WignerField& f, const WignerField& g, int m);

/// H norm: sqrt( sum w^2 exp(A)/c dV ), accumulated in log domain.
/// a_cut < inf restricts to the region A <= a_cut (the representable-weight
/// diagnostic used for transient runs). Throws OverflowError if the result
/// leaves the double range.
double norm_H(const WignerField& w, double a_cut);
/// H inner product sum f g exp(A)/c dV over A <= a_cut; direct product
/// accumulation, so both fields must decay against the Gaussian weight
double inner_H(const WignerField& f, const WignerField& g, double a_cut);
inline double norm_H(const WignerField& w) { return norm_H(w, 1e300); }
double dist_H(const WignerField& f, const WignerField& g, double a_cut);

/// max |w| over the outer 10% shell of the box, relative to max |w|
double shell_residual(const WignerField& w);

/// precomputed weight (1 + A^m) on the grid
std::vector<double> hm_weight(const GridSpec& g, int m);
/// A evaluated on the grid
std::vector<double> a_values(const GridSpec& g);

// ---------------------------------------------------------------------------
// standard fields
// ---------------------------------------------------------------------------

WignerField sample_mu(const GridSpec& g);
/// mu displaced by (shift_x, shift_xi) per pair, renormalized to unit mass
WignerField displaced_gaussian(const GridSpec& g, double shift_x, double shift_xi);
/// deterministic band-limited random field damped by exp(-envelope_pow * A)
/// so that it decays at the box edge (envelope_pow = 0 disables the
/// envelope); normalized to unit L2 norm
WignerField random_field(const GridSpec& g, std::uint64_t seed, double band_frac,
                         double envelope_pow);

/// low-discrepancy points in the box (R2 sequence), 2d coords per point
std::vector<double> quasi_random_points(const GridSpec& g, std::size_t count);

} // namespace wfp
