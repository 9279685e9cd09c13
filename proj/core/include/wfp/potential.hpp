#pragma once

#include "wfp/grid.hpp"

#include <functional>
#include <string>
#include <vector>

namespace wfp {

enum class PotentialKind { none, sinusoidal, gaussian_bump, tabulated };

/// V(x) = |x|^2/2 + lambda * V0(x). This type carries lambda and V0; the
/// harmonic part lives inside the unperturbed generator.
struct PotentialSpec {
    double lambda = 0.0;
    PotentialKind kind = PotentialKind::none;

    // sinusoidal: V0 = amp * sin(k0 . x)
    std::vector<double> k0;
    // gaussian_bump: V0 = amp * exp(-|x - center|^2 / (2 width^2))
    std::vector<double> center;
    double width = 1.0;
    double amp = 0.0;
    // tabulated (d = 1): samples on the x-grid of the box it was built for
    std::vector<double> samples;
    double tab_x_max = 0.0;

    static PotentialSpec none_potential(double lambda = 0.0);
    static PotentialSpec sinusoidal(int d, double lambda, const std::vector<double>& k0,
                                    double amp);
    static PotentialSpec gaussian_bump(int d, double lambda, const std::vector<double>& center,
                                       double width, double amp);
    static PotentialSpec tabulated(double lambda, const std::vector<double>& samples,
                                   double x_max);

    int dim() const { return dim_; }
    double eval_V0(const double* x) const;
    /// sup-norms ||d^j V0||_inf for 0 <= j <= j_max (max over multi-indices
    /// of each total order); analytic for the built-in kinds, spectral for
    /// tabulated. Entries must be finite (condition Gamma_m < inf).
    std::vector<double> deriv_sup(int j_max) const;

    /// snap sinusoidal wave vectors to even multiples of the xi spacing so
    /// the induced xi-shifts by k0/2 are exact grid shifts
    PotentialSpec snapped_to(const GridSpec& g) const;
    bool shifts_exact_on(const GridSpec& g) const;

    std::string kind_name() const;

private:
    int dim_ = 1;
};

/// symbol deltaV(x, eta) = V0(x + eta/2) - V0(x - eta/2)
double delta_V(const PotentialSpec& spec, const double* x, const double* eta);

/// Theta[V0] w = -i F^{-1}_{eta->xi}( deltaV(x,eta) . F_{xi->eta} w ),
/// partial Fourier transform in xi only. Real input gives real output; the
/// imaginary residue is checked against 1e-8 and discarded.
WignerField apply_theta(const WignerField& w, const PotentialSpec& spec);

/// same operator with a caller-supplied symbol deltaV(x, eta)
using SymbolFn = std::function<double(const double* x, const double* eta)>;
WignerField apply_theta_symbol(const WignerField& w, const SymbolFn& symbol);

/// direct double-sum discretization of the Theta integral; the oracle for
/// apply_theta. Refuses grids with more than 2^20 points.
WignerField apply_theta_quadrature(const WignerField& w, const PotentialSpec& spec);

/// power-iteration estimate of ||Theta[V0]||_{B(H_m)} on the grid (a lower
/// bound on the discrete operator norm)
double gamma_m_estimate(const GridSpec& g, const PotentialSpec& spec, int m);

/// conservative analytic bound Gamma_m from the Leibniz expansion of the
/// symbol derivatives; >= the discrete estimate by construction
double gamma_m_bound(const PotentialSpec& spec, int m, int d);

/// cached per-grid application of one potential (precomputed symbol table);
/// used by the propagator and the steady-state iteration
class ThetaOp {
public:
    ThetaOp(const GridSpec& g, const PotentialSpec& spec);
    WignerField apply(const WignerField& w) const;
    /// exact flow of dw/dt = -lambda Theta[V0] w over time tau (diagonal
    /// phase factor in the (x, eta) representation)
    WignerField exact_substep(const WignerField& w, double tau) const;
    const PotentialSpec& spec() const { return spec_; }

private:
    GridSpec grid_;
    PotentialSpec spec_;
    std::vector<double> symbol_;  // deltaV(x_i, eta_j), Nyquist rows zeroed
};

} // namespace wfp
