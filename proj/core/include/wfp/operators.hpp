#pragma once

#include "wfp/grid.hpp"

namespace wfp {

/// coefficients of the generalized quantum Fokker-Planck diffusion operator;
/// the normalized model is (1, 0, 1, 1)
struct DiffusionCoefficients {
    double D_pp = 1.0;
    double D_pq = 0.0;
    double D_f = 1.0;
    double D_qq = 1.0;
};

struct LindbladResult {
    bool pass;
    double margin;  // D_pp D_qq - (D_pq^2 + D_f^2/4)
};

/// D_pp >= 0 and D_pp D_qq - (D_pq^2 + D_f^2/4) >= 0
LindbladResult lindblad_check(const DiffusionCoefficients& c);

/// Smooth radial cutoff chi with chi = 1 on B_1(0), support in B_2(0) and
/// max |grad chi| = 4/3 <= sqrt(2); chi_eps(y) = chi(eps y). The transition
/// is a C^1 piecewise-quadratic ramp, which satisfies every property the
/// estimates use.
struct CutoffSpec {
    double epsilon;

    /// validates Eq.-level admissibility: eps <= min(1/(12 sqrt(m)), 1/24)
    CutoffSpec(double eps, int m);
    static double max_epsilon(int m);

    double chi(double r) const;       // profile in the unscaled radius
    double dchi(double r) const;      // radial derivative of the profile
    double chi_eps_at(const double* x, const double* xi, int d) const;
    static constexpr double grad_bound() { return 4.0 / 3.0; }
};

// ---------------------------------------------------------------------------
// matrix-free generator applications (spectral derivatives; divergence terms
// in conservative form so quadrature mass is annihilated exactly)
// ---------------------------------------------------------------------------

/// L w = -xi.grad_x w + x.grad_xi w + Lap_xi w + 2 div_xi(xi w) + Lap_x w
WignerField apply_L(const WignerField& w);
/// symmetric part div(grad w + w grad A)
WignerField apply_Ls(const WignerField& w);
/// anti-symmetric part div(F w)
WignerField apply_Las(const WignerField& w);

/// generalized diffusion operator Q (no transport terms)
WignerField apply_Q(const WignerField& w, const DiffusionCoefficients& c);

/// bounded piece of the resolvent split:
/// L1 w = (d w - nu_m grad(nu_m^{-1}) . grad w) chi_eps
WignerField apply_L1eps(const WignerField& w, int m, const CutoffSpec& cut);
/// complement L2 = L - L1
WignerField apply_L2eps(const WignerField& w, int m, const CutoffSpec& cut);

// ---------------------------------------------------------------------------
// ground-state transform
// ---------------------------------------------------------------------------

/// v = w / sqrt(mu); flags points where sqrt(mu) underflows
WignerField groundstate_transform(const WignerField& w);
/// w = sqrt(mu) v
WignerField groundstate_untransform(const WignerField& v);
/// H v = Lap v + F.grad v + U v with U = d - |grad A|^2/4; the advection
/// term uses the split form (div(Fv) + F.grad v)/2, which is exactly
/// antisymmetric on the grid
WignerField apply_H(const WignerField& v);
/// U(x, xi) = (1/2) Lap A - (1/4)|grad A|^2
double potential_U(int d, const double* x, const double* xi);

} // namespace wfp
