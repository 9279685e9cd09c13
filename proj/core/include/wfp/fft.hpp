#pragma once

#include "wfp/grid.hpp"

#include <complex>
#include <vector>

namespace wfp {

using cplx = std::complex<double>;

/// Bare (unnormalized, no phase convention) DFTs on the phase-space grid.
/// These are enough for operators diagonal in grid frequencies: forward /
/// multiplier / inverse round trips cancel the node-offset phases exactly.
namespace fftops {

/// forward DFT over all 2d axes
std::vector<cplx> forward(const WignerField& w);
std::vector<cplx> forward_c(const GridSpec& g, const std::vector<cplx>& in);
/// inverse DFT over all axes, normalized by 1/N
std::vector<cplx> inverse(const GridSpec& g, const std::vector<cplx>& in);

/// forward/inverse DFT over the xi axes only (per x-line), batched
std::vector<cplx> partial_forward_xi(const GridSpec& g, const std::vector<double>& in);
std::vector<cplx> partial_forward_xi_c(const GridSpec& g, const std::vector<cplx>& in);
std::vector<cplx> partial_inverse_xi(const GridSpec& g, const std::vector<cplx>& in);

/// real part with an L2-relative imaginary residue estimate
WignerField to_real(const GridSpec& g, const std::vector<cplx>& v, double* residue);

/// spectrum *= i*k_axis (Nyquist bin of that axis zeroed)
void mult_ik(const GridSpec& g, std::vector<cplx>& spec, int axis);
/// spectrum *= -|k|^2 (all axes)
void mult_minus_k2(const GridSpec& g, std::vector<cplx>& spec);

} // namespace fftops

/// d/dz_a of a real field, spectral, returns a real field
WignerField spectral_derivative(const WignerField& w, int axis);

/// gradient over all axes plus total Laplacian, sharing one forward FFT
struct GradLap {
    std::vector<WignerField> grad;
    WignerField lap;
};
GradLap gradient_and_laplacian(const WignerField& w);

} // namespace wfp
