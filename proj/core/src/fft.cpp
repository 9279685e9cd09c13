#include "wfp/fft.hpp"
#include "wfp/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <list>
#include <mutex>

namespace wfp {
namespace fftops {

namespace {

std::mutex plan_mutex;

/// cached c2c plan pair for one transform layout; owns aligned buffers
struct PlanEntry {
    int rank = 0;
    int dims[4] = {0, 0, 0, 0};
    int howmany = 1;
    std::size_t total = 0;
    fftw_complex* buf = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
    std::mutex exec;

    ~PlanEntry() {
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
        if (buf) fftw_free(buf);
    }
};

PlanEntry& plan_for(int rank, const int* dims, int howmany) {
    static std::list<PlanEntry> cache;
    std::lock_guard<std::mutex> lock(plan_mutex);
    for (PlanEntry& e : cache) {
        if (e.rank == rank && e.howmany == howmany &&
            std::equal(dims, dims + rank, e.dims))
            return e;
    }
    cache.emplace_back();
    PlanEntry& e = cache.back();
    e.rank = rank;
    e.howmany = howmany;
    std::size_t n = 1;
    for (int i = 0; i < rank; ++i) {
        e.dims[i] = dims[i];
        n *= static_cast<std::size_t>(dims[i]);
    }
    e.total = n * howmany;
    e.buf = fftw_alloc_complex(e.total);
    const int idist = static_cast<int>(n);
    e.fwd = fftw_plan_many_dft(rank, e.dims, howmany, e.buf, nullptr, 1, idist,
                               e.buf, nullptr, 1, idist, FFTW_FORWARD, FFTW_ESTIMATE);
    e.bwd = fftw_plan_many_dft(rank, e.dims, howmany, e.buf, nullptr, 1, idist,
                               e.buf, nullptr, 1, idist, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!e.fwd || !e.bwd) throw DivergenceError("fftw plan creation failed");
    return e;
}

std::vector<cplx> run(PlanEntry& e, const cplx* in, bool forward, double scale) {
    std::lock_guard<std::mutex> lock(e.exec);
    std::memcpy(e.buf, in, e.total * sizeof(fftw_complex));
    fftw_execute(forward ? e.fwd : e.bwd);
    std::vector<cplx> out(e.total);
    const cplx* b = reinterpret_cast<const cplx*>(e.buf);
    if (scale == 1.0) {
        std::copy(b, b + e.total, out.begin());
    } else {
        for (std::size_t i = 0; i < e.total; ++i) out[i] = b[i] * scale;
    }
    return out;
}

void full_dims(const GridSpec& g, int* dims) {
    for (int a = 0; a < g.axes(); ++a) dims[a] = g.axis_n(a);
}

} // namespace

std::vector<cplx> forward(const WignerField& w) {
    std::vector<cplx> in(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) in[i] = w[i];
    return forward_c(w.grid, in);
}

std::vector<cplx> forward_c(const GridSpec& g, const std::vector<cplx>& in) {
    int dims[4];
    full_dims(g, dims);
    return run(plan_for(g.axes(), dims, 1), in.data(), true, 1.0);
}

std::vector<cplx> inverse(const GridSpec& g, const std::vector<cplx>& in) {
    int dims[4];
    full_dims(g, dims);
    return run(plan_for(g.axes(), dims, 1), in.data(), false,
               1.0 / static_cast<double>(g.size()));
}

std::vector<cplx> partial_forward_xi(const GridSpec& g, const std::vector<double>& in) {
    std::vector<cplx> cin(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) cin[i] = in[i];
    return partial_forward_xi_c(g, cin);
}

std::vector<cplx> partial_forward_xi_c(const GridSpec& g, const std::vector<cplx>& in) {
    int dims[2];
    int howmany = 1;
    for (int a = 0; a < g.d; ++a) howmany *= g.n_x;
    for (int a = 0; a < g.d; ++a) dims[a] = g.n_xi;
    return run(plan_for(g.d, dims, howmany), in.data(), true, 1.0);
}

std::vector<cplx> partial_inverse_xi(const GridSpec& g, const std::vector<cplx>& in) {
    int dims[2];
    int howmany = 1;
    for (int a = 0; a < g.d; ++a) howmany *= g.n_x;
    for (int a = 0; a < g.d; ++a) dims[a] = g.n_xi;
    std::size_t line = 1;
    for (int a = 0; a < g.d; ++a) line *= static_cast<std::size_t>(g.n_xi);
    return run(plan_for(g.d, dims, howmany), in.data(), false,
               1.0 / static_cast<double>(line));
}

WignerField to_real(const GridSpec& g, const std::vector<cplx>& v, double* residue) {
    WignerField out(g);
    double re2 = 0.0, im2 = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = v[i].real();
        re2 += v[i].real() * v[i].real();
        im2 += v[i].imag() * v[i].imag();
    }
    if (residue) *residue = (re2 > 0.0) ? std::sqrt(im2 / re2) : std::sqrt(im2);
    return out;
}

void mult_ik(const GridSpec& g, std::vector<cplx>& spec, int axis) {
    const int na = g.axes();
    const int n = g.axis_n(axis);
    // stride of this axis in the flat row-major layout
    std::size_t stride = 1;
    for (int a = na - 1; a > axis; --a) stride *= static_cast<std::size_t>(g.axis_n(a));
    const std::size_t total = g.size();
    for (std::size_t p = 0; p < total; ++p) {
        const int j = static_cast<int>((p / stride) % n);
        if (j == n / 2) {
            spec[p] = 0.0;  // unpaired Nyquist mode: zero for odd multipliers
        } else {
            const double k = g.freq(axis, j);
            spec[p] *= cplx(0.0, k);
        }
    }
}

void mult_minus_k2(const GridSpec& g, std::vector<cplx>& spec) {
    const int na = g.axes();
    const std::size_t total = g.size();
    int idx[4];
    for (std::size_t p = 0; p < total; ++p) {
        g.decode(p, idx);
        double k2 = 0.0;
        for (int a = 0; a < na; ++a) {
            if (idx[a] == g.axis_n(a) / 2) continue;  // dead Nyquist axis
            const double k = g.freq(a, idx[a]);
            k2 += k * k;
        }
        spec[p] *= -k2;
    }
}

} // namespace fftops

WignerField spectral_derivative(const WignerField& w, int axis) {
    std::vector<cplx> s = fftops::forward(w);
    fftops::mult_ik(w.grid, s, axis);
    s = fftops::inverse(w.grid, s);
    return fftops::to_real(w.grid, s, nullptr);
}

GradLap gradient_and_laplacian(const WignerField& w) {
    const GridSpec& g = w.grid;
    std::vector<cplx> base = fftops::forward(w);
    GradLap out;
    out.grad.reserve(g.axes());
    for (int a = 0; a < g.axes(); ++a) {
        std::vector<cplx> s = base;
        fftops::mult_ik(g, s, a);
        s = fftops::inverse(g, s);
        out.grad.push_back(fftops::to_real(g, s, nullptr));
    }
    std::vector<cplx> s = std::move(base);
    fftops::mult_minus_k2(g, s);
    s = fftops::inverse(g, s);
    out.lap = fftops::to_real(g, s, nullptr);
    return out;
}

} // namespace wfp
