#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wfp/errors.hpp"
#include "wfp/fft.hpp"
#include "wfp/grid.hpp"
#include "wfp/operators.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace wfp;
using namespace wfp::testing;

TEST_CASE("lindblad condition") {
    auto r = lindblad_check({1, 0, 1, 1});
    CHECK(r.pass);
    CHECK(r.margin == doctest::Approx(0.75));

    r = lindblad_check({1, 0, 1, 0});  // classical kinetic Fokker-Planck
    CHECK_FALSE(r.pass);
    CHECK(r.margin == doctest::Approx(-0.25));

    r = lindblad_check({0, 0, 0, 0});
    CHECK(r.pass);
    CHECK(r.margin == 0.0);
}

TEST_CASE("L annihilates mu") {
    const GridSpec g = GridSpec::make_default(1);
    const WignerField mu = sample_mu(g);
    WignerField lmu = apply_L(mu);
    CHECK(norm_L2(lmu) / norm_L2(mu) < 1e-6);
    CHECK(max_abs(lmu) < 1e-6 * max_abs(mu));

    WignerField zero(g);
    CHECK(max_abs(apply_L(zero)) == 0.0);
}

TEST_CASE("split L = Ls + Las and kernel of both parts") {
    const GridSpec g = GridSpec::make(1, 64, 64, 12, 12);
    const WignerField mu = sample_mu(g);
    CHECK(norm_L2(apply_Ls(mu)) / norm_L2(mu) < 1e-6);
    CHECK(norm_L2(apply_Las(mu)) / norm_L2(mu) < 1e-6);

    for (std::uint64_t seed : {5u, 6u, 7u}) {
        const WignerField w = random_field(g, seed, 0.4, 0.5);
        WignerField lw = apply_L(w);
        WignerField ls = apply_Ls(w);
        WignerField las = apply_Las(w);
        double worst = 0.0;
        for (std::size_t p = 0; p < w.size(); ++p)
            worst = std::max(worst, std::abs(lw[p] - ls[p] - las[p]));
        CHECK(worst / max_abs(lw) < 1e-10);
    }
}

TEST_CASE("mass annihilation for every field") {
    const GridSpec g = GridSpec::make(1, 64, 64, 12, 12);
    for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
        // even fields without decay: conservative form still kills the mass
        const WignerField w = random_field(g, seed, 0.5, seed % 2 ? 0.5 : 0.0);
        CHECK(std::abs(mass(apply_L(w))) < 1e-10);
        CHECK(std::abs(mass(apply_Q(w, {1, 0.3, 0.7, 1.2}))) < 1e-10);
    }
}

TEST_CASE("anti-symmetry of Las in H_m") {
    const GridSpec g = GridSpec::make(1, 64, 64, 12, 12);
    for (int m : {0, 2, 4}) {
        for (std::uint64_t seed : {11u, 12u, 13u}) {
            const WignerField w = random_field(g, seed, 0.4, 1.0);
            const double ip = inner_Hm(apply_Las(w), w, m);
            const double n2 = inner_Hm(w, w, m);
            CHECK(std::abs(ip) / n2 < 1e-8);
        }
    }
}

TEST_CASE("dissipativity of Ls and L in H") {
    const GridSpec g = GridSpec::make(1, 64, 64, 12, 12);
    const WignerField mu = sample_mu(g);
    // polynomial-times-mu fields stay representable under the 1/mu weight
    auto poly_field = [&](auto&& poly) {
        WignerField w(g);
        for (int i = 0; i < g.n_x; ++i)
            for (int j = 0; j < g.n_xi; ++j) {
                const double x = g.coord(0, i), xi = g.coord(1, j);
                w[i * g.n_xi + j] = mu[i * g.n_xi + j] * poly(x, xi);
            }
        return w;
    };
    std::vector<WignerField> fields;
    fields.push_back(poly_field([](double x, double) { return x; }));
    fields.push_back(poly_field([](double, double xi) { return xi; }));
    fields.push_back(poly_field([](double x, double xi) { return 1.0 + 0.2 * x * xi; }));
    fields.push_back(poly_field([](double x, double xi) { return x * x - xi; }));

    for (const WignerField& w : fields) {
        const double n2 = inner_H(w, w, 1e300);
        CHECK(inner_H(apply_Ls(w), w, 1e300) <= 1e-8 * n2);
        CHECK(inner_H(apply_L(w), w, 1e300) <= 1e-8 * n2);
    }
}

TEST_CASE("coercivity of L on zero-mass fields in H") {
    const GridSpec g = GridSpec::make(1, 64, 64, 12, 12);
    const WignerField mu = sample_mu(g);
    // mean-zero polynomials under mu: E[x]=E[xi]=0, E[x xi]=-1, E[x^2]=3, E[xi^2]=1
    struct P { double c0; std::function<double(double, double)> f; };
    std::vector<std::function<double(double, double)>> polys = {
        [](double x, double) { return x; },
        [](double, double xi) { return xi; },
        [](double x, double xi) { return x * xi + 1.0; },
        [](double x, double) { return x * x - 3.0; },
        [](double, double xi) { return xi * xi - 1.0; },
        [](double x, double xi) { return x + 2.0 * xi + 0.5 * (x * xi + 1.0); },
    };
    for (auto& p : polys) {
        WignerField w(g);
        for (int i = 0; i < g.n_x; ++i)
            for (int j = 0; j < g.n_xi; ++j)
                w[i * g.n_xi + j] =
                    mu[i * g.n_xi + j] * p(g.coord(0, i), g.coord(1, j));
        CHECK(std::abs(mass(w)) < 1e-8);  // mean-zero under mu
        const double lhs = -inner_H(apply_L(w), w, 1e300);
        const double n2 = inner_H(w, w, 1e300);
        CHECK(lhs >= kSigma * n2 * (1.0 - 1e-6));
    }
}

TEST_CASE("ground-state transform and H") {
    // sqrt(mu) decays at half the rate of mu, so its kernel test wants a
    // slightly wider box than the production default
    const GridSpec g = GridSpec::make(1, 64, 64, 15, 15);

    double x = 0.0, xi = 0.0;
    CHECK(potential_U(1, &x, &xi) == doctest::Approx(1.0));  // (1/2) Lap A = 1 for d=1

    const WignerField mu = sample_mu(g);
    WignerField sqrt_mu = groundstate_transform(mu);
    // H(sqrt(mu)) = 0
    WignerField hs = apply_H(sqrt_mu);
    CHECK(norm_L2(hs) / norm_L2(sqrt_mu) < 1e-6);

    // round trip
    WignerField back = groundstate_untransform(sqrt_mu);
    CHECK(rel_l2(back, mu) < 1e-13);

    // intertwining L w = sqrt(mu) H(w / sqrt(mu)) on localized fields
    for (std::uint64_t seed : {31u, 32u, 33u}) {
        WignerField w = random_field(g, seed, 0.35, 1.0);
        WignerField lhs = apply_L(w);
        WignerField rhs = groundstate_untransform(apply_H(groundstate_transform(w)));
        // compare on the region where the Gaussian weight is moderate
        double num = 0.0, den = 0.0;
        const auto av = a_values(g);
        for (std::size_t p = 0; p < w.size(); ++p) {
            if (av[p] > 30.0) continue;
            num += (lhs[p] - rhs[p]) * (lhs[p] - rhs[p]);
            den += lhs[p] * lhs[p];
        }
        CHECK(std::sqrt(num / den) < 1e-6);
    }
}

TEST_CASE("cutoff spec validation and bump properties") {
    CHECK(CutoffSpec::max_epsilon(4) == doctest::Approx(1.0 / 24.0));
    CHECK(CutoffSpec::max_epsilon(9) == doctest::Approx(1.0 / 36.0));
    CHECK_THROWS_AS(CutoffSpec(0.05, 4), ConfigError);   // 1/20 > 1/24
    CHECK_THROWS_AS(CutoffSpec(1.5, 1), ConfigError);

    CutoffSpec cut(1.0 / 24.0, 4);
    double worst_grad = 0.0;
    for (int i = 0; i <= 3000; ++i) {
        const double r = 3.0 * i / 3000;
        if (r <= 1.0) CHECK(cut.chi(r) == 1.0);
        if (r >= 2.0) CHECK(cut.chi(r) == 0.0);
        worst_grad = std::max(worst_grad, std::abs(cut.dchi(r)));
    }
    CHECK(worst_grad <= std::sqrt(2.0));
    CHECK(worst_grad == doctest::Approx(CutoffSpec::grad_bound()));
}

TEST_CASE("epsilon split of L") {
    const GridSpec g = GridSpec::make(1, 64, 64, 12, 12);
    CutoffSpec cut(1.0 / 24.0, 4);

    for (std::uint64_t seed : {41u, 42u}) {
        const WignerField w = random_field(g, seed, 0.4, 0.5);
        WignerField lw = apply_L(w);
        WignerField l1 = apply_L1eps(w, 4, cut);
        WignerField l2 = apply_L2eps(w, 4, cut);
        double worst = 0.0;
        for (std::size_t p = 0; p < w.size(); ++p)
            worst = std::max(worst, std::abs(lw[p] - l1[p] - l2[p]));
        CHECK(worst / max_abs(lw) < 1e-10);
    }

    // -Re<L2 w, w>_{H_4} >= 0 on random smooth decaying fields
    for (int s = 0; s < 100; ++s) {
        const WignerField w = random_field(g, 1000 + s, 0.4, 1.0);
        WignerField l2 = apply_L2eps(w, 4, cut);
        CHECK(-inner_Hm(l2, w, 4) >= -1e-10 * inner_Hm(w, w, 4));
    }

    // chi_eps support: L1 output vanishes identically outside B_{2/eps}
    const GridSpec gw = GridSpec::make(1, 128, 128, 60, 60);
    const WignerField any = random_field(gw, 9, 0.4, 0.0);
    WignerField l1a = apply_L1eps(any, 4, cut);
    for (int i = 0; i < gw.n_x; ++i)
        for (int j = 0; j < gw.n_xi; ++j) {
            const double x = gw.coord(0, i), xi = gw.coord(1, j);
            if (x * x + xi * xi >= (48.0 * 48.0) * (1.0 + 1e-12))
                CHECK(l1a[i * gw.n_xi + j] == 0.0);
        }

    // and a smooth compactly-supported field living outside B_{2/eps} is
    // (nearly) annihilated; the residue is spectral gradient leakage
    WignerField far(gw);
    for (int i = 0; i < gw.n_x; ++i)
        for (int j = 0; j < gw.n_xi; ++j) {
            const double x = gw.coord(0, i) - 54.0, xi = gw.coord(1, j);
            const double u2 = (x * x + xi * xi) / 25.0;
            far[i * gw.n_xi + j] = u2 < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - u2)) : 0.0;
        }
    CHECK(max_abs(apply_L1eps(far, 4, cut)) < 2e-3 * max_abs(far));
}

TEST_CASE("generalized diffusion operator Q") {
    const GridSpec g = GridSpec::make(1, 64, 64, 12, 12);
    const WignerField w = random_field(g, 51, 0.4, 0.5);

    // normalized coefficients against a hand-built right-hand side
    WignerField got = apply_Q(w, {1, 0, 1, 1});
    WignerField lap_x(g), lap_xi(g);
    {
        auto s = fftops::forward(w);
        auto sx = s;
        fftops::mult_ik(g, sx, 0);
        fftops::mult_ik(g, sx, 0);
        auto v = fftops::inverse(g, sx);
        lap_x = fftops::to_real(g, v, nullptr);
        auto sxi = s;
        fftops::mult_ik(g, sxi, 1);
        fftops::mult_ik(g, sxi, 1);
        v = fftops::inverse(g, sxi);
        lap_xi = fftops::to_real(g, v, nullptr);
    }
    WignerField xiw(g);
    for (int i = 0; i < g.n_x; ++i)
        for (int j = 0; j < g.n_xi; ++j)
            xiw[i * g.n_xi + j] = g.coord(1, j) * w[i * g.n_xi + j];
    WignerField dxiw = spectral_derivative(xiw, 1);
    WignerField want(g);
    for (std::size_t p = 0; p < w.size(); ++p)
        want[p] = lap_xi[p] + 2.0 * dxiw[p] + lap_x[p];
    CHECK(rel_l2(got, want) < 1e-10);

    CHECK(max_abs(apply_Q(w, {0, 0, 0, 0})) == 0.0);
}

TEST_CASE("d = 2 smoke: exact identities survive the dimension lift") {
    const GridSpec g = GridSpec::make(2, 16, 16, 12, 12);
    const WignerField w = random_field(g, 61, 0.5, 0.3);
    CHECK(std::abs(mass(apply_L(w))) < 1e-9);

    WignerField lw = apply_L(w);
    WignerField ls = apply_Ls(w);
    WignerField las = apply_Las(w);
    double worst = 0.0;
    for (std::size_t p = 0; p < w.size(); ++p)
        worst = std::max(worst, std::abs(lw[p] - ls[p] - las[p]));
    CHECK(worst / std::max(1e-300, max_abs(lw)) < 1e-10);

    // U(0,0) = d for d=2: (1/2) Lap A = 2
    double x[2] = {0, 0}, xi[2] = {0, 0};
    CHECK(potential_U(2, x, xi) == doctest::Approx(2.0));
}
