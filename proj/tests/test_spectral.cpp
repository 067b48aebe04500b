#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nss/spectral.hpp"

using namespace nss;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Field random_field(const SpectralGrid& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Field f(g);
    for (double& x : f.v) x = dist(rng);
    return f;
}

// random field band-limited to |k| <= N/3, so that even-N Nyquist handling
// does not enter derivative identities
Field random_smooth_field(const SpectralGrid& g, FftWorkspace& ws,
                          std::uint64_t seed) {
    Field f = random_field(g, seed);
    SpectralField F = ws.transform(f);
    for (int iy = 0; iy < g.N; ++iy)
        for (int ix = 0; ix < g.N; ++ix)
            if (std::abs(g.wavenumber[ix]) > g.N / 3 ||
                std::abs(g.wavenumber[iy]) > g.N / 3)
                F.c[g.index(ix, iy)] = 0.0;
    return ws.inverse_transform(F);
}

Field sample(const SpectralGrid& g, auto&& fn) {
    Field f(g);
    for (int iy = 0; iy < g.N; ++iy)
        for (int ix = 0; ix < g.N; ++ix)
            f.v[g.index(ix, iy)] = fn(ix * g.h, iy * g.h);
    return f;
}

double spectral_energy(const SpectralField& F) {
    double s = 0.0;
    for (const auto& c : F.c) s += std::norm(c);
    return F.grid->L * F.grid->L * s;
}

}  // namespace

TEST_CASE("make_grid eigenvalue table") {
    SpectralGrid g = make_grid(5, 1.0);
    CHECK(g.lambda[g.index(0, 0)] == 0.0);
    CHECK(g.lambda[g.index(1, 0)] == doctest::Approx(kTwoPi * kTwoPi).epsilon(1e-14));

    SpectralGrid g2 = make_grid(512, 12.8);
    CHECK(g2.lambda[g2.index(1, 0)] ==
          doctest::Approx(std::pow(kTwoPi / 12.8, 2)).epsilon(1e-14));

    // symmetry and positivity away from the zero mode
    for (int iy = 0; iy < g.N; ++iy)
        for (int ix = 0; ix < g.N; ++ix) {
            const int jx = (g.N - ix) % g.N;
            const int jy = (g.N - iy) % g.N;
            CHECK(g.lambda[g.index(ix, iy)] == g.lambda[g.index(jx, jy)]);
            if (ix != 0 || iy != 0) CHECK(g.lambda[g.index(ix, iy)] > 0.0);
        }
}

TEST_CASE("make_grid rejects bad arguments") {
    CHECK_THROWS_AS(make_grid(3, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(8, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(8, -1.0), std::invalid_argument);
}

TEST_CASE("Nyquist derivative multiplier is zeroed for even N") {
    SpectralGrid g = make_grid(8, 1.0);
    CHECK(g.deriv[4] == 0.0);
    CHECK(g.wavenumber[4] == -4);
    SpectralGrid godd = make_grid(9, 1.0);
    for (int j = 1; j < 9; ++j) CHECK(godd.deriv[j] != 0.0);
    CHECK(godd.deriv[0] == 0.0);
}

TEST_CASE("transform of a constant field") {
    SpectralGrid g = make_grid(16, 2.0);
    FftWorkspace ws(g);
    Field f(g);
    for (double& x : f.v) x = 4.25;
    SpectralField F = ws.transform(f);
    CHECK(F.c[0].real() == doctest::Approx(4.25).epsilon(1e-15));
    CHECK(F.c[0].imag() == doctest::Approx(0.0));
    for (std::size_t m = 1; m < g.modes(); ++m)
        CHECK(std::abs(F.c[m]) < 1e-14);
}

TEST_CASE("transform of a single sine mode") {
    SpectralGrid g = make_grid(32, 1.0);
    FftWorkspace ws(g);
    Field f = sample(g, [](double x, double) { return std::sin(kTwoPi * x); });
    SpectralField F = ws.transform(f);
    // sin = (e^{i} - e^{-i})/(2i): coefficient 1/(2i) = -i/2 at (1,0)
    CHECK(F.c[g.index(1, 0)].imag() == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(F.c[g.index(g.N - 1, 0)].imag() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(std::abs(F.c[g.index(1, 0)].real()) < 1e-14);
}

TEST_CASE("round trip and Parseval for random fields") {
    for (int N : {8, 16, 32, 33}) {
        SpectralGrid g = make_grid(N, 1.7);
        FftWorkspace ws(g);
        Field f = random_field(g, 1234 + N);
        SpectralField F = ws.transform(f);
        Field back = ws.inverse_transform(F);
        const double ref = norms(f).l2;
        double err = 0.0;
        for (std::size_t m = 0; m < g.modes(); ++m)
            err += (back.v[m] - f.v[m]) * (back.v[m] - f.v[m]);
        err = std::sqrt(g.h * g.h * err);
        CHECK(err < 1e-13 * ref);

        const double l2sq = ref * ref;
        CHECK(std::abs(l2sq - spectral_energy(F)) < 1e-12 * l2sq);
    }
}

TEST_CASE("conjugate symmetry preserved by even-symmetric diagonal operators") {
    SpectralGrid g = make_grid(16, 1.0);
    FftWorkspace ws(g);
    SpectralField F = ws.transform(random_field(g, 9));
    SpectralField G = apply_diagonal(F, g.lambda);
    for (int iy = 0; iy < g.N; ++iy)
        for (int ix = 0; ix < g.N; ++ix) {
            const auto a = G.c[g.index(ix, iy)];
            const auto b = G.c[g.index((g.N - ix) % g.N, (g.N - iy) % g.N)];
            CHECK(std::abs(a - std::conj(b)) < 1e-10);
        }
    // realness preserved
    Field back = ws.inverse_transform(G);
    SpectralField again = ws.transform(back);
    double imag_mass = 0.0;
    for (const auto& c : again.c) imag_mass += 0.0;  // back is real by type
    CHECK(imag_mass == 0.0);
}

TEST_CASE("apply_diagonal identity and composition") {
    SpectralGrid g = make_grid(16, 1.0);
    FftWorkspace ws(g);
    SpectralField F = ws.transform(random_field(g, 5));
    std::vector<double> ones(g.modes(), 1.0);
    SpectralField I = apply_diagonal(F, ones);
    for (std::size_t m = 0; m < g.modes(); ++m) CHECK(I.c[m] == F.c[m]);

    std::vector<double> neg_lambda(g.modes());
    std::vector<double> lambda_sq(g.modes());
    for (std::size_t m = 0; m < g.modes(); ++m) {
        neg_lambda[m] = -g.lambda[m];
        lambda_sq[m] = g.lambda[m] * g.lambda[m];
    }
    SpectralField twice = apply_diagonal(apply_diagonal(F, neg_lambda), neg_lambda);
    SpectralField bilap = apply_diagonal(F, lambda_sq);
    for (std::size_t m = 0; m < g.modes(); ++m)
        CHECK(std::abs(twice.c[m] - bilap.c[m]) <= 1e-12 * (1.0 + std::abs(bilap.c[m])));
}

TEST_CASE("spectral Laplacian of a single mode") {
    SpectralGrid g = make_grid(32, 1.0);
    FftWorkspace ws(g);
    Field f = sample(g, [](double x, double) { return std::sin(kTwoPi * x); });
    Field lap = laplacian(ws, f);
    for (std::size_t m = 0; m < g.modes(); ++m)
        CHECK(lap.v[m] ==
              doctest::Approx(-kTwoPi * kTwoPi * f.v[m]).epsilon(1e-10).scale(40.0));
}

TEST_CASE("gradient examples") {
    SpectralGrid g = make_grid(32, 1.0);
    FftWorkspace ws(g);

    Field c(g);
    for (double& x : c.v) x = 2.5;
    auto [cx, cy] = grad(ws, c);
    CHECK(norms(cx).linf < 1e-13);
    CHECK(norms(cy).linf < 1e-13);

    Field f = sample(g, [](double x, double) { return std::sin(kTwoPi * x); });
    auto [fx, fy] = grad(ws, f);
    for (int iy = 0; iy < g.N; ++iy)
        for (int ix = 0; ix < g.N; ++ix) {
            const double expect = kTwoPi * std::cos(kTwoPi * ix * g.h);
            CHECK(fx.v[g.index(ix, iy)] == doctest::Approx(expect).epsilon(1e-12).scale(7.0));
            CHECK(std::abs(fy.v[g.index(ix, iy)]) < 1e-11);
        }
}

TEST_CASE("div of grad equals laplacian on smooth fields") {
    for (int N : {32, 33}) {
        SpectralGrid g = make_grid(N, 1.0);
        FftWorkspace ws(g);
        Field f = sample(g, [](double x, double y) {
            return std::sin(kTwoPi * x) * std::cos(2.0 * kTwoPi * y) +
                   0.3 * std::cos(kTwoPi * (x + y));
        });
        auto [fx, fy] = grad(ws, f);
        Field d = div(ws, fx, fy);
        Field lap = laplacian(ws, f);
        for (std::size_t m = 0; m < g.modes(); ++m)
            CHECK(std::abs(d.v[m] - lap.v[m]) < 1e-12 * 200.0);
    }
}

TEST_CASE("summation by parts") {
    for (int N : {8, 16, 32, 33}) {
        SpectralGrid g = make_grid(N, 1.0);
        FftWorkspace ws(g);

        // gradient identity on band-limited fields
        Field f = random_smooth_field(g, ws, 21 + N);
        Field h = random_smooth_field(g, ws, 22 + N);
        Field laph = laplacian(ws, h);
        auto [fx, fy] = grad(ws, f);
        auto [hx, hy] = grad(ws, h);
        const double lhs = inner_product(f, laph);
        const double rhs = -(inner_product(fx, hx) + inner_product(fy, hy));
        CHECK(std::abs(lhs - rhs) < 1e-12 * (1.0 + std::abs(lhs)) * 1e3);

        // bilaplacian identity holds for arbitrary fields
        Field a = random_field(g, 31 + N);
        Field b = random_field(g, 32 + N);
        Field lapa = laplacian(ws, a);
        Field lapb = laplacian(ws, b);
        Field bilapb = laplacian(ws, lapb);
        const double lhs2 = inner_product(a, bilapb);
        const double rhs2 = inner_product(lapa, lapb);
        CHECK(std::abs(lhs2 - rhs2) < 1e-12 * (1.0 + std::abs(lhs2)) * 1e3);
    }
}

TEST_CASE("zero mode annihilation") {
    SpectralGrid g = make_grid(16, 1.0);
    FftWorkspace ws(g);
    Field f = random_field(g, 77);
    auto [fx, fy] = grad(ws, f);
    Field lap = laplacian(ws, f);
    // the derivative multipliers vanish identically at mode (0,0)
    CHECK(std::abs(ws.transform(fx).c[0]) < 1e-15);
    CHECK(std::abs(ws.transform(fy).c[0]) < 1e-15);
    CHECK(std::abs(ws.transform(lap).c[0]) < 1e-12);
}

TEST_CASE("norms of simple fields") {
    SpectralGrid g = make_grid(16, 1.0);
    Field z(g);
    Norms nz = norms(z);
    CHECK(nz.l1 == 0.0);
    CHECK(nz.l2 == 0.0);
    CHECK(nz.linf == 0.0);
    CHECK(nz.mean == 0.0);

    Field c(g);
    for (double& x : c.v) x = 3.0;
    Norms nc = norms(c);
    CHECK(nc.l2 == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(nc.mean == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(nc.linf == 3.0);
}

TEST_CASE("l2 norm matches the Parseval route") {
    SpectralGrid g = make_grid(24, 3.1);
    FftWorkspace ws(g);
    Field f = random_field(g, 55);
    const double direct = norms(f).l2;
    const double spectral = std::sqrt(spectral_energy(ws.transform(f)));
    CHECK(direct == doctest::Approx(spectral).epsilon(1e-12));
}

TEST_CASE("transform rejects mismatched grids") {
    SpectralGrid g1 = make_grid(8, 1.0);
    SpectralGrid g2 = make_grid(8, 1.0);
    FftWorkspace ws(g1);
    Field f(g2);
    CHECK_THROWS_AS(ws.transform(f), std::invalid_argument);
}
