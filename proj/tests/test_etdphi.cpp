#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "nss/etdphi.hpp"
#include "nss/experiments.hpp"

using namespace nss;

namespace {
const double kC4 = 1.0 / (1.0 - std::exp(-2.0));
}

TEST_CASE("eval_g at the zero-mode limit") {
    GValues g = eval_g(0.0);
    CHECK(g.g0 == 1.0);
    CHECK(g.g1 == 0.5);
    CHECK(g.g2 == doctest::Approx(1.0 / 3.0).epsilon(1e-16));
}

TEST_CASE("eval_g closed-form reference values") {
    GValues g = eval_g(2.0);
    CHECK(g.g0 == doctest::Approx(0.43233235838169365).epsilon(1e-14));
    CHECK(g.g1 == doctest::Approx(0.28383382080915317).epsilon(1e-14));
    CHECK(g.g2 == doctest::Approx(0.21616617919084683).epsilon(1e-14));
}

TEST_CASE("eval_g series branch near zero") {
    GValues g = eval_g(1e-9);
    CHECK(g.g0 == doctest::Approx(0.99999999950000000017).epsilon(1e-13));
    CHECK(g.g1 == doctest::Approx(0.49999999983333333337).epsilon(1e-13));
    CHECK(g.g2 == doctest::Approx(0.33333333324999999998).epsilon(1e-13));
}

TEST_CASE("eval_g rejects bad input") {
    CHECK_THROWS_AS(eval_g(-1e-12), std::invalid_argument);
    CHECK_THROWS_AS(eval_g(std::numeric_limits<double>::quiet_NaN()),
                    std::invalid_argument);
    CHECK_THROWS_AS(eval_g(std::numeric_limits<double>::infinity()),
                    std::invalid_argument);
}

TEST_CASE("eval_g stays finite and ordered out to the flush threshold") {
    for (double x : {1e-3, 0.1, 1.0, 10.0, 100.0, 699.0, 701.0, 1e6}) {
        GValues g = eval_g(x);
        CHECK(std::isfinite(g.g0));
        CHECK(g.g0 > 0.0);
        CHECK(g.g1 > 0.0);
        CHECK(g.g2 > 0.0);
        // g0 >= g1 >= g2 pointwise for x >= 0
        CHECK(g.g0 >= g.g1);
        CHECK(g.g1 >= g.g2);
    }
    // far past the flush threshold the closed forms reduce to 1/x, 1/x, 1/x
    GValues g = eval_g(1e4);
    CHECK(g.g0 == doctest::Approx(1e-4).epsilon(1e-12));
    CHECK(g.g1 == doctest::Approx((1e4 - 1.0) / 1e8).epsilon(1e-12));
}

TEST_CASE("both evaluation branches agree near the switchover") {
    // extended-precision series reference, plenty of terms for x <= 1
    auto series = [](long double x, int shift) {
        long double term = 1.0L, sum = 0.0L, fact = 1.0L;
        for (int n = 0; n < 30; ++n) {
            fact = 1.0L;
            for (int k = 2; k <= n + shift; ++k) fact *= k;
            sum += term / fact;
            term *= -x;
        }
        return sum;
    };
    for (int i = 0; i <= 200; ++i) {
        const double x = 0.3 + i * (0.8 - 0.3) / 200.0;
        const long double lx = x;
        const long double r0 = series(lx, 1);
        const long double r1 = series(lx, 2);
        const long double r2 = 2.0L * series(lx, 3);
        GValues g = eval_g(x);
        CHECK(g.g0 == doctest::Approx(static_cast<double>(r0)).epsilon(1e-12));
        CHECK(g.g1 == doctest::Approx(static_cast<double>(r1)).epsilon(1e-12));
        CHECK(g.g2 == doctest::Approx(static_cast<double>(r2)).epsilon(1e-12));
    }
}

TEST_CASE("g-function monotonicity and ratio bounds on a log grid") {
    double prev0 = 1.0 + 1e-15, prev1 = 0.5 + 1e-15, prev2 = 1.0 / 3.0 + 1e-15;
    for (int i = 0; i < 10000; ++i) {
        const double x = 100.0 * (i + 1) / 10000.0;
        GValues g = eval_g(x);
        CHECK(g.g0 <= prev0 + 1e-14);
        CHECK(g.g1 <= prev1 + 1e-14);
        CHECK(g.g2 <= prev2 + 1e-14);
        CHECK(g.g1 / g.g0 <= kC4 + 1e-12);
        CHECK(g.g2 / g.g0 <= kC4 + 1e-12);
        // 1 <= 1/g0 <= 1 + x (the calG bracket)
        const double calg = 1.0 / g.g0;
        CHECK(calg >= 1.0 - 1e-14);
        CHECK(calg <= 1.0 + x + 1e-12 * (1.0 + x));
        CHECK(calg >= x - 1e-12 * (1.0 + x));  // 1/g0 >= max(1, x)
        prev0 = g.g0;
        prev1 = g.g1;
        prev2 = g.g2;
    }
}

TEST_CASE("build_tables zero-mode entries take the limits") {
    SpectralGrid grid = make_grid(16, 1.0);
    PhiTables tb = build_tables(grid, 0.5, 0.125, 2.0, 0.01);
    CHECK(tb.Lambda[0] == 0.0);
    CHECK(tb.exp_neg[0] == 1.0);
    CHECK(tb.phi0[0] == 1.0);
    CHECK(tb.phi1[0] == 0.5);
    CHECK(tb.phi2[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-16));
    CHECK(tb.G1[0] == 0.5);
    CHECK(tb.G2[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-16));
    CHECK(tb.calG[0] == 1.0);
    CHECK(tb.calG_half[0] == 1.0);
    CHECK(tb.reg_denom[0] == 1.0);
}

TEST_CASE("build_tables worked example at mode (1,0)") {
    const int N = 64;
    const double L = 1.0;
    SpectralGrid grid = make_grid(N, L);
    const double dt = 0.5 * grid.h;
    const double eps = 0.5, kappa = 0.125, A = 1.0;
    PhiTables tb = build_tables(grid, eps, kappa, A, dt);

    const std::size_t m = grid.index(1, 0);
    const double lam = grid.lambda[m];
    const double Lam = eps * eps * lam * lam + kappa * lam;
    CHECK(tb.Lambda[m] == doctest::Approx(394.57116633655441).epsilon(1e-12));
    const double x = dt * Lam;
    GValues g = eval_g(x);
    CHECK(tb.exp_neg[m] == doctest::Approx(std::exp(-x)).epsilon(1e-14));
    CHECK(tb.phi0[m] == doctest::Approx(g.g0).epsilon(1e-14));
    CHECK(tb.phi1[m] == doctest::Approx(g.g1).epsilon(1e-14));
    CHECK(tb.phi2[m] == doctest::Approx(g.g2).epsilon(1e-14));
    CHECK(tb.G1[m] == doctest::Approx(g.g1 / g.g0).epsilon(1e-14));
    CHECK(tb.calG[m] == doctest::Approx(1.0 / g.g0).epsilon(1e-14));
    CHECK(tb.calG_half[m] ==
          doctest::Approx(std::sqrt(1.0 / g.g0)).epsilon(1e-14));
    CHECK(tb.reg_denom[m] ==
          doctest::Approx(1.0 + A * dt * dt * dt * g.g0 * lam * lam)
              .epsilon(1e-14));
}

TEST_CASE("build_tables global inequalities") {
    SpectralGrid grid = make_grid(48, 3.2);
    PhiTables tb = build_tables(grid, 0.04, 0.25, 5.0, 0.02);
    for (std::size_t m = 0; m < grid.modes(); ++m) {
        const double x = tb.dt * tb.Lambda[m];
        CHECK(tb.G1[m] <= kC4 + 1e-12);
        CHECK(tb.G2[m] <= kC4 + 1e-12);
        CHECK(tb.calG[m] >= 1.0 - 1e-14);
        CHECK(tb.calG[m] >= x - 1e-10 * (1.0 + x));
        CHECK(tb.reg_denom[m] >= 1.0);
        CHECK(std::isfinite(tb.phi0[m]));
        CHECK(tb.exp_neg[m] <= 1.0);
    }
}

TEST_CASE("build_tables rejects bad arguments") {
    SpectralGrid grid = make_grid(8, 1.0);
    CHECK_THROWS_AS(build_tables(grid, 0.1, 0.25, 0.0, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_tables(grid, 0.1, 0.25, 0.0, -0.1),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_tables(grid, 0.0, 0.25, 0.0, 0.1),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_tables(grid, 0.1, 0.25, -1.0, 0.1),
                    std::invalid_argument);
}

TEST_CASE("operator bounds on simple fields") {
    SpectralGrid grid = make_grid(32, 1.0);
    FftWorkspace ws(grid);
    PhiTables tb = build_tables(grid, 0.1, 0.25, 0.0, 0.05);

    Field zero(grid);
    OperatorBoundsReport rz = check_operator_bounds(grid, tb, ws, zero);
    CHECK(rz.ok);

    Field f(grid);
    for (int iy = 0; iy < grid.N; ++iy)
        for (int ix = 0; ix < grid.N; ++ix)
            f.v[grid.index(ix, iy)] =
                std::sin(2.0 * std::numbers::pi * ix * grid.h);
    OperatorBoundsReport rs = check_operator_bounds(grid, tb, ws, f);
    CHECK(rs.ok);
    CHECK(rs.margin_calg_half >= -1e-12);
    CHECK(rs.margin_gn_lower >= -1e-12);
    CHECK(rs.margin_cross >= -1e-12);
    CHECK(rs.margin_g1 >= -1e-12);
    CHECK(rs.margin_g2 >= -1e-12);
}

TEST_CASE("operator bounds hold for random mean-zero fields") {
    for (int N : {16, 32, 33}) {
        SpectralGrid grid = make_grid(N, 1.0);
        FftWorkspace ws(grid);
        for (double dt : {1e-4, 0.05, 2.0}) {
            PhiTables tb = build_tables(grid, 0.1, 0.25, 1.0, dt);
            for (std::uint64_t seed = 1; seed <= 100; ++seed) {
                Field f = random_initial_data(grid, seed, 1.0);
                OperatorBoundsReport r = check_operator_bounds(grid, tb, ws, f);
                INFO("N=", N, " dt=", dt, " seed=", seed, " ", r.detail);
                CHECK(r.ok);
            }
        }
    }
}
