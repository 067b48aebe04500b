#include "nss/model.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace nss {

namespace {

// Fine-grid scratch for the 3/2-rule quotient evaluation, cached per (N, L).
struct FineScratch {
    SpectralGrid grid;
    std::unique_ptr<FftWorkspace> ws;
};

FineScratch& fine_scratch(const SpectralGrid& coarse) {
    static std::mutex mu;
    static std::map<std::pair<int, double>, std::unique_ptr<FineScratch>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(coarse.N, coarse.L);
    auto it = cache.find(key);
    if (it == cache.end()) {
        auto s = std::make_unique<FineScratch>();
        int M = 3 * coarse.N / 2;
        if (M % 2 != 0) ++M;
        s->grid = make_grid(M, coarse.L);
        s->ws = std::make_unique<FftWorkspace>(s->grid);
        it = cache.emplace(key, std::move(s)).first;
    }
    return *it->second;
}

std::size_t fine_bin(const SpectralGrid& fine, int k) {
    return static_cast<std::size_t>(k >= 0 ? k : k + fine.N);
}

// Pointwise beta(v) = v/(1+|v|^2) of the spectral gradient, evaluated either
// straight at the collocation points or on a zero-padded 3/2 grid.
void quotient_hats(FftWorkspace& ws, const SpectralField& gx_hat,
                   const SpectralField& gy_hat, bool dealias,
                   SpectralField& qx_hat, SpectralField& qy_hat) {
    const SpectralGrid& g = ws.grid();
    if (!dealias) {
        Field gx = ws.inverse_transform(gx_hat);
        Field gy = ws.inverse_transform(gy_hat);
        Field qx(g), qy(g);
        for (std::size_t i = 0; i < g.modes(); ++i) {
            const double d = 1.0 + gx.v[i] * gx.v[i] + gy.v[i] * gy.v[i];
            qx.v[i] = gx.v[i] / d;
            qy.v[i] = gy.v[i] / d;
        }
        qx_hat = ws.transform(qx);
        qy_hat = ws.transform(qy);
        return;
    }

    FineScratch& fs = fine_scratch(g);
    SpectralField fx(fs.grid), fy(fs.grid);
    for (int iy = 0; iy < g.N; ++iy)
        for (int ix = 0; ix < g.N; ++ix) {
            const std::size_t src = g.index(ix, iy);
            const std::size_t dst =
                fs.grid.index(static_cast<int>(fine_bin(fs.grid, g.wavenumber[ix])),
                              static_cast<int>(fine_bin(fs.grid, g.wavenumber[iy])));
            fx.c[dst] = gx_hat.c[src];
            fy.c[dst] = gy_hat.c[src];
        }
    Field gx = fs.ws->inverse_transform(fx);
    Field gy = fs.ws->inverse_transform(fy);
    Field qx(fs.grid), qy(fs.grid);
    for (std::size_t i = 0; i < fs.grid.modes(); ++i) {
        const double d = 1.0 + gx.v[i] * gx.v[i] + gy.v[i] * gy.v[i];
        qx.v[i] = gx.v[i] / d;
        qy.v[i] = gy.v[i] / d;
    }
    SpectralField QX = fs.ws->transform(qx);
    SpectralField QY = fs.ws->transform(qy);
    qx_hat = SpectralField(g);
    qy_hat = SpectralField(g);
    for (int iy = 0; iy < g.N; ++iy)
        for (int ix = 0; ix < g.N; ++ix) {
            const std::size_t dst = g.index(ix, iy);
            const std::size_t src =
                fs.grid.index(static_cast<int>(fine_bin(fs.grid, g.wavenumber[ix])),
                              static_cast<int>(fine_bin(fs.grid, g.wavenumber[iy])));
            qx_hat.c[dst] = QX.c[src];
            qy_hat.c[dst] = QY.c[src];
        }
}

}  // namespace

SpectralField nonlinear_f_hat(FftWorkspace& ws, const SpectralField& u_hat,
                              const ModelParams& p) {
    const SpectralGrid& g = ws.grid();
    const std::complex<double> I(0.0, 1.0);
    SpectralField gx_hat(g), gy_hat(g);
    for (int iy = 0; iy < g.N; ++iy)
        for (int ix = 0; ix < g.N; ++ix) {
            const std::size_t m = g.index(ix, iy);
            gx_hat.c[m] = I * g.deriv[ix] * u_hat.c[m];
            gy_hat.c[m] = I * g.deriv[iy] * u_hat.c[m];
        }
    SpectralField qx_hat, qy_hat;
    quotient_hats(ws, gx_hat, gy_hat, p.dealias, qx_hat, qy_hat);

    SpectralField f_hat(g);
    for (int iy = 0; iy < g.N; ++iy)
        for (int ix = 0; ix < g.N; ++ix) {
            const std::size_t m = g.index(ix, iy);
            f_hat.c[m] = I * g.deriv[ix] * qx_hat.c[m] +
                         I * g.deriv[iy] * qy_hat.c[m] -
                         p.kappa * g.lambda[m] * u_hat.c[m];
        }
    return f_hat;
}

Field nonlinear_f(FftWorkspace& ws, const Field& u, const ModelParams& p) {
    return ws.inverse_transform(nonlinear_f_hat(ws, ws.transform(u), p));
}

std::pair<Field, Field> g_vector(FftWorkspace& ws, const Field& u,
                                 const ModelParams& p) {
    auto [gx, gy] = grad(ws, u);
    const SpectralGrid& g = *u.grid;
    Field vx(g), vy(g);
    for (std::size_t i = 0; i < g.modes(); ++i) {
        const double d = 1.0 + gx.v[i] * gx.v[i] + gy.v[i] * gy.v[i];
        vx.v[i] = gx.v[i] / d + p.kappa * gx.v[i];
        vy.v[i] = gy.v[i] / d + p.kappa * gy.v[i];
    }
    return {vx, vy};
}

double energy(FftWorkspace& ws, const Field& u, const ModelParams& p) {
    const SpectralGrid& g = *u.grid;
    auto [gx, gy] = grad(ws, u);
    double s = 0.0;
    for (std::size_t i = 0; i < g.modes(); ++i)
        s += -0.5 * std::log1p(gx.v[i] * gx.v[i] + gy.v[i] * gy.v[i]);
    Field lap = laplacian(ws, u);
    const double lap_sq = norms(lap).l2;
    return g.h * g.h * s + 0.5 * p.eps * p.eps * lap_sq * lap_sq;
}

namespace {
double grad_diff_sq(FftWorkspace& ws, const Field& a, const Field& b) {
    Field d(*a.grid);
    for (std::size_t i = 0; i < d.v.size(); ++i) d.v[i] = a.v[i] - b.v[i];
    auto [gx, gy] = grad(ws, d);
    return inner_product(gx, gx) + inner_product(gy, gy);
}
}  // namespace

double modified_energy(FftWorkspace& ws, const Field& u_np1, const Field& u_n,
                       const Field& u_nm1, const StabilityConstants& sc,
                       const ModelParams& p) {
    return energy(ws, u_np1, p) + sc.gamma1 * grad_diff_sq(ws, u_np1, u_n) +
           sc.gamma3 * grad_diff_sq(ws, u_n, u_nm1);
}

Observables observables(FftWorkspace& ws, const Field& u, const ModelParams& p,
                        double t) {
    Observables o;
    o.t = t;
    o.mass_mean = mean(u);
    const SpectralGrid& g = *u.grid;
    double dev_sq = 0.0;
    for (double x : u.v) {
        const double d = x - o.mass_mean;
        dev_sq += d * d;
    }
    o.roughness = std::sqrt(dev_sq / static_cast<double>(g.modes()));
    auto [gx, gy] = grad(ws, u);
    double slope_sq = 0.0;
    for (std::size_t i = 0; i < g.modes(); ++i)
        slope_sq += gx.v[i] * gx.v[i] + gy.v[i] * gy.v[i];
    o.slope = std::sqrt(slope_sq / static_cast<double>(g.modes()));
    if (o.slope > 0.0) o.char_length = o.roughness / o.slope;
    o.energy = energy(ws, u, p);
    o.modified_energy = o.energy;
    return o;
}

StabilityConstants stability_constants(const ModelParams& p) {
    StabilityConstants sc;
    sc.C4 = 1.0 / (1.0 - std::exp(-2.0));
    sc.kappa0 = 0.125;
    sc.kappa_star = p.kappa - sc.kappa0;
    sc.gamma1 = 1.5 * sc.C4 * (1.0 + p.kappa);
    sc.gamma2 = sc.C4 * (1.0 + p.kappa);
    sc.gamma3 = 0.5 * sc.C4 * (1.0 + p.kappa);
    sc.gamma0 = sc.gamma1 + sc.gamma2 + sc.gamma3;
    sc.alpha0 = std::log((sc.gamma0 + 0.5 * p.kappa) / (sc.gamma0 - 0.5 * p.kappa));
    const double base = sc.gamma0 - 0.25 * p.kappa;
    sc.A_min = base * base * base * base / (sc.alpha0 * sc.alpha0 * p.eps * p.eps);
    if (p.kappa < 0.25) {
        sc.hypotheses_met = false;
        char buf[96];
        std::snprintf(buf, sizeof(buf),
                      "kappa = %g < 1/4: energy stability theorem hypotheses unmet",
                      p.kappa);
        sc.warning = buf;
    }
    return sc;
}

double energy_lower_bound(double eps, double L) {
    if (!(eps > 0.0) || !(L > 0.0))
        throw std::invalid_argument("energy_lower_bound: eps and L must be positive");
    const double r = 4.0 * eps * eps * std::numbers::pi * std::numbers::pi / (L * L);
    return 0.5 * L * L * (std::log(r) - r + 1.0);
}

ConvexityReport convexity_check(double kappa0, int samples_per_dim) {
    ConvexityReport rep;
    rep.min_eigenvalue = std::numeric_limits<double>::infinity();
    const double lo = -50.0, hi = 50.0;
    const int n = std::max(samples_per_dim, 2);
    for (int i = 0; i < n; ++i) {
        const double a = lo + (hi - lo) * i / (n - 1);
        for (int j = 0; j < n; ++j) {
            const double b = lo + (hi - lo) * j / (n - 1);
            const double s = 1.0 + a * a + b * b;
            const double haa = (s - 2.0 * a * a) / (s * s) + kappa0;
            const double hbb = (s - 2.0 * b * b) / (s * s) + kappa0;
            const double hab = -2.0 * a * b / (s * s);
            const double eig = 0.5 * (haa + hbb) -
                               std::sqrt(0.25 * (haa - hbb) * (haa - hbb) + hab * hab);
            if (eig < rep.min_eigenvalue) {
                rep.min_eigenvalue = eig;
                rep.arg_a = a;
                rep.arg_b = b;
            }
        }
    }
    return rep;
}

}  // namespace nss
