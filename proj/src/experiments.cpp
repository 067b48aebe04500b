#include "nss/experiments.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace nss {

namespace {
constexpr double kTimeTol = 1e-9;

struct LineFit {
    double slope = 0.0, intercept = 0.0, rms = 0.0, slope_stderr = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    LineFit f;
    const double denom = n * sxx - sx * sx;
    f.slope = (n * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / n;
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (f.slope * x[i] + f.intercept);
        ss += r * r;
    }
    f.rms = std::sqrt(ss / n);
    if (n > 2) {
        const double var = ss / (n - 2) / (sxx - sx * sx / n);
        f.slope_stderr = std::sqrt(var);
    }
    return f;
}
}  // namespace

Field manufactured_profile(const SpectralGrid& grid, double t) {
    Field u(grid);
    const double two_pi = 2.0 * std::numbers::pi;
    const double ct = std::cos(t);
    for (int iy = 0; iy < grid.N; ++iy)
        for (int ix = 0; ix < grid.N; ++ix)
            u.v[grid.index(ix, iy)] = std::sin(two_pi * ix * grid.h / grid.L) *
                                      std::cos(two_pi * iy * grid.h / grid.L) * ct;
    return u;
}

Field manufactured_forcing(FftWorkspace& ws, const SpectralGrid& grid, double t,
                           double eps) {
    // F = dU/dt + eps^2 Lap^2 U + div(grad U / (1 + |grad U|^2)); the kappa
    // terms of L and f_N cancel in the PDE.
    Field U = manufactured_profile(grid, t);
    const double tan_t = std::sin(t) / std::cos(t);  // dU/dt = -U tan(t)

    SpectralField U_hat = ws.transform(U);
    ModelParams quotient_only;
    quotient_only.eps = eps;
    quotient_only.kappa = 0.0;
    SpectralField F_hat = nonlinear_f_hat(ws, U_hat, quotient_only);
    for (std::size_t m = 0; m < grid.modes(); ++m)
        F_hat.c[m] += eps * eps * grid.lambda[m] * grid.lambda[m] * U_hat.c[m];
    Field F = ws.inverse_transform(F_hat);
    for (std::size_t m = 0; m < grid.modes(); ++m)
        F.v[m] -= U.v[m] * tan_t;  // -sin(2pix)cos(2piy)sin(t)
    return F;
}

ConvergenceResult run_convergence(const ConvergenceConfig& cfg) {
    if (cfg.Ns.size() < 2)
        throw std::invalid_argument("run_convergence: need at least two N values");
    ConvergenceResult res;
    for (int N : cfg.Ns) {
        SpectralGrid grid = make_grid(N, 1.0);
        FftWorkspace hook_ws(grid);
        const double eps = cfg.eps;
        ForcingHook hook = [&hook_ws, eps](const SpectralGrid& g, double t) {
            return manufactured_forcing(hook_ws, g, t, eps);
        };
        ModelParams p;
        p.eps = cfg.eps;
        p.kappa = cfg.kappa;
        p.A = cfg.A;
        const double dt = cfg.cfl * grid.h;
        SchemeState state(grid, manufactured_profile(grid, 0.0), dt, p,
                          StartupPolicy::CopyInitial, hook);
        const long n_full = static_cast<long>(std::floor(cfg.T / dt + kTimeTol));
        for (long s = 0; s < n_full; ++s) state.step(Scheme::Etd3, p);
        const double rem = cfg.T - state.t();
        if (rem > kTimeTol) state.step(Scheme::Etd3, p, rem);

        Field exact = manufactured_profile(grid, cfg.T);
        Field err(grid);
        const Field& u = state.u();
        for (std::size_t m = 0; m < grid.modes(); ++m)
            err.v[m] = u.v[m] - exact.v[m];
        const Norms ne = norms(err);
        res.rows.push_back({N, grid.h, dt, ne.l1, ne.l2, ne.linf});
    }

    std::vector<double> logN, l1, l2, li;
    for (const auto& r : res.rows) {
        logN.push_back(std::log(static_cast<double>(r.N)));
        l1.push_back(std::log(r.err_l1));
        l2.push_back(std::log(r.err_l2));
        li.push_back(std::log(r.err_linf));
    }
    res.order_l1 = -least_squares(logN, l1).slope;
    LineFit f2 = least_squares(logN, l2);
    res.order_l2 = -f2.slope;
    res.slope_stderr_l2 = f2.slope_stderr;
    res.order_linf = -least_squares(logN, li).slope;
    return res;
}

Field random_initial_data(const SpectralGrid& grid, std::uint64_t seed,
                          double amplitude) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-amplitude, amplitude);
    Field u(grid);
    for (double& x : u.v) x = dist(rng);
    const double m = mean(u);
    for (double& x : u.v) x -= m;
    return u;
}

namespace {

void sample_row(SchemeState& state, const ModelParams& p,
                const StabilityConstants& sc, CoarseningTrace& trace) {
    FftWorkspace& ws = state.workspace();
    Observables o = observables(ws, state.u(), p, state.t());
    TraceRow row;
    row.t = o.t;
    row.energy = o.energy;
    row.modified_energy =
        modified_energy(ws, state.u(), state.u_prev(), state.u_prev2(), sc, p);
    row.roughness = o.roughness;
    row.slope = o.slope;
    row.char_length = o.char_length;
    row.mass_mean = o.mass_mean;
    trace.rows.push_back(row);
}

void advance_schedule(SchemeState& state, const CoarseningConfig& cfg,
                      const ModelParams& p, const StabilityConstants& sc,
                      CoarseningTrace& trace, const StepCallback& on_step) {
    // anchored to multiples of the cadence so a resumed run samples at the
    // same instants as the original
    long sample_idx =
        static_cast<long>(std::floor(state.t() / cfg.sample_interval + kTimeTol)) + 1;
    double next_sample = sample_idx * cfg.sample_interval;
    for (const ScheduleSegment& seg : cfg.schedule) {
        if (state.t() >= seg.t_end - kTimeTol) continue;
        if (state.dt() != seg.dt) state.change_dt(seg.dt, p);
        while (state.t() < seg.t_end - kTimeTol) {
            const double rem = seg.t_end - state.t();
            if (rem < seg.dt * (1.0 - kTimeTol))
                state.step(Scheme::Etd3, p, rem);
            else
                state.step(Scheme::Etd3, p);
            if (on_step) on_step(state);
            if (state.t() >= next_sample - kTimeTol) {
                sample_row(state, p, sc, trace);
                while (next_sample <= state.t() + kTimeTol)
                    next_sample = ++sample_idx * cfg.sample_interval;
            }
        }
    }
}

ModelParams params_of(const CoarseningConfig& cfg) {
    ModelParams p;
    p.eps = cfg.eps;
    p.kappa = cfg.kappa;
    p.A = cfg.A;
    p.dealias = cfg.dealias;
    return p;
}

}  // namespace

CoarseningTrace run_coarsening(const CoarseningConfig& cfg,
                               const StepCallback& on_step) {
    if (cfg.schedule.empty())
        throw std::invalid_argument("run_coarsening: empty schedule");
    SpectralGrid grid = make_grid(cfg.N, cfg.L);
    Field u0 = random_initial_data(grid, cfg.seed, cfg.init_amplitude);
    ModelParams p = params_of(cfg);
    if (cfg.smooth_init) {
        FftWorkspace ws(grid);
        PhiTables tb = build_tables(grid, cfg.eps, cfg.kappa, cfg.A,
                                    cfg.schedule.front().dt);
        SpectralField uh = ws.transform(u0);
        apply_diagonal_inplace(uh, tb.exp_neg);
        u0 = ws.inverse_transform(uh);
    }

    CoarseningTrace trace;
    trace.cfg = cfg;
    SchemeState state(grid, u0, cfg.schedule.front().dt, p,
                      StartupPolicy::CopyInitial);
    StabilityConstants sc = stability_constants(p);
    sample_row(state, p, sc, trace);
    advance_schedule(state, cfg, p, sc, trace, on_step);
    return trace;
}

void continue_coarsening(SchemeState& state, const CoarseningConfig& cfg,
                         CoarseningTrace& trace, const StepCallback& on_step) {
    ModelParams p = params_of(cfg);
    StabilityConstants sc = stability_constants(p);
    trace.cfg = cfg;
    advance_schedule(state, cfg, p, sc, trace, on_step);
}

FitResult fit_scaling(const CoarseningTrace& trace, FitKind kind, double t_lo,
                      double t_hi) {
    std::vector<double> x, y;
    for (const TraceRow& r : trace.rows) {
        if (r.t < t_lo || r.t > t_hi || r.t <= 0.0) continue;
        switch (kind) {
            case FitKind::SemilogEnergy:
                x.push_back(std::log(r.t));
                y.push_back(r.energy);
                break;
            case FitKind::LoglogRoughness:
                if (r.roughness <= 0.0) continue;
                x.push_back(std::log(r.t));
                y.push_back(std::log(r.roughness));
                break;
            case FitKind::LoglogSlope:
                if (r.slope <= 0.0) continue;
                x.push_back(std::log(r.t));
                y.push_back(std::log(r.slope));
                break;
        }
    }
    if (x.size() < 10)
        throw std::invalid_argument("fit_scaling: fewer than 10 samples in window");
    const LineFit f = least_squares(x, y);
    FitResult res;
    res.kind = kind;
    res.t_lo = t_lo;
    res.t_hi = t_hi;
    res.samples = x.size();
    res.residual_rms = f.rms;
    if (kind == FitKind::SemilogEnergy) {
        res.a = f.slope;
        res.b = f.intercept;
    } else {
        res.a = std::exp(f.intercept);
        res.b = f.slope;
    }
    return res;
}

std::optional<double> saturation_estimate(const FitResult& fit_energy,
                                          double gamma) {
    if (fit_energy.kind != FitKind::SemilogEnergy || fit_energy.a >= 0.0)
        return std::nullopt;
    return std::exp((gamma - fit_energy.b) / fit_energy.a);
}

}  // namespace nss
