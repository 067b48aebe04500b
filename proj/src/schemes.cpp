#include "nss/schemes.hpp"

#include <stdexcept>

namespace nss {

SchemeState::SchemeState(const SpectralGrid& grid, const Field& u0, double dt,
                         const ModelParams& p, StartupPolicy startup,
                         ForcingHook forcing)
    : grid_(&grid),
      ws_(std::make_unique<FftWorkspace>(grid)),
      tables_(build_tables(grid, p.eps, p.kappa, p.A, dt)),
      forcing_(std::move(forcing)) {
    if (u0.grid != &grid)
        throw std::invalid_argument("SchemeState: initial field grid mismatch");

    u_[0] = u0;
    u_[1] = u0;
    u_[2] = u0;
    u0_hat_ = ws_->transform(u_[0]);
    switch (startup) {
        case StartupPolicy::CopyInitial:
            f_[0] = eval_f_hat(u0_hat_, 0.0, p);
            f_[1] = eval_f_hat(u0_hat_, -dt, p);
            f_[2] = eval_f_hat(u0_hat_, -2.0 * dt, p);
            break;
        case StartupPolicy::Etd1Bootstrap:
            // u^0 is relabeled as the oldest level and two ETD1 steps fill
            // the rest, so the state starts at t = 2 dt.
            f_[0] = eval_f_hat(u0_hat_, 0.0, p);
            f_[1] = f_[0];
            f_[2] = f_[0];
            step(Scheme::Etd1, p);
            step(Scheme::Etd1, p);
            break;
    }
}

void SchemeState::restore(const Field& u_n, const Field& u_nm1,
                          const Field& u_nm2, double t, long step_count,
                          const ModelParams& p) {
    u_[0] = u_n;
    u_[1] = u_nm1;
    u_[2] = u_nm2;
    t_ = t;
    step_count_ = step_count;
    const double dt = tables_.dt;
    u0_hat_ = ws_->transform(u_[0]);
    f_[0] = eval_f_hat(u0_hat_, t_, p);
    f_[1] = eval_f_hat(ws_->transform(u_[1]), t_ - dt, p);
    f_[2] = eval_f_hat(ws_->transform(u_[2]), t_ - 2.0 * dt, p);
}

void SchemeState::set_forcing(ForcingHook hook) { forcing_ = std::move(hook); }

SpectralField SchemeState::eval_f_hat(const SpectralField& u_hat, double time,
                                      const ModelParams& p) {
    SpectralField f = nonlinear_f_hat(*ws_, u_hat, p);
    if (forcing_) {
        SpectralField F = ws_->transform(forcing_(*grid_, time));
        F.c[0] = 0.0;  // mean projection keeps the RHS divergence-form
        for (std::size_t m = 0; m < grid_->modes(); ++m) f.c[m] -= F.c[m];
    }
    return f;
}

void SchemeState::step(Scheme scheme, const ModelParams& p) {
    do_step(scheme, p, tables_);
}

void SchemeState::step(Scheme scheme, const ModelParams& p, double dt_override) {
    if (dt_override == tables_.dt) {
        do_step(scheme, p, tables_);
        return;
    }
    const PhiTables shortened =
        build_tables(*grid_, p.eps, p.kappa, p.A, dt_override);
    do_step(scheme, p, shortened);
}

void SchemeState::do_step(Scheme scheme, const ModelParams& p,
                          const PhiTables& tb) {
    const std::size_t n = grid_->modes();
    const double dt = tb.dt;
    SpectralField next(*grid_);

    switch (scheme) {
        case Scheme::Etd1:
            for (std::size_t m = 0; m < n; ++m)
                next.c[m] = tb.exp_neg[m] * u0_hat_.c[m] -
                            dt * tb.phi0[m] * f_[0].c[m];
            break;
        case Scheme::EtdMs2:
            for (std::size_t m = 0; m < n; ++m)
                next.c[m] = tb.exp_neg[m] * u0_hat_.c[m] -
                            dt * tb.phi0[m] * f_[0].c[m] -
                            dt * tb.phi1[m] * (f_[0].c[m] - f_[1].c[m]);
            break;
        case Scheme::Etd3:
            for (std::size_t m = 0; m < n; ++m) {
                const std::complex<double> d1 =
                    1.5 * f_[0].c[m] - 2.0 * f_[1].c[m] + 0.5 * f_[2].c[m];
                const std::complex<double> d2 =
                    0.5 * f_[0].c[m] - f_[1].c[m] + 0.5 * f_[2].c[m];
                const double reg = tb.reg_denom[m] - 1.0;  // A dt^3 phi0 lam^2
                const std::complex<double> num =
                    (tb.exp_neg[m] + reg) * u0_hat_.c[m] -
                    dt * tb.phi0[m] * f_[0].c[m] - dt * tb.phi1[m] * d1 -
                    dt * tb.phi2[m] * d2;
                next.c[m] = num / tb.reg_denom[m];
            }
            break;
    }

    u_[2] = std::move(u_[1]);
    u_[1] = std::move(u_[0]);
    u_[0] = ws_->inverse_transform(next);
    t_ += dt;
    ++step_count_;
    // Re-transforming the raster keeps every cached spectral quantity a
    // function of the stored real data, which checkpoint resume relies on.
    u0_hat_ = ws_->transform(u_[0]);
    f_[2] = std::move(f_[1]);
    f_[1] = std::move(f_[0]);
    f_[0] = eval_f_hat(u0_hat_, t_, p);
}

void SchemeState::change_dt(double new_dt, const ModelParams& p) {
    if (!(new_dt > 0.0))
        throw std::invalid_argument("change_dt: dt must be positive");
    tables_ = build_tables(*grid_, p.eps, p.kappa, p.A, new_dt);
    // restart policy of the schedule runs: u^{-1} = u^{-2} = u^0
    u_[1] = u_[0];
    u_[2] = u_[0];
    f_[0] = eval_f_hat(u0_hat_, t_, p);
    f_[1] = eval_f_hat(u0_hat_, t_ - new_dt, p);
    f_[2] = eval_f_hat(u0_hat_, t_ - 2.0 * new_dt, p);
}

}  // namespace nss
