#pragma once

#include <functional>
#include <memory>

#include "nss/etdphi.hpp"
#include "nss/model.hpp"
#include "nss/spectral.hpp"

// ETD time steppers for the NSS gradient flow: ETD1, ETDMs2, ETDMs3 and the
// regularized third-order scheme (A > 0). All updates are per-mode scalar
// operations in Fourier space; one nonlinear evaluation per step.

namespace nss {

enum class StartupPolicy {
    CopyInitial,    // u^{-1} = u^{-2} = u^0
    Etd1Bootstrap,  // two ETD1 steps forward, relabeled as history
};

enum class Scheme { Etd1, EtdMs2, Etd3 };

// Optional time-dependent source, sampled on the grid; folded into the
// cached nonlinear evaluation at each history level's time.
using ForcingHook = std::function<Field(const SpectralGrid&, double t)>;

// The solution history is held as real-space rasters; every cached spectral
// quantity is recomputed from them, so a state restored from raster data
// replays a run bit-for-bit.
class SchemeState {
  public:
    SchemeState(const SpectralGrid& grid, const Field& u0, double dt,
                const ModelParams& p, StartupPolicy startup,
                ForcingHook forcing = {});

    double t() const { return t_; }
    double dt() const { return tables_.dt; }
    long step_count() const { return step_count_; }
    const SpectralGrid& grid() const { return *grid_; }
    const PhiTables& tables() const { return tables_; }
    FftWorkspace& workspace() { return *ws_; }

    const Field& u() const { return u_[0]; }        // current solution u^n
    const Field& u_prev() const { return u_[1]; }   // u^{n-1}
    const Field& u_prev2() const { return u_[2]; }  // u^{n-2}

    // Restore from checkpointed rasters; cached evaluations are recomputed.
    void restore(const Field& u_n, const Field& u_nm1, const Field& u_nm2,
                 double t, long step_count, const ModelParams& p);

    void set_forcing(ForcingHook hook);

    // Advance one step with the requested scheme. Overriding dt shortens a
    // single step (tables rebuilt for that step only), used for final-time
    // alignment.
    void step(Scheme scheme, const ModelParams& p);
    void step(Scheme scheme, const ModelParams& p, double dt_override);

    // Rebuild tables for a new step size and apply the restart policy
    // u^{-1} = u^{-2} = u^0 (current solution untouched).
    void change_dt(double new_dt, const ModelParams& p);

  private:
    SpectralField eval_f_hat(const SpectralField& u_hat, double time,
                             const ModelParams& p);
    void do_step(Scheme scheme, const ModelParams& p, const PhiTables& tables);

    const SpectralGrid* grid_;
    std::unique_ptr<FftWorkspace> ws_;
    double t_ = 0.0;
    long step_count_ = 0;
    PhiTables tables_;
    ForcingHook forcing_;
    // index 0 = level n, 1 = n-1, 2 = n-2
    Field u_[3];
    SpectralField u0_hat_;  // transform of u_[0]
    SpectralField f_[3];    // cached nonlinear evaluations (minus forcing)
};

}  // namespace nss
