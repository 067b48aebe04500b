#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "nss/model.hpp"
#include "nss/schemes.hpp"

// Reproduction drivers: manufactured-solution convergence study, long-time
// coarsening runs and scaling-law fits.

namespace nss {

struct ConvergenceRow {
    int N = 0;
    double h = 0.0;
    double dt = 0.0;
    double err_l1 = 0.0;
    double err_l2 = 0.0;
    double err_linf = 0.0;
};

struct ConvergenceResult {
    std::vector<ConvergenceRow> rows;
    // least-squares slope of log(err) vs log(N); third order gives ~ -3
    double order_l1 = 0.0;
    double order_l2 = 0.0;
    double order_linf = 0.0;
    double slope_stderr_l2 = 0.0;
};

struct ConvergenceConfig {
    std::vector<int> Ns;
    double eps = 0.5;
    double kappa = 0.125;
    double A = 1.0;
    double cfl = 0.5;  // dt = cfl * h
    double T = 1.0;
};

// Manufactured profile U = sin(2 pi x) cos(2 pi y) cos(t) on (0,1)^2; the
// forcing is derived pseudo-spectrally from the sampled profile.
Field manufactured_profile(const SpectralGrid& grid, double t);
Field manufactured_forcing(FftWorkspace& ws, const SpectralGrid& grid, double t,
                           double eps);

ConvergenceResult run_convergence(const ConvergenceConfig& cfg);

struct ScheduleSegment {
    double t_end = 0.0;
    double dt = 0.0;
};

struct CoarseningConfig {
    double eps = 0.02;
    double kappa = 0.25;
    double A = 0.0;
    bool dealias = false;
    double L = 12.8;
    int N = 512;
    std::vector<ScheduleSegment> schedule;
    std::uint64_t seed = 1;
    double init_amplitude = 0.05;
    bool smooth_init = false;  // one e^{-dt0 L_N} application to the noise
    double sample_interval = 1.0;
};

struct TraceRow {
    double t = 0.0;
    double energy = 0.0;
    double modified_energy = 0.0;
    double roughness = 0.0;
    double slope = 0.0;
    std::optional<double> char_length;
    double mass_mean = 0.0;
};

struct CoarseningTrace {
    std::vector<TraceRow> rows;
    CoarseningConfig cfg;
};

Field random_initial_data(const SpectralGrid& grid, std::uint64_t seed,
                          double amplitude);

// Invoked after each step; may persist checkpoints or abort the run.
using StepCallback = std::function<void(SchemeState&)>;

CoarseningTrace run_coarsening(const CoarseningConfig& cfg,
                               const StepCallback& on_step = {});

// Continue an existing state through the remainder of cfg's schedule,
// appending samples to trace. Used for checkpoint resume.
void continue_coarsening(SchemeState& state, const CoarseningConfig& cfg,
                         CoarseningTrace& trace,
                         const StepCallback& on_step = {});

enum class FitKind { SemilogEnergy, LoglogRoughness, LoglogSlope };

struct FitResult {
    FitKind kind = FitKind::SemilogEnergy;
    double t_lo = 0.0, t_hi = 0.0;
    double a = 0.0, b = 0.0;  // semilog: a ln t + b;  loglog: a t^b
    double residual_rms = 0.0;
    std::size_t samples = 0;
};

// Ordinary least squares on the transformed coordinates. Requires >= 10
// samples inside the window.
FitResult fit_scaling(const CoarseningTrace& trace, FitKind kind, double t_lo,
                      double t_hi);

// t* solving a ln t* + b = gamma for a semilog fit with a < 0.
std::optional<double> saturation_estimate(const FitResult& fit_energy,
                                          double gamma);

}  // namespace nss
