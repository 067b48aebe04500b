#pragma once

#include <optional>
#include <string>

#include "nss/spectral.hpp"

// No-slope-selection thin-film physics: the nonlinear term
// f_N(u) = div(grad u / (1 + |grad u|^2)) + kappa Lap u, the discrete and
// modified energies, coarsening observables, and the stability constants of
// the regularized third-order scheme.

namespace nss {

struct ModelParams {
    double eps = 0.1;    // surface diffusion coefficient
    double kappa = 0.25; // stabilization / splitting constant
    double A = 0.0;      // Douglas-Dupont regularization coefficient
    bool dealias = false;  // 3/2-rule padding of the nonlinear quotient
};

struct StabilityConstants {
    double C4 = 0.0;  // = C5 = 1/(1 - e^-2)
    double kappa0 = 0.125;
    double kappa_star = 0.0;  // kappa - kappa0
    double gamma1 = 0.0;      // (3/2) C4 (1 + kappa)
    double gamma2 = 0.0;      // C4 (1 + kappa)
    double gamma3 = 0.0;      // (1/2) C4 (1 + kappa)
    double gamma0 = 0.0;      // gamma1 + gamma2 + gamma3
    double alpha0 = 0.0;      // ln((gamma0 + kappa/2)/(gamma0 - kappa/2))
    double A_min = 0.0;       // (gamma0 - kappa/4)^4 alpha0^-2 eps^-2
    bool hypotheses_met = true;  // kappa >= 1/4
    std::string warning;
};

struct Observables {
    double t = 0.0;
    double energy = 0.0;
    double modified_energy = 0.0;
    double roughness = 0.0;   // h(t)
    double slope = 0.0;       // m(t)
    std::optional<double> char_length;  // h/m, absent for flat fields
    double mass_mean = 0.0;
};

// Pseudo-spectral f_N(u); mean-zero up to roundoff since it is a divergence.
Field nonlinear_f(FftWorkspace& ws, const Field& u, const ModelParams& p);
SpectralField nonlinear_f_hat(FftWorkspace& ws, const SpectralField& u_hat,
                              const ModelParams& p);

// g_N(u) = grad u/(1+|grad u|^2) + kappa grad u, so f_N(u) = div g_N(u).
std::pair<Field, Field> g_vector(FftWorkspace& ws, const Field& u,
                                 const ModelParams& p);

// E_N(u) = h^2 sum(-1/2 ln(1+|grad u|^2)) + (eps^2/2) ||Lap u||_2^2
double energy(FftWorkspace& ws, const Field& u, const ModelParams& p);

// E_N(u^{n+1}) + gamma1 ||grad(u^{n+1}-u^n)||^2 + gamma3 ||grad(u^n-u^{n-1})||^2
double modified_energy(FftWorkspace& ws, const Field& u_np1, const Field& u_n,
                       const Field& u_nm1, const StabilityConstants& sc,
                       const ModelParams& p);

Observables observables(FftWorkspace& ws, const Field& u, const ModelParams& p,
                        double t);

// kappa >= 1/4 required by the energy stability theorem; for smaller kappa
// the constants are still computed where defined and a warning is set.
StabilityConstants stability_constants(const ModelParams& p);

// gamma = (L^2/2)(ln(4 eps^2 pi^2 / L^2) - 4 eps^2 pi^2 / L^2 + 1)
double energy_lower_bound(double eps, double L);

struct ConvexityReport {
    double min_eigenvalue = 0.0;
    double arg_a = 0.0, arg_b = 0.0;  // sample attaining the minimum
};

// Samples the Hessian of H(a,b) = 1/2 ln(1+a^2+b^2) + kappa0/2 (a^2+b^2)
// on [-50,50]^2; H is convex iff kappa0 >= 1/8.
ConvexityReport convexity_check(double kappa0, int samples_per_dim);

}  // namespace nss
