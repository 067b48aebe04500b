#pragma once

#include <string>
#include <vector>

#include "nss/spectral.hpp"

// Stable evaluation of the g/phi function family
//   g0(x) = (1 - e^-x)/x
//   g1(x) = (x - 1 + e^-x)/x^2
//   g2(x) = (x^2 - 2x + 2 - 2 e^-x)/x^3
// and the per-mode multiplier tables used by the ETD schemes. phi_i and g_i
// coincide as scalar functions of x = dt*Lambda.

namespace nss {

struct GValues {
    double g0, g1, g2;
};

// Relative error <= 1e-13 over x in [0, 700]; expm1-based closed forms above
// the cancellation threshold, Taylor series below, e^-x flushed past 700.
// Throws std::invalid_argument for negative or non-finite x.
GValues eval_g(double x);

struct PhiTables {
    double dt = 0.0;
    double eps = 0.0, kappa = 0.0, A = 0.0;
    std::vector<double> Lambda;     // eps^2 lambda^2 + kappa lambda
    std::vector<double> exp_neg;    // e^{-dt Lambda}
    std::vector<double> phi0, phi1, phi2;
    std::vector<double> G1, G2;     // g1/g0, g2/g0
    std::vector<double> calG;       // 1/g0
    std::vector<double> calG_half;  // sqrt(1/g0)
    std::vector<double> reg_denom;  // 1 + A dt^3 phi0 lambda^2
};

// Zero mode takes the x -> 0 limits: exp_neg=1, phi=(1, 1/2, 1/3),
// G1=1/2, G2=1/3, calG=1, reg_denom=1.
PhiTables build_tables(const SpectralGrid& grid, double eps, double kappa,
                       double A, double dt);

struct OperatorBoundsReport {
    bool ok = true;
    // slack of each inequality (nonnegative means satisfied)
    double margin_calg_half = 0.0;  // ||G^(0) f||^2 - ||f||^2
    double margin_gn_lower = 0.0;   // <G f, f> - dt <L f, f>
    double margin_cross = 0.0;      // <L f, -Lap e^{-dt L} f>
    double margin_g1 = 0.0;         // C4 ||f|| - ||G1 f||
    double margin_g2 = 0.0;         // C5 ||f|| - ||G2 f||
    std::string detail;             // offending mode data when !ok
};

// Checks the operator inequalities for a mean-zero grid function by applying
// the actual diagonal tables and forming the discrete inner products.
OperatorBoundsReport check_operator_bounds(const SpectralGrid& grid,
                                           const PhiTables& tables,
                                           FftWorkspace& ws, const Field& f,
                                           double slack = 1e-12);

}  // namespace nss
