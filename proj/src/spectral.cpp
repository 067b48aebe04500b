#include "nss/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace nss {

namespace {
// FFTW plan creation is not thread-safe; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

SpectralGrid make_grid(int N, double L) {
    if (N < 4) throw std::invalid_argument("make_grid: N must be >= 4");
    if (!(L > 0.0)) throw std::invalid_argument("make_grid: L must be positive");

    SpectralGrid g;
    g.N = N;
    g.L = L;
    g.h = L / N;
    g.wavenumber.resize(N);
    g.deriv.resize(N);
    const double two_pi_over_L = 2.0 * std::numbers::pi / L;
    for (int j = 0; j < N; ++j) {
        int k = (j < (N + 1) / 2) ? j : j - N;
        g.wavenumber[j] = k;
        bool nyquist = (N % 2 == 0) && (j == N / 2);
        g.deriv[j] = nyquist ? 0.0 : two_pi_over_L * k;
    }
    g.lambda.resize(g.modes());
    for (int iy = 0; iy < N; ++iy) {
        const double ky = two_pi_over_L * g.wavenumber[iy];
        for (int ix = 0; ix < N; ++ix) {
            const double kx = two_pi_over_L * g.wavenumber[ix];
            g.lambda[g.index(ix, iy)] = kx * kx + ky * ky;
        }
    }
    return g;
}

FftWorkspace::FftWorkspace(const SpectralGrid& grid) : grid_(&grid) {
    const int N = grid.N;
    buf_in_ = reinterpret_cast<std::complex<double>*>(
        fftw_malloc(sizeof(fftw_complex) * grid.modes()));
    buf_out_ = reinterpret_cast<std::complex<double>*>(
        fftw_malloc(sizeof(fftw_complex) * grid.modes()));
    if (!buf_in_ || !buf_out_) throw std::bad_alloc();

    std::lock_guard<std::mutex> lock(planner_mutex());
    plan_fwd_ = fftw_plan_dft_2d(N, N, reinterpret_cast<fftw_complex*>(buf_in_),
                                 reinterpret_cast<fftw_complex*>(buf_out_),
                                 FFTW_FORWARD, FFTW_ESTIMATE);
    plan_bwd_ = fftw_plan_dft_2d(N, N, reinterpret_cast<fftw_complex*>(buf_in_),
                                 reinterpret_cast<fftw_complex*>(buf_out_),
                                 FFTW_BACKWARD, FFTW_ESTIMATE);
}

FftWorkspace::~FftWorkspace() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
    fftw_free(buf_in_);
    fftw_free(buf_out_);
}

SpectralField FftWorkspace::transform(const Field& f) {
    if (f.grid != grid_)
        throw std::invalid_argument("transform: field grid does not match workspace");
    const std::size_t n = grid_->modes();
    for (std::size_t i = 0; i < n; ++i) buf_in_[i] = f.v[i];
    fftw_execute(static_cast<fftw_plan>(plan_fwd_));
    SpectralField F(*grid_);
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) F.c[i] = buf_out_[i] * scale;
    return F;
}

Field FftWorkspace::inverse_transform(const SpectralField& F) {
    if (F.grid != grid_)
        throw std::invalid_argument("inverse_transform: grid mismatch");
    const std::size_t n = grid_->modes();
    std::memcpy(buf_in_, F.c.data(), n * sizeof(std::complex<double>));
    fftw_execute(static_cast<fftw_plan>(plan_bwd_));
    Field f(*grid_);
    for (std::size_t i = 0; i < n; ++i) f.v[i] = buf_out_[i].real();
    return f;
}

SpectralField apply_diagonal(const SpectralField& F, std::span<const double> m) {
    if (m.size() != F.c.size())
        throw std::invalid_argument("apply_diagonal: table size mismatch");
    SpectralField G = F;
    for (std::size_t i = 0; i < m.size(); ++i) G.c[i] *= m[i];
    return G;
}

void apply_diagonal_inplace(SpectralField& F, std::span<const double> m) {
    if (m.size() != F.c.size())
        throw std::invalid_argument("apply_diagonal: table size mismatch");
    for (std::size_t i = 0; i < m.size(); ++i) F.c[i] *= m[i];
}

std::pair<Field, Field> grad(FftWorkspace& ws, const Field& f) {
    const SpectralGrid& g = ws.grid();
    SpectralField F = ws.transform(f);
    SpectralField Fx(g), Fy(g);
    const std::complex<double> I(0.0, 1.0);
    for (int iy = 0; iy < g.N; ++iy)
        for (int ix = 0; ix < g.N; ++ix) {
            const std::size_t m = g.index(ix, iy);
            Fx.c[m] = I * g.deriv[ix] * F.c[m];
            Fy.c[m] = I * g.deriv[iy] * F.c[m];
        }
    return {ws.inverse_transform(Fx), ws.inverse_transform(Fy)};
}

Field div(FftWorkspace& ws, const Field& fx, const Field& fy) {
    const SpectralGrid& g = ws.grid();
    SpectralField Fx = ws.transform(fx);
    SpectralField Fy = ws.transform(fy);
    const std::complex<double> I(0.0, 1.0);
    for (int iy = 0; iy < g.N; ++iy)
        for (int ix = 0; ix < g.N; ++ix) {
            const std::size_t m = g.index(ix, iy);
            Fx.c[m] = I * g.deriv[ix] * Fx.c[m] + I * g.deriv[iy] * Fy.c[m];
        }
    return ws.inverse_transform(Fx);
}

Field laplacian(FftWorkspace& ws, const Field& f) {
    const SpectralGrid& g = ws.grid();
    SpectralField F = ws.transform(f);
    for (std::size_t m = 0; m < g.modes(); ++m) F.c[m] *= -g.lambda[m];
    return ws.inverse_transform(F);
}

Norms norms(const Field& f) {
    Norms n;
    const double h2 = f.grid->h * f.grid->h;
    double sum = 0.0, sum_abs = 0.0, sum_sq = 0.0;
    for (double x : f.v) {
        sum += x;
        sum_abs += std::abs(x);
        sum_sq += x * x;
        n.linf = std::max(n.linf, std::abs(x));
    }
    n.l1 = h2 * sum_abs;
    n.l2 = std::sqrt(h2 * sum_sq);
    n.mean = h2 * sum / (f.grid->L * f.grid->L);
    return n;
}

double inner_product(const Field& f, const Field& g) {
    if (f.grid != g.grid)
        throw std::invalid_argument("inner_product: grid mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < f.v.size(); ++i) s += f.v[i] * g.v[i];
    return f.grid->h * f.grid->h * s;
}

double mean(const Field& f) {
    double s = 0.0;
    for (double x : f.v) s += x;
    return s / static_cast<double>(f.v.size());
}

}  // namespace nss
