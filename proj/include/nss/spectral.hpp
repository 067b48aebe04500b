#pragma once

#include <complex>
#include <span>
#include <vector>

// Periodic 2-D Fourier collocation grid and the diagonal operator toolkit.
// All spectral data is stored as full complex N x N arrays, row-major with
// the x index fastest: entry (iy, ix) lives at iy*N + ix and corresponds to
// the collocation point (x, y) = (ix*h, iy*h) or to the Fourier mode
// (k, l) = (wavenumber(ix), wavenumber(iy)).

namespace nss {

struct SpectralGrid {
    int N = 0;       // points per dimension, >= 4
    double L = 0.0;  // domain edge length
    double h = 0.0;  // grid spacing L/N

    // integer wavenumber for each FFT bin, in {-floor(N/2), ..., ceil(N/2)-1}
    std::vector<int> wavenumber;
    // first-derivative multiplier 2*pi*k/L per bin; zero at the Nyquist bin
    // for even N (the standard real-spectral convention)
    std::vector<double> deriv;
    // lambda_{k,l} = (2*pi*k/L)^2 + (2*pi*l/L)^2, N*N entries; the Laplacian
    // uses the full Nyquist wavenumber even when the derivative table zeroes it
    std::vector<double> lambda;

    std::size_t modes() const { return static_cast<std::size_t>(N) * N; }
    std::size_t index(int ix, int iy) const {
        return static_cast<std::size_t>(iy) * N + ix;
    }
};

// Throws std::invalid_argument for N < 4 or L <= 0.
SpectralGrid make_grid(int N, double L);

struct Field {
    const SpectralGrid* grid = nullptr;
    std::vector<double> v;

    Field() = default;
    explicit Field(const SpectralGrid& g) : grid(&g), v(g.modes(), 0.0) {}
};

struct SpectralField {
    const SpectralGrid* grid = nullptr;
    std::vector<std::complex<double>> c;

    SpectralField() = default;
    explicit SpectralField(const SpectralGrid& g) : grid(&g), c(g.modes()) {}
};

// FFT scratch space bound to one grid size. Transforms on distinct
// workspaces may run concurrently; a single workspace is single-owner.
class FftWorkspace {
  public:
    explicit FftWorkspace(const SpectralGrid& grid);
    ~FftWorkspace();
    FftWorkspace(const FftWorkspace&) = delete;
    FftWorkspace& operator=(const FftWorkspace&) = delete;

    // Coefficients follow f = sum_{k,l} fhat_{k,l} exp(2*pi*i*(k x + l y)/L),
    // so Parseval reads ||f||_2^2 = L^2 * sum |fhat|^2.
    SpectralField transform(const Field& f);
    Field inverse_transform(const SpectralField& F);

    const SpectralGrid& grid() const { return *grid_; }

  private:
    const SpectralGrid* grid_;
    void* plan_fwd_;  // fftw_plan
    void* plan_bwd_;
    std::complex<double>* buf_in_;
    std::complex<double>* buf_out_;
};

// ghat_{k,l} = m_{k,l} * fhat_{k,l}
SpectralField apply_diagonal(const SpectralField& F, std::span<const double> m);
void apply_diagonal_inplace(SpectralField& F, std::span<const double> m);

// Spectral differential operators at the point-wise level.
std::pair<Field, Field> grad(FftWorkspace& ws, const Field& f);
Field div(FftWorkspace& ws, const Field& fx, const Field& fy);
Field laplacian(FftWorkspace& ws, const Field& f);

struct Norms {
    double l1 = 0.0;    // h^2 * sum |f|
    double l2 = 0.0;    // sqrt(h^2 * sum f^2)
    double linf = 0.0;
    double mean = 0.0;  // h^2 * sum f / L^2
};
Norms norms(const Field& f);

double inner_product(const Field& f, const Field& g);  // h^2 sum f*g
double mean(const Field& f);

}  // namespace nss
