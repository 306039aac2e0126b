#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "ellsys/tensor.hpp"

namespace ellsys {

/// Periodic surrogate for R^n: G points per axis on the cell [0, L)^n.
///
/// Flat point indices are row-major with axis 0 slowest. Frequencies use the
/// signed representatives k in [-G/2, G/2), physical frequency z = k / L.
class PeriodicGrid {
public:
    static constexpr int kMaxDim = 4;

    PeriodicGrid() = default;
    PeriodicGrid(int n, int G, double L = 1.0);

    int n() const { return n_; }
    int G() const { return G_; }
    double L() const { return L_; }
    double spacing() const { return L_ / G_; }
    std::size_t size() const { return size_; }
    /// h^n, the Riemann-sum weight.
    double cell_weight() const;

    std::array<int, kMaxDim> multi_index(std::size_t flat) const;
    std::size_t flat_index(std::span<const int> idx) const;

    /// Signed representative of an axis index.
    int signed_frequency(int idx) const { return idx < G_ / 2 ? idx : idx - G_; }
    /// Index that holds frequency -k for the frequency stored at `flat`.
    std::size_t negated_index(std::size_t flat) const;
    /// True when any axis sits on index -G/2.
    bool on_nyquist(std::size_t flat) const;
    /// Physical frequency vector z = k/L at a flat spectral index.
    Vector frequency(std::size_t flat) const;
    /// Physical coordinates of the grid point at a flat index.
    Vector point(std::size_t flat) const;

    bool operator==(const PeriodicGrid& o) const { return n_ == o.n_ && G_ == o.G_ && L_ == o.L_; }

private:
    int n_ = 0;
    int G_ = 0;
    double L_ = 1.0;
    std::size_t size_ = 0;
};

/// Real vector field sampled on a grid; values are component-major
/// (component slowest, then the flat grid index).
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(PeriodicGrid grid, int components);
    GridFunction(PeriodicGrid grid, int components, std::vector<double> values);

    const PeriodicGrid& grid() const { return grid_; }
    int components() const { return components_; }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    std::span<const double> component(int c) const;
    std::span<double> component(int c);
    double& at(int c, std::size_t p) { return values_[static_cast<std::size_t>(c) * grid_.size() + p]; }
    double at(int c, std::size_t p) const { return values_[static_cast<std::size_t>(c) * grid_.size() + p]; }

    /// Components at one point gathered into a vector (stride = grid size).
    Vector point_value(std::size_t p) const;

    GridFunction& operator+=(const GridFunction& o);
    GridFunction& operator-=(const GridFunction& o);
    GridFunction& operator*=(double c);

private:
    PeriodicGrid grid_;
    int components_ = 0;
    std::vector<double> values_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(double c, GridFunction a);

/// Samples fn(x) -> C values at every grid point.
GridFunction sample_field(const PeriodicGrid& grid, int components,
                          const std::function<void(const Vector& x, std::span<double> out)>& fn);

/// Complex Fourier coefficients, same layout as GridFunction.
class SpectralField {
public:
    using Complex = std::complex<double>;

    SpectralField() = default;
    SpectralField(PeriodicGrid grid, int components);

    const PeriodicGrid& grid() const { return grid_; }
    int components() const { return components_; }
    std::span<const Complex> coefficients() const { return coeffs_; }
    std::span<Complex> coefficients() { return coeffs_; }
    std::span<const Complex> component(int c) const;
    std::span<Complex> component(int c);
    Complex& at(int c, std::size_t k) { return coeffs_[static_cast<std::size_t>(c) * grid_.size() + k]; }
    Complex at(int c, std::size_t k) const { return coeffs_[static_cast<std::size_t>(c) * grid_.size() + k]; }

    /// Largest |c(-z) - conj(c(z))| over all modes and components.
    double hermitian_defect() const;

private:
    PeriodicGrid grid_;
    int components_ = 0;
    std::vector<Complex> coeffs_;
};

/// c_k = G^{-n} sum_x u(x) exp(-2 pi i k.x / L); the transform of exp(2 pi i k.x/L) is a unit impulse.
SpectralField dft_forward(const GridFunction& u);
/// Inverse transform; returns the real part.
GridFunction dft_inverse(const SpectralField& U);

/// Zeroes every mode on a Nyquist plane; returns the removed energy (Plancherel weighted).
double remove_nyquist(SpectralField& U);

/// Spectral gradient, component alpha*n + j holds D_j u_alpha. Nyquist planes are zeroed.
GridFunction gradient(const GridFunction& u);
/// Gradient of a field already in frequency space, returned in frequency space.
SpectralField gradient_spectral(const SpectralField& U);

/// (h^n sum_x |u(x)|^p)^{1/p} with |.| the Euclidean norm over components.
double norm_lp(const GridFunction& u, double p);
double norm_l2(const GridFunction& u);
double norm_linf(const GridFunction& u);
/// L^{2*} norm, 2* = 2n/(n-2); needs n >= 3.
double norm_l2star(const GridFunction& u);
double conjugate_exponent(int n);
/// sqrt(L^n sum |c|^2), equal to norm_l2 of the inverse transform.
double spectral_norm_l2(const SpectralField& U);

struct MeanProjection {
    GridFunction field;
    Vector dropped_mean;
};
MeanProjection project_mean_zero(const GridFunction& u);

/// Real field whose spectrum sits on 0 < max|k_i| <= kmax (Nyquist excluded) with
/// independent standard normal coefficients; zero mean by construction.
GridFunction random_band_limited(const PeriodicGrid& grid, int components, int kmax, std::uint64_t seed);

}  // namespace ellsys
