#include "ellsys/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ellsys/errors.hpp"
#include "ellsys/rng.hpp"
#include "fft.hpp"

namespace ellsys {

PeriodicGrid::PeriodicGrid(int n, int G, double L) : n_(n), G_(G), L_(L) {
    if (n < 2 || n > kMaxDim) throw DimensionError("grid dimension must be in [2, 4], got " + std::to_string(n));
    if (G < 4 || G % 2 != 0) throw DimensionError("points per axis must be even and >= 4, got " + std::to_string(G));
    if (!(L > 0.0) || !std::isfinite(L)) throw InputError("period length must be positive and finite");
    size_ = 1;
    for (int i = 0; i < n; ++i) size_ *= static_cast<std::size_t>(G);
}

double PeriodicGrid::cell_weight() const { return std::pow(spacing(), n_); }

std::array<int, PeriodicGrid::kMaxDim> PeriodicGrid::multi_index(std::size_t flat) const {
    std::array<int, kMaxDim> idx{};
    for (int axis = n_ - 1; axis >= 0; --axis) {
        idx[static_cast<std::size_t>(axis)] = static_cast<int>(flat % static_cast<std::size_t>(G_));
        flat /= static_cast<std::size_t>(G_);
    }
    return idx;
}

std::size_t PeriodicGrid::flat_index(std::span<const int> idx) const {
    std::size_t flat = 0;
    for (int axis = 0; axis < n_; ++axis) {
        const int i = ((idx[static_cast<std::size_t>(axis)] % G_) + G_) % G_;
        flat = flat * static_cast<std::size_t>(G_) + static_cast<std::size_t>(i);
    }
    return flat;
}

std::size_t PeriodicGrid::negated_index(std::size_t flat) const {
    auto idx = multi_index(flat);
    for (int axis = 0; axis < n_; ++axis) idx[static_cast<std::size_t>(axis)] = -idx[static_cast<std::size_t>(axis)];
    return flat_index(std::span<const int>(idx.data(), static_cast<std::size_t>(n_)));
}

bool PeriodicGrid::on_nyquist(std::size_t flat) const {
    const auto idx = multi_index(flat);
    for (int axis = 0; axis < n_; ++axis)
        if (idx[static_cast<std::size_t>(axis)] == G_ / 2) return true;
    return false;
}

Vector PeriodicGrid::frequency(std::size_t flat) const {
    const auto idx = multi_index(flat);
    Vector z(n_);
    for (int axis = 0; axis < n_; ++axis) z(axis) = signed_frequency(idx[static_cast<std::size_t>(axis)]) / L_;
    return z;
}

Vector PeriodicGrid::point(std::size_t flat) const {
    const auto idx = multi_index(flat);
    Vector x(n_);
    for (int axis = 0; axis < n_; ++axis) x(axis) = idx[static_cast<std::size_t>(axis)] * spacing();
    return x;
}

GridFunction::GridFunction(PeriodicGrid grid, int components)
    : grid_(grid), components_(components), values_(static_cast<std::size_t>(components) * grid.size(), 0.0) {
    if (components < 1) throw DimensionError("a grid function needs at least one component");
}

GridFunction::GridFunction(PeriodicGrid grid, int components, std::vector<double> values)
    : grid_(grid), components_(components), values_(std::move(values)) {
    if (components < 1) throw DimensionError("a grid function needs at least one component");
    if (values_.size() != static_cast<std::size_t>(components) * grid_.size()) {
        throw DimensionError("grid function payload has " + std::to_string(values_.size()) + " values, expected " +
                             std::to_string(static_cast<std::size_t>(components) * grid_.size()));
    }
    for (double v : values_)
        if (!std::isfinite(v)) throw InputError("grid function values must be finite");
}

std::span<const double> GridFunction::component(int c) const {
    return std::span<const double>(values_).subspan(static_cast<std::size_t>(c) * grid_.size(), grid_.size());
}

std::span<double> GridFunction::component(int c) {
    return std::span<double>(values_).subspan(static_cast<std::size_t>(c) * grid_.size(), grid_.size());
}

Vector GridFunction::point_value(std::size_t p) const {
    Vector v(components_);
    for (int c = 0; c < components_; ++c) v(c) = at(c, p);
    return v;
}

namespace {
void require_same_shape(const GridFunction& a, const GridFunction& b) {
    if (!(a.grid() == b.grid()) || a.components() != b.components()) {
        throw DimensionError("grid functions differ in grid or component count");
    }
}
}  // namespace

GridFunction& GridFunction::operator+=(const GridFunction& o) {
    require_same_shape(*this, o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
    require_same_shape(*this, o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
}

GridFunction& GridFunction::operator*=(double c) {
    for (double& v : values_) v *= c;
    return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(double c, GridFunction a) { return a *= c; }

GridFunction sample_field(const PeriodicGrid& grid, int components,
                          const std::function<void(const Vector& x, std::span<double> out)>& fn) {
    GridFunction u(grid, components);
    std::vector<double> buf(static_cast<std::size_t>(components));
    for (std::size_t p = 0; p < grid.size(); ++p) {
        std::fill(buf.begin(), buf.end(), 0.0);
        fn(grid.point(p), buf);
        for (int c = 0; c < components; ++c) u.at(c, p) = buf[static_cast<std::size_t>(c)];
    }
    return u;
}

SpectralField::SpectralField(PeriodicGrid grid, int components)
    : grid_(grid), components_(components), coeffs_(static_cast<std::size_t>(components) * grid.size()) {}

std::span<const SpectralField::Complex> SpectralField::component(int c) const {
    return std::span<const Complex>(coeffs_).subspan(static_cast<std::size_t>(c) * grid_.size(), grid_.size());
}

std::span<SpectralField::Complex> SpectralField::component(int c) {
    return std::span<Complex>(coeffs_).subspan(static_cast<std::size_t>(c) * grid_.size(), grid_.size());
}

double SpectralField::hermitian_defect() const {
    double worst = 0.0;
    for (int c = 0; c < components_; ++c)
        for (std::size_t k = 0; k < grid_.size(); ++k)
            worst = std::max(worst, std::abs(at(c, grid_.negated_index(k)) - std::conj(at(c, k))));
    return worst;
}

SpectralField dft_forward(const GridFunction& u) {
    const auto& grid = u.grid();
    SpectralField U(grid, u.components());
    const double scale = 1.0 / static_cast<double>(grid.size());
    for (int c = 0; c < u.components(); ++c) {
        auto out = U.component(c);
        const auto in = u.component(c);
        for (std::size_t p = 0; p < grid.size(); ++p) out[p] = in[p];
        detail::fft_inplace(grid.n(), grid.G(), out, -1);
        for (auto& v : out) v *= scale;
    }
    return U;
}

GridFunction dft_inverse(const SpectralField& U) {
    const auto& grid = U.grid();
    GridFunction u(grid, U.components());
    std::vector<SpectralField::Complex> work(grid.size());
    for (int c = 0; c < U.components(); ++c) {
        const auto in = U.component(c);
        std::copy(in.begin(), in.end(), work.begin());
        detail::fft_inplace(grid.n(), grid.G(), work, +1);
        auto out = u.component(c);
        for (std::size_t p = 0; p < grid.size(); ++p) out[p] = work[p].real();
    }
    return u;
}

double remove_nyquist(SpectralField& U) {
    const auto& grid = U.grid();
    double energy = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (!grid.on_nyquist(k)) continue;
        for (int c = 0; c < U.components(); ++c) {
            energy += std::norm(U.at(c, k));
            U.at(c, k) = 0.0;
        }
    }
    return std::pow(grid.L(), grid.n()) * energy;
}

SpectralField gradient_spectral(const SpectralField& U) {
    const auto& grid = U.grid();
    const int n = grid.n();
    SpectralField D(grid, U.components() * n);
    const SpectralField::Complex two_pi_i(0.0, 2.0 * std::numbers::pi);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (grid.on_nyquist(k)) continue;
        const Vector z = grid.frequency(k);
        for (int alpha = 0; alpha < U.components(); ++alpha) {
            const auto c = U.at(alpha, k);
            for (int j = 0; j < n; ++j) D.at(alpha * n + j, k) = two_pi_i * z(j) * c;
        }
    }
    return D;
}

GridFunction gradient(const GridFunction& u) { return dft_inverse(gradient_spectral(dft_forward(u))); }

double norm_lp(const GridFunction& u, double p) {
    if (!(p >= 1.0)) throw DomainError("L^p norm needs p >= 1");
    const auto& grid = u.grid();
    double sum = 0.0;
    for (std::size_t q = 0; q < grid.size(); ++q) {
        double sq = 0.0;
        for (int c = 0; c < u.components(); ++c) sq += u.at(c, q) * u.at(c, q);
        sum += (p == 2.0) ? sq : std::pow(sq, 0.5 * p);
    }
    return std::pow(grid.cell_weight() * sum, 1.0 / p);
}

double norm_l2(const GridFunction& u) { return norm_lp(u, 2.0); }

double norm_linf(const GridFunction& u) {
    double m = 0.0;
    for (std::size_t q = 0; q < u.grid().size(); ++q) m = std::max(m, u.point_value(q).norm());
    return m;
}

double conjugate_exponent(int n) {
    if (n < 3) throw UnsupportedExponentError("2* = 2n/(n-2) is undefined for n < 3");
    return 2.0 * n / (n - 2.0);
}

double norm_l2star(const GridFunction& u) { return norm_lp(u, conjugate_exponent(u.grid().n())); }

double spectral_norm_l2(const SpectralField& U) {
    double sum = 0.0;
    for (const auto& c : U.coefficients()) sum += std::norm(c);
    return std::sqrt(std::pow(U.grid().L(), U.grid().n()) * sum);
}

MeanProjection project_mean_zero(const GridFunction& u) {
    MeanProjection out{u, Vector::Zero(u.components())};
    const double count = static_cast<double>(u.grid().size());
    for (int c = 0; c < u.components(); ++c) {
        auto vals = out.field.component(c);
        double mean = 0.0;
        for (double v : vals) mean += v;
        mean /= count;
        for (double& v : vals) v -= mean;
        out.dropped_mean(c) = mean;
    }
    return out;
}

GridFunction random_band_limited(const PeriodicGrid& grid, int components, int kmax, std::uint64_t seed) {
    if (kmax < 1 || kmax >= grid.G() / 2) throw DomainError("band limit must lie in [1, G/2)");
    Xoshiro256 rng(seed);
    SpectralField U(grid, components);
    for (int c = 0; c < components; ++c) {
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const auto idx = grid.multi_index(k);
            int top = 0;
            for (int d = 0; d < grid.n(); ++d) top = std::max(top, std::abs(grid.signed_frequency(idx[d])));
            if (top == 0 || top > kmax) continue;
            const double re = rng.normal();
            const double im = rng.normal();
            U.at(c, k) = {re, im};
        }
    }
    return dft_inverse(U);
}

}  // namespace ellsys
