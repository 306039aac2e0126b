#pragma once

#include <cstdint>
#include <optional>

#include "ellsys/grid.hpp"
#include "ellsys/tensor.hpp"

namespace ellsys {

/// Largest N * G^n the dense oracle accepts.
inline constexpr std::size_t kDenseSizeCap = 4096;

/// Dense matrix of u -> A:Du on the grid, built by direct trigonometric sums
/// (no FFT). Rows and columns use the GridFunction layout (component slowest).
Matrix assemble_dense(const ConstantTensor& A, const PeriodicGrid& grid);

/// Projector onto modes off every Nyquist plane (the zero mode included), one grid component.
Matrix retained_projector(const PeriodicGrid& grid);

struct DenseSolveResult {
    std::optional<GridFunction> u;
    /// Set when the pinned system is singular beyond the known kernel.
    std::optional<GridFunction> non_elliptic_witness;
};

/// Direct LU solve of A:Du = f with constant modes pinned by row replacement and
/// Nyquist-plane modes pinned to zero.
DenseSolveResult solve_dense(const ConstantTensor& A, const GridFunction& f);

/// Refinement-free nu(A): min of sigma_min(Aa) over `samples` directions, sigma_min taken
/// from the eigenvalues of (Aa)^T(Aa). Equiangular for n = 2, Gaussian directions otherwise.
double brute_nu(const ConstantTensor& A, int samples = 100000, std::uint64_t seed = 0);

}  // namespace ellsys
