#include "ellsys/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ellsys/errors.hpp"
#include "ellsys/rng.hpp"

namespace ellsys {

namespace {

// (1/G) sum over k in (-G/2, G/2) of 2 pi i k/L exp(2 pi i k (x - y) / G), which is real.
Matrix derivative_1d(int G, double L) {
    Matrix D = Matrix::Zero(G, G);
    for (int x = 0; x < G; ++x)
        for (int y = 0; y < G; ++y) {
            double s = 0.0;
            for (int k = -G / 2 + 1; k < G / 2; ++k)
                s -= (2.0 * std::numbers::pi * k / L) * std::sin(2.0 * std::numbers::pi * k * (x - y) / G);
            D(x, y) = s / G;
        }
    return D;
}

Matrix retained_1d(int G) {
    Matrix S = Matrix::Zero(G, G);
    for (int x = 0; x < G; ++x)
        for (int y = 0; y < G; ++y) {
            double s = 0.0;
            for (int k = -G / 2 + 1; k < G / 2; ++k) s += std::cos(2.0 * std::numbers::pi * k * (x - y) / G);
            S(x, y) = s / G;
        }
    return S;
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

void check_cap(const ConstantTensor& A, const PeriodicGrid& grid) {
    if (grid.n() != A.n()) throw DimensionError("grid dimension differs from the tensor's n");
    const std::size_t total = static_cast<std::size_t>(A.N()) * grid.size();
    if (total > kDenseSizeCap) {
        throw SizeCapError("dense oracle refuses " + std::to_string(total) + " unknowns (cap " +
                           std::to_string(kDenseSizeCap) + ")");
    }
}

}  // namespace

Matrix retained_projector(const PeriodicGrid& grid) {
    const Matrix S = retained_1d(grid.G());
    Matrix P = S;
    for (int axis = 1; axis < grid.n(); ++axis) P = kron(P, S);
    return P;
}

Matrix assemble_dense(const ConstantTensor& A, const PeriodicGrid& grid) {
    check_cap(A, grid);
    const Matrix D1 = derivative_1d(grid.G(), grid.L());
    const Matrix S = retained_1d(grid.G());
    std::vector<Matrix> Dj;
    for (int j = 0; j < grid.n(); ++j) {
        Matrix K = (j == 0) ? D1 : S;
        for (int axis = 1; axis < grid.n(); ++axis) K = kron(K, axis == j ? D1 : S);
        Dj.push_back(std::move(K));
    }
    const auto P = static_cast<Eigen::Index>(grid.size());
    Matrix M = Matrix::Zero(A.N() * P, A.N() * P);
    for (int alpha = 0; alpha < A.N(); ++alpha)
        for (int beta = 0; beta < A.N(); ++beta)
            for (int j = 0; j < grid.n(); ++j) {
                const double c = A(alpha, beta, j);
                if (c != 0.0) M.block(alpha * P, beta * P, P, P) += c * Dj[static_cast<std::size_t>(j)];
            }
    return M;
}

DenseSolveResult solve_dense(const ConstantTensor& A, const GridFunction& f) {
    check_cap(A, f.grid());
    if (f.components() != A.N()) throw DimensionError("right-hand side must have N components");
    const auto& grid = f.grid();
    const auto P = static_cast<Eigen::Index>(grid.size());
    const Eigen::Index total = A.N() * P;

    Matrix system = assemble_dense(A, grid);
    const Matrix nyquist = Matrix::Identity(P, P) - retained_projector(grid);
    Vector rhs(total);
    for (Eigen::Index i = 0; i < total; ++i) rhs(i) = f.values()[static_cast<std::size_t>(i)];
    for (int alpha = 0; alpha < A.N(); ++alpha) {
        system.block(alpha * P, alpha * P, P, P) += nyquist;
        // The first equation of each component block is implied by the others (images
        // are mean-free), so it is traded for the zero-mean constraint on u_alpha.
        const Eigen::Index row = alpha * P;
        system.row(row).setZero();
        system.block(row, alpha * P, 1, P).setConstant(1.0 / static_cast<double>(P));
        rhs(row) = 0.0;
    }

    DenseSolveResult result;
    Eigen::FullPivLU<Matrix> lu(system);
    lu.setThreshold(1e-10);
    if (!lu.isInvertible()) {
        const Matrix kernel = lu.kernel();
        std::vector<double> w(static_cast<std::size_t>(total));
        for (Eigen::Index i = 0; i < total; ++i) w[static_cast<std::size_t>(i)] = kernel(i, 0);
        result.non_elliptic_witness = GridFunction(grid, A.N(), std::move(w));
        return result;
    }
    const Vector x = lu.solve(rhs);
    std::vector<double> u(static_cast<std::size_t>(total));
    for (Eigen::Index i = 0; i < total; ++i) u[static_cast<std::size_t>(i)] = x(i);
    result.u = GridFunction(grid, A.N(), std::move(u));
    return result;
}

double brute_nu(const ConstantTensor& A, int samples, std::uint64_t seed) {
    if (samples < 1) throw DomainError("brute_nu needs a positive sample count");
    const int n = A.n();
    Xoshiro256 rng(seed);
    double best = std::numeric_limits<double>::infinity();
    Vector a(n);
    for (int s = 0; s < samples; ++s) {
        if (n == 2) {
            const double t = 2.0 * std::numbers::pi * s / samples;
            a << std::cos(t), std::sin(t);
        } else {
            for (int i = 0; i < n; ++i) a(i) = rng.normal();
            a /= a.norm();
        }
        const Matrix M = direction_matrix(A, a);
        Eigen::SelfAdjointEigenSolver<Matrix> eig(M.transpose() * M, Eigen::EigenvaluesOnly);
        best = std::min(best, std::sqrt(std::max(0.0, eig.eigenvalues()(0))));
    }
    return best;
}

}  // namespace ellsys
