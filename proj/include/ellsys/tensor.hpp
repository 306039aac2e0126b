#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace ellsys {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Constant coefficient tensor A: R^{N x n} -> R^N with entries A(alpha, beta, j).
///
/// Storage is dense with alpha slowest, then beta, then j. This order is shared
/// with the inline tensor syntax of the CLI configuration. Indices are 0-based.
class ConstantTensor {
public:
    ConstantTensor() = default;
    /// Zero tensor.
    ConstantTensor(int N, int n);
    ConstantTensor(int N, int n, std::vector<double> entries);

    int N() const { return N_; }
    int n() const { return n_; }

    double operator()(int alpha, int beta, int j) const {
        return entries_[static_cast<std::size_t>((alpha * N_ + beta) * n_ + j)];
    }
    std::span<const double> entries() const { return entries_; }

    /// The N x (N*n) matrix acting on row-major flattened Q (column beta*n + j).
    Matrix flattened() const;

    ConstantTensor scaled(double c) const;
    ConstantTensor plus(const ConstantTensor& other, double weight = 1.0) const;

    static std::size_t flat_index(int N, int n, int alpha, int beta, int j) {
        return static_cast<std::size_t>((alpha * N + beta) * n + j);
    }

private:
    int N_ = 0;
    int n_ = 0;
    std::vector<double> entries_;
};

/// (A:Q)_alpha = sum_{beta,j} A(alpha,beta,j) Q(beta,j).
Vector contract(const ConstantTensor& A, const Matrix& Q);

/// Same as contract() but for a Q stored row-major (beta slowest) in a flat span.
void contract_flat(const ConstantTensor& A, std::span<const double> Q, std::span<double> out);

/// (Aa)_{alpha beta} = A(alpha,beta,j) a_j.
Matrix direction_matrix(const ConstantTensor& A, const Vector& a);

/// Cofactor matrix; M * cofactor(M)^T = det(M) I, also for singular M.
Matrix cofactor(const Matrix& M);
double determinant(const Matrix& M);

/// eta (x) a, an N x n matrix of rank at most one.
Matrix rank_one(const Vector& eta, const Vector& a);

/// sup_{|Q|=1} |A:Q|, Frobenius norm on Q.
double operator_norm(const ConstantTensor& A);

}  // namespace ellsys
