#include "ellsys/tensor.hpp"

#include <cmath>
#include <string>

#include "ellsys/errors.hpp"

namespace ellsys {

namespace {

void require_square(const Matrix& M) {
    if (M.rows() != M.cols()) {
        throw DimensionError("expected a square matrix, got " + std::to_string(M.rows()) + "x" +
                             std::to_string(M.cols()));
    }
}

double det3(const Matrix& M) {
    return M(0, 0) * (M(1, 1) * M(2, 2) - M(1, 2) * M(2, 1)) -
           M(0, 1) * (M(1, 0) * M(2, 2) - M(1, 2) * M(2, 0)) +
           M(0, 2) * (M(1, 0) * M(2, 1) - M(1, 1) * M(2, 0));
}

Matrix minor_of(const Matrix& M, Eigen::Index row, Eigen::Index col) {
    const Eigen::Index d = M.rows();
    Matrix out(d - 1, d - 1);
    for (Eigen::Index i = 0, r = 0; i < d; ++i) {
        if (i == row) continue;
        for (Eigen::Index k = 0, c = 0; k < d; ++k) {
            if (k == col) continue;
            out(r, c++) = M(i, k);
        }
        ++r;
    }
    return out;
}

}  // namespace

ConstantTensor::ConstantTensor(int N, int n) : ConstantTensor(N, n, std::vector<double>(static_cast<std::size_t>(N * N * n), 0.0)) {}

ConstantTensor::ConstantTensor(int N, int n, std::vector<double> entries)
    : N_(N), n_(n), entries_(std::move(entries)) {
    if (N < 2 || n < 2) {
        throw DimensionError("tensor dimensions must satisfy N >= 2 and n >= 2");
    }
    if (entries_.size() != static_cast<std::size_t>(N * N * n)) {
        throw DimensionError("tensor with N=" + std::to_string(N) + ", n=" + std::to_string(n) + " needs " +
                             std::to_string(N * N * n) + " entries, got " + std::to_string(entries_.size()));
    }
    for (double v : entries_) {
        if (!std::isfinite(v)) throw InputError("tensor entries must be finite");
    }
}

Matrix ConstantTensor::flattened() const {
    Matrix out(N_, N_ * n_);
    for (int alpha = 0; alpha < N_; ++alpha)
        for (int col = 0; col < N_ * n_; ++col)
            out(alpha, col) = entries_[static_cast<std::size_t>(alpha * N_ * n_ + col)];
    return out;
}

ConstantTensor ConstantTensor::scaled(double c) const {
    std::vector<double> e = entries_;
    for (double& v : e) v *= c;
    return {N_, n_, std::move(e)};
}

ConstantTensor ConstantTensor::plus(const ConstantTensor& other, double weight) const {
    if (other.N_ != N_ || other.n_ != n_) throw DimensionError("tensor sum with mismatched shapes");
    std::vector<double> e = entries_;
    for (std::size_t i = 0; i < e.size(); ++i) e[i] += weight * other.entries_[i];
    return {N_, n_, std::move(e)};
}

Vector contract(const ConstantTensor& A, const Matrix& Q) {
    if (Q.rows() != A.N() || Q.cols() != A.n()) {
        throw DimensionError("contract: Q must be " + std::to_string(A.N()) + "x" + std::to_string(A.n()));
    }
    Vector out = Vector::Zero(A.N());
    for (int alpha = 0; alpha < A.N(); ++alpha)
        for (int beta = 0; beta < A.N(); ++beta)
            for (int j = 0; j < A.n(); ++j) out(alpha) += A(alpha, beta, j) * Q(beta, j);
    return out;
}

void contract_flat(const ConstantTensor& A, std::span<const double> Q, std::span<double> out) {
    const auto width = static_cast<std::size_t>(A.N() * A.n());
    if (Q.size() != width || out.size() != static_cast<std::size_t>(A.N())) {
        throw DimensionError("contract_flat: shape mismatch");
    }
    const auto e = A.entries();
    for (std::size_t alpha = 0; alpha < out.size(); ++alpha) {
        double s = 0.0;
        const double* row = e.data() + alpha * width;
        for (std::size_t c = 0; c < width; ++c) s += row[c] * Q[c];
        out[alpha] = s;
    }
}

Matrix direction_matrix(const ConstantTensor& A, const Vector& a) {
    if (a.size() != A.n()) throw DimensionError("direction_matrix: direction must have n components");
    Matrix out = Matrix::Zero(A.N(), A.N());
    for (int alpha = 0; alpha < A.N(); ++alpha)
        for (int beta = 0; beta < A.N(); ++beta)
            for (int j = 0; j < A.n(); ++j) out(alpha, beta) += A(alpha, beta, j) * a(j);
    return out;
}

Matrix cofactor(const Matrix& M) {
    require_square(M);
    const Eigen::Index d = M.rows();
    Matrix C(d, d);
    switch (d) {
        case 0:
            return C;
        case 1:
            C(0, 0) = 1.0;
            return C;
        case 2:
            C << M(1, 1), -M(1, 0), -M(0, 1), M(0, 0);
            return C;
        case 3:
            for (Eigen::Index i = 0; i < 3; ++i)
                for (Eigen::Index k = 0; k < 3; ++k) {
                    const Eigen::Index i1 = (i + 1) % 3, i2 = (i + 2) % 3;
                    const Eigen::Index k1 = (k + 1) % 3, k2 = (k + 2) % 3;
                    // cyclic index order absorbs the checkerboard sign
                    C(i, k) = M(i1, k1) * M(i2, k2) - M(i1, k2) * M(i2, k1);
                }
            return C;
        case 4:
            for (Eigen::Index i = 0; i < 4; ++i)
                for (Eigen::Index k = 0; k < 4; ++k) {
                    const double sign = ((i + k) % 2 == 0) ? 1.0 : -1.0;
                    C(i, k) = sign * det3(minor_of(M, i, k));
                }
            return C;
        default:
            for (Eigen::Index i = 0; i < d; ++i)
                for (Eigen::Index k = 0; k < d; ++k) {
                    const double sign = ((i + k) % 2 == 0) ? 1.0 : -1.0;
                    C(i, k) = sign * minor_of(M, i, k).partialPivLu().determinant();
                }
            return C;
    }
}

double determinant(const Matrix& M) {
    require_square(M);
    switch (M.rows()) {
        case 0:
            return 1.0;
        case 1:
            return M(0, 0);
        case 2:
            return M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0);
        case 3:
            return det3(M);
        case 4: {
            double s = 0.0;
            for (Eigen::Index k = 0; k < 4; ++k) {
                const double sign = (k % 2 == 0) ? 1.0 : -1.0;
                s += sign * M(0, k) * det3(minor_of(M, 0, k));
            }
            return s;
        }
        default:
            return M.partialPivLu().determinant();
    }
}

Matrix rank_one(const Vector& eta, const Vector& a) { return eta * a.transpose(); }

double operator_norm(const ConstantTensor& A) {
    Eigen::JacobiSVD<Matrix> svd(A.flattened());
    return svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
}

}  // namespace ellsys
