#pragma once

#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "ellsys/ellipticity.hpp"
#include "ellsys/grid.hpp"
#include "ellsys/tensor.hpp"

namespace ellsys {

/// Per-mode inverse symbols of u -> A:Du on a periodic grid.
///
/// For every retained z != 0 (not on a Nyquist plane) the plan stores
/// R(z) = cof(A sgn z)^T / det(A sgn z) = (A sgn z)^{-1}; the full inverse symbol is
/// M(z) = R(z) / (2 pi i |z|). Built once per (A, grid) and immutable.
class MultiplierPlan {
public:
    MultiplierPlan(const ConstantTensor& A, const PeriodicGrid& grid);

    const ConstantTensor& tensor() const { return A_; }
    const PeriodicGrid& grid() const { return grid_; }
    const EllipticityReport& ellipticity() const { return ellipticity_; }

    bool retained(std::size_t k) const { return retained_[k]; }
    const Matrix& inverse_direction(std::size_t k) const { return inverse_[k]; }
    Eigen::MatrixXcd symbol(std::size_t k) const;
    /// Smallest |det(A sgn z)| over retained modes.
    double min_abs_det() const { return min_abs_det_; }

    /// Returns (2 pi i)^{-1} weight(|z|) R(z) F(z) on retained modes, zero elsewhere.
    template <typename Weight>
    SpectralField apply(const SpectralField& F, Weight&& weight) const;

private:
    ConstantTensor A_;
    PeriodicGrid grid_;
    EllipticityReport ellipticity_;
    std::vector<char> retained_;
    std::vector<Matrix> inverse_;
    std::vector<double> znorm_;
    double min_abs_det_ = 0.0;
};

/// Sequence h_m with 0 <= h_m(z) <= 1/|z|, h_m even, h_m(z) -> 1/|z|.
class RegularizerSequence {
public:
    enum class Kind { rational, truncation };

    RegularizerSequence(Kind kind, double m);

    Kind kind() const { return kind_; }
    double m() const { return m_; }
    /// rational: |z| / (|z|^2 + m^-2); truncation: min(m, 1/|z|). Zero at z = 0.
    double operator()(double znorm) const;
    double operator()(const Vector& z) const { return (*this)(z.norm()); }

    static Kind parse_kind(const std::string& name);
    static std::string kind_name(Kind kind);

private:
    Kind kind_;
    double m_;
};

struct SolveReport {
    std::string grid;
    double nu = 0.0;
    /// ||A:Du - f~||_2 / ||f~||_2 with f~ the mean-zero part of f (0 when f~ = 0).
    double residual = 0.0;
    Vector dropped_mean;
    double dropped_mean_norm = 0.0;
    /// f had energy on Nyquist planes that the solve could not represent.
    bool truncated = false;
    double nyquist_energy = 0.0;
    double min_abs_det = 0.0;
};

struct LinearSolution {
    GridFunction u;
    SolveReport report;
};

/// A:Du as a grid function (spectral gradient, pointwise contraction).
GridFunction apply_operator(const ConstantTensor& A, const GridFunction& u);

/// Solves A:Du = f~ mode by mode; u has zero mean.
LinearSolution solve_linear(const MultiplierPlan& plan, const GridFunction& f);
LinearSolution solve_linear(const ConstantTensor& A, const GridFunction& f);

struct RepresentationReport {
    SolveReport solve;
    RegularizerSequence::Kind kind = RegularizerSequence::Kind::rational;
    double m = 0.0;
    /// Smallest nonzero |z| carrying energy in f.
    double z_min = 0.0;
    /// max |1 - h_m(z)|z|| over the active spectrum.
    double max_factor_deviation = 0.0;
    /// m^-2 / z_min^2 for the rational kind, max_factor_deviation otherwise.
    double error_bound = 0.0;
};

struct RepresentationSolution {
    GridFunction u;
    RepresentationReport report;
};

/// u_m with hat u_m(z) = (2 pi i)^{-1} h_m(z) cof(A sgn z)^T / det(A sgn z) hat f(z).
RepresentationSolution solve_representation(const MultiplierPlan& plan, const GridFunction& f,
                                            const RegularizerSequence& h);
RepresentationSolution solve_representation(const ConstantTensor& A, const GridFunction& f,
                                            const RegularizerSequence& h);

/// 2^alpha pi^{n/2} Gamma(alpha/2) / Gamma(n/2 - alpha/2) for 0 < alpha < n.
double riesz_constant(int n, double alpha);

struct AprioriReport {
    double grad_norm = 0.0;
    double rhs_norm = 0.0;
    /// ||Du||_2 nu(A) / ||f~||_2, at most 1.
    double ratio_grad = 0.0;
    /// ||u||_{2*} / ||Du||_2; tracked only, absent for n = 2.
    std::optional<double> ratio_sobolev;
};

AprioriReport verify_apriori(double nu, const GridFunction& u, const GridFunction& f);
AprioriReport verify_apriori(const ConstantTensor& A, const GridFunction& u, const GridFunction& f);

template <typename Weight>
SpectralField MultiplierPlan::apply(const SpectralField& F, Weight&& weight) const {
    using C = std::complex<double>;
    SpectralField U(grid_, A_.N());
    const C inv_two_pi_i = 1.0 / C(0.0, 2.0 * std::numbers::pi);
    Eigen::VectorXcd fhat(A_.N());
    for (std::size_t k = 0; k < grid_.size(); ++k) {
        if (!retained_[k]) continue;
        for (int a = 0; a < A_.N(); ++a) fhat(a) = F.at(a, k);
        const Eigen::VectorXcd uhat = (inv_two_pi_i * weight(znorm_[k])) * (inverse_[k].cast<C>() * fhat);
        for (int a = 0; a < A_.N(); ++a) U.at(a, k) = uhat(a);
    }
    return U;
}

}  // namespace ellsys
