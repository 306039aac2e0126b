#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ellsys/ellipticity.hpp"
#include "ellsys/errors.hpp"
#include "ellsys/grid.hpp"
#include "ellsys/linear_solver.hpp"
#include "ellsys/nonlinear_operator.hpp"

namespace ellsys {

struct IterationRecord {
    int k = 0;
    /// d(u_k, u_{k-1}) = ||A:Du_k - A:Du_{k-1}||_2.
    double d = 0.0;
    /// d_k / d_{k-1}; NaN for k = 1.
    double ratio = 0.0;
    /// ||F(., Du_k) - f_F||_2 / ||f_F||_2 with f_F the mean-compatible right-hand side.
    double residual = 0.0;
    double dropped_mean_norm = 0.0;
};

struct IterationTrace {
    std::vector<IterationRecord> records;
    /// nu(F, A) / nu(A) used for the contraction guarantee.
    double K_theory = 0.0;
    double nu_A = 0.0;
    double nu_FA = 0.0;
    bool nearness_declared = false;
    bool converged = false;
    int iterations = 0;
    double noise_floor = 0.0;
    std::vector<std::string> warnings;

    /// Largest ratio_k over steps k >= 2 whose d_k is above the noise floor.
    double max_ratio_above_floor() const;
};

class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, IterationTrace trace) : Error(what), trace_(std::move(trace)) {}
    const IterationTrace& trace() const { return trace_; }

private:
    IterationTrace trace_;
};

struct CampanatoOptions {
    double tol = 1e-10;
    int max_iter = 500;
    std::optional<GridFunction> initial_guess;
    /// Used only when F carries no declared nearness.
    NearnessSampler sampler;
};

struct CampanatoSolution {
    GridFunction u;
    IterationTrace trace;
    /// Final ||F(., Du) - f_F||_2 (absolute) and ||f_F||_2.
    double residual_abs = 0.0;
    double rhs_norm = 0.0;
};

/// F(x, Du(x)) at every grid point, N components.
GridFunction evaluate_operator(const NonlinearOperator& F, const GridFunction& u);
/// Same, from a precomputed gradient (N*n components).
GridFunction evaluate_operator_on_gradient(const NonlinearOperator& F, const GridFunction& Du);

/// Fixed-point iteration u <- A^{-1}(A:Du - F(., Du) + f) with F(., 0) shifted out.
CampanatoSolution campanato_solve(const NonlinearOperator& F, const GridFunction& f,
                                  const CampanatoOptions& options = {});

/// ||A:Du - A:Dv||_2.
double contraction_metric(const GridFunction& u, const GridFunction& v, const ConstantTensor& A);

struct ComparisonReport {
    double grad_diff = 0.0;     ///< ||Dw - Dv||_2
    double operator_diff = 0.0; ///< ||F(., Dw) - F(., Dv)||_2
    double margin = 0.0;        ///< nu(A) - nu(F, A)
    /// grad_diff * margin / operator_diff, at most 1.
    double ratio = 0.0;
    /// ||w - v||_{2*} / operator_diff; tracked only, absent for n = 2.
    std::optional<double> sobolev_ratio;
    bool holds = false;
    bool nearness_declared = false;
};

ComparisonReport verify_comparison(const NonlinearOperator& F, const GridFunction& w, const GridFunction& v);

struct NearOperatorReport {
    double K = 0.0;
    std::size_t pairs_checked = 0;
    std::size_t violations = 0;
    /// max over pairs of ||F[u]-F[v]-(A[u]-A[v])|| / ||A[u]-A[v]||.
    double max_ratio = 0.0;
    std::vector<std::size_t> violating_pairs;
};

/// Checks ||F[u]-F[v]-(A[u]-A[v])|| <= K ||A[u]-A[v]||, K = nu(F,A)/nu(A), on sampled pairs.
NearOperatorReport near_operator_check(const NonlinearOperator& F,
                                       const std::vector<std::pair<GridFunction, GridFunction>>& pairs);

}  // namespace ellsys
