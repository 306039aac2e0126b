#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ellsys/nonlinear_operator.hpp"
#include "ellsys/tensor.hpp"

namespace ellsys {

inline constexpr int kDefaultSphereResolution = 2000;

struct EllipticityReport {
    /// nu(A) = min over unit a of sigma_min(Aa).
    double nu = 0.0;
    Vector argmin_direction;
    /// min over unit a of |det(Aa)|.
    double min_abs_det = 0.0;
    int resolution = 0;
    bool refined = false;
    /// nu above a 1e-8 * max(1, |A|) floor.
    bool elliptic = false;
};

/// nu(A) via sphere sampling plus simplex refinement of sigma_min(Aa).
EllipticityReport ellipticity_constant(const ConstantTensor& A, int resolution = kDefaultSphereResolution);

/// min over unit a of |det(Aa)|, sampled and refined.
double det_condition(const ConstantTensor& A, int resolution = kDefaultSphereResolution);

/// Which (x, P, Q) triples the nearness estimators visit.
///
/// x runs over a regular x_per_axis^n grid of the cell [0, cell_length)^n.
/// P runs over {0} + p_count Gaussian matrices (entries N(0, p_scale^2)) + extra_p.
/// Q = t * d with t from q_magnitudes and d over the unit basis matrices +-E_{beta j},
/// q_directions Gaussian unit directions and extra_q_directions (normalized).
struct NearnessSampler {
    int x_per_axis = 3;
    double cell_length = 1.0;
    int p_count = 8;
    double p_scale = 1.0;
    int q_directions = 16;
    std::vector<double> q_magnitudes = {1e-4, 1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2};
    std::vector<Matrix> extra_p;
    std::vector<Matrix> extra_q_directions;
    std::uint64_t seed = 0;

    std::string x_range_label(int n) const;
};

struct Witness {
    Vector x;
    Matrix P;
    Matrix Q;
};

struct NearnessReport {
    /// Sampled lower bound of nu(F, A).
    double nu_FA = 0.0;
    double nu_A = 0.0;
    /// nu_FA / nu_A.
    double ratio = 0.0;
    std::size_t samples_used = 0;
    Witness worst_witness;
    std::string x_range;
};

/// |F(x,P+Q) - F(x,P) - A:Q| / |Q| at one triple.
double nearness_quotient(const NonlinearOperator& F, const ConstantTensor& A, const Vector& x, const Matrix& P,
                         const Matrix& Q);

NearnessReport nearness_constant(const NonlinearOperator& F, const ConstantTensor& A,
                                 const NearnessSampler& sampler = {});

struct StrictEllipticityReport {
    bool elliptic = false;
    /// nu(A) - sampled nu(F, A).
    double margin = 0.0;
    NearnessReport nearness;
    /// Sampling only bounds nu(F, A) from below: `elliptic` is a necessary-condition
    /// certificate, not a proof.
    std::string caveat;
};

StrictEllipticityReport is_strictly_elliptic(const NonlinearOperator& F, const ConstantTensor& A,
                                             const NearnessSampler& sampler = {});

struct PseudoMonotonicityReport {
    double lambda = 0.0;
    std::size_t violations = 0;
    /// Largest shortfall rhs - lhs over violating samples, 0 if none.
    double worst_violation = 0.0;
    Witness worst_witness;
    std::size_t samples_used = 0;
    /// Nearness estimate over the same samples.
    double sampled_nearness = 0.0;
};

/// Samples (A:Q).[F(x,P+Q) - F(x,P)] >= |A:Q|^2 / 2 - lambda^2 nu(A)^2 |Q|^2 / 2.
PseudoMonotonicityReport check_pseudomonotonicity(const NonlinearOperator& F, const ConstantTensor& A, double lambda,
                                                  const NearnessSampler& sampler = {});

struct LipschitzReport {
    double lambda = 0.0;
    /// max |F(x,P+Q) - F(x,P)| / |Q| over samples.
    double lipschitz_estimate = 0.0;
    /// sqrt(1 - lambda^2) nu(A).
    double threshold = 0.0;
    PseudoMonotonicityReport pseudo_monotonicity;
    /// Lipschitz estimate below threshold and no pseudo-monotonicity violations.
    bool converse_applies = false;
    /// sqrt(lambda^2 + delta^2 (1 - lambda^2)) nu(A), delta = estimate / threshold; only meaningful when the converse applies.
    double implied_nearness_bound = 0.0;
    bool concludes_strictly_elliptic = false;
    double sampled_nearness = 0.0;
};

LipschitzReport lipschitz_and_converse(const NonlinearOperator& F, const ConstantTensor& A, double lambda,
                                       const NearnessSampler& sampler = {});

}  // namespace ellsys
