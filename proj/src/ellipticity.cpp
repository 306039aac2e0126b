#include "ellsys/ellipticity.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>
#include <thread>

#include "ellsys/errors.hpp"
#include "ellsys/rng.hpp"
#include "ellsys/sphere.hpp"

namespace ellsys {

namespace {

constexpr double kEllipticFloor = 1e-8;

double sigma_min(const Matrix& M) {
    Eigen::JacobiSVD<Matrix> svd(M);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

void require_resolution(int resolution) {
    if (resolution < 100) throw DomainError("sphere resolution must be >= 100");
}

double nu_for(const NonlinearOperator& F, const ConstantTensor& A) {
    const auto a = A.entries();
    const auto b = F.anchor().entries();
    if (A.N() == F.N() && A.n() == F.n() && std::equal(a.begin(), a.end(), b.begin(), b.end())) {
        return F.anchor_nu();
    }
    return ellipticity_constant(A).nu;
}

struct SampleSet {
    std::vector<Vector> xs;
    std::vector<Matrix> ps;
    std::vector<Matrix> q_dirs;
    std::vector<double> magnitudes;

    std::size_t size() const { return xs.size() * ps.size() * q_dirs.size() * magnitudes.size(); }
};

SampleSet build_samples(const NearnessSampler& s, int N, int n) {
    if (s.x_per_axis < 1 || s.p_count < 0 || s.q_directions < 0 || s.q_magnitudes.empty()) {
        throw InputError("nearness sampler has empty or negative counts");
    }
    for (double t : s.q_magnitudes) {
        if (!(t > 0.0)) throw InputError("Q magnitudes must be positive");
    }
    SampleSet set;
    std::size_t count = 1;
    for (int i = 0; i < n; ++i) count *= static_cast<std::size_t>(s.x_per_axis);
    for (std::size_t flat = 0; flat < count; ++flat) {
        Vector x(n);
        std::size_t rest = flat;
        for (int axis = n - 1; axis >= 0; --axis) {
            x(axis) = static_cast<double>(rest % static_cast<std::size_t>(s.x_per_axis)) * s.cell_length / s.x_per_axis;
            rest /= static_cast<std::size_t>(s.x_per_axis);
        }
        set.xs.push_back(x);
    }

    Xoshiro256 rng(s.seed);
    set.ps.push_back(Matrix::Zero(N, n));
    for (int i = 0; i < s.p_count; ++i) {
        Matrix P(N, n);
        for (Eigen::Index k = 0; k < P.size(); ++k) P.data()[k] = s.p_scale * rng.normal();
        set.ps.push_back(P);
    }
    for (const auto& P : s.extra_p) {
        if (P.rows() != N || P.cols() != n) throw DimensionError("extra P has the wrong shape");
        set.ps.push_back(P);
    }

    for (int beta = 0; beta < N; ++beta)
        for (int j = 0; j < n; ++j)
            for (double sign : {1.0, -1.0}) {
                Matrix E = Matrix::Zero(N, n);
                E(beta, j) = sign;
                set.q_dirs.push_back(E);
            }
    for (int i = 0; i < s.q_directions; ++i) {
        Matrix Q(N, n);
        for (Eigen::Index k = 0; k < Q.size(); ++k) Q.data()[k] = rng.normal();
        set.q_dirs.push_back(Q / Q.norm());
    }
    for (const auto& Q : s.extra_q_directions) {
        if (Q.rows() != N || Q.cols() != n) throw DimensionError("extra Q direction has the wrong shape");
        if (!(Q.norm() > 0.0)) throw InputError("extra Q direction must be nonzero");
        set.q_dirs.push_back(Q / Q.norm());
    }
    set.magnitudes = s.q_magnitudes;
    return set;
}

struct SamplePoint {
    const Vector& x;
    const Matrix& P;
    const Matrix& Q;
    const Vector& dF;  // F(x, P+Q) - F(x, P)
    const Vector& AQ;
};

// Visits every (x, P, Q) triple; x-chunks may run concurrently when F allows it and
// partial accumulators are merged in x order, so results do not depend on threading.
template <typename Acc, typename Visit, typename Merge>
Acc reduce_samples(const NonlinearOperator& F, const ConstantTensor& A, const SampleSet& set, Acc init, Visit visit,
                   Merge merge) {
    auto run_range = [&](std::size_t begin, std::size_t end) {
        Acc acc = init;
        for (std::size_t xi = begin; xi < end; ++xi) {
            const Vector& x = set.xs[xi];
            for (const auto& P : set.ps) {
                const Vector FP = F(x, P);
                for (const auto& dir : set.q_dirs) {
                    for (double t : set.magnitudes) {
                        const Matrix Q = t * dir;
                        const Vector dF = F(x, P + Q) - FP;
                        const Vector AQ = contract(A, Q);
                        visit(acc, SamplePoint{x, P, Q, dF, AQ});
                    }
                }
            }
        }
        return acc;
    };

    const std::size_t nx = set.xs.size();
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t chunks = F.thread_safe() ? std::min<std::size_t>(hw, nx) : 1;
    if (chunks <= 1) return run_range(0, nx);

    std::vector<std::future<Acc>> parts;
    for (std::size_t c = 0; c < chunks; ++c) {
        const std::size_t b = nx * c / chunks, e = nx * (c + 1) / chunks;
        parts.push_back(std::async(std::launch::async, run_range, b, e));
    }
    Acc total = init;
    for (auto& p : parts) merge(total, p.get());
    return total;
}

struct NearAcc {
    double best = -1.0;
    Witness witness;
};

void merge_near(NearAcc& into, const NearAcc& from) {
    if (from.best > into.best) into = from;  // strict: earlier chunk wins ties
}

}  // namespace

EllipticityReport ellipticity_constant(const ConstantTensor& A, int resolution) {
    require_resolution(resolution);
    for (double v : A.entries()) {
        if (!std::isfinite(v)) throw InputError("tensor entries must be finite");
    }
    const auto sv = minimize_on_sphere(A.n(), resolution,
                                       [&](const Vector& a) { return sigma_min(direction_matrix(A, a)); });
    EllipticityReport r;
    r.nu = std::max(0.0, sv.value);
    r.argmin_direction = sv.direction;
    r.resolution = sv.resolution;
    r.refined = sv.refined;
    r.min_abs_det = det_condition(A, resolution);
    r.elliptic = r.nu > kEllipticFloor * std::max(1.0, operator_norm(A));
    return r;
}

double det_condition(const ConstantTensor& A, int resolution) {
    require_resolution(resolution);
    const auto m = minimize_on_sphere(A.n(), resolution,
                                      [&](const Vector& a) { return std::abs(determinant(direction_matrix(A, a))); });
    return m.value;
}

std::string NearnessSampler::x_range_label(int n) const {
    std::ostringstream os;
    os << "[0," << cell_length << ")^" << n << " grid of " << x_per_axis << "^" << n << " points";
    return os.str();
}

double nearness_quotient(const NonlinearOperator& F, const ConstantTensor& A, const Vector& x, const Matrix& P,
                         const Matrix& Q) {
    const double qn = Q.norm();
    if (!(qn > 0.0)) throw InputError("nearness quotient needs Q != 0");
    return (F(x, P + Q) - F(x, P) - contract(A, Q)).norm() / qn;
}

NearnessReport nearness_constant(const NonlinearOperator& F, const ConstantTensor& A, const NearnessSampler& sampler) {
    if (A.N() != F.N() || A.n() != F.n()) throw DimensionError("anchor and operator shapes differ");
    const auto set = build_samples(sampler, A.N(), A.n());
    const auto acc = reduce_samples(
        F, A, set, NearAcc{},
        [](NearAcc& acc, const SamplePoint& s) {
            const double q = (s.dF - s.AQ).norm() / s.Q.norm();
            if (q > acc.best) {
                acc.best = q;
                acc.witness = Witness{s.x, s.P, s.Q};
            }
        },
        merge_near);

    NearnessReport r;
    r.nu_FA = std::max(0.0, acc.best);
    r.nu_A = nu_for(F, A);
    r.ratio = r.nu_A > 0.0 ? r.nu_FA / r.nu_A : std::numeric_limits<double>::infinity();
    r.samples_used = set.size();
    r.worst_witness = acc.witness;
    r.x_range = sampler.x_range_label(A.n());
    return r;
}

StrictEllipticityReport is_strictly_elliptic(const NonlinearOperator& F, const ConstantTensor& A,
                                             const NearnessSampler& sampler) {
    StrictEllipticityReport r;
    r.nearness = nearness_constant(F, A, sampler);
    r.margin = r.nearness.nu_A - r.nearness.nu_FA;
    r.elliptic = r.margin > 0.0;
    r.caveat = "nu(F,A) is a sampled lower bound over " + r.nearness.x_range +
               "; a positive margin is a necessary-condition certificate, not a proof";
    return r;
}

PseudoMonotonicityReport check_pseudomonotonicity(const NonlinearOperator& F, const ConstantTensor& A, double lambda,
                                                  const NearnessSampler& sampler) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("pseudo-monotonicity needs lambda in (0, 1)");
    if (A.N() != F.N() || A.n() != F.n()) throw DimensionError("anchor and operator shapes differ");
    const double nu = nu_for(F, A);
    const auto set = build_samples(sampler, A.N(), A.n());

    struct Acc {
        std::size_t violations = 0;
        double worst = 0.0;
        Witness witness;
        double nearness = 0.0;
    };
    const double lam2nu2 = lambda * lambda * nu * nu;
    const auto acc = reduce_samples(
        F, A, set, Acc{},
        [lam2nu2](Acc& acc, const SamplePoint& s) {
            const double q2 = s.Q.squaredNorm();
            const double aq2 = s.AQ.squaredNorm();
            const double lhs = s.AQ.dot(s.dF);
            const double rhs = 0.5 * aq2 - 0.5 * lam2nu2 * q2;
            const double scale = aq2 + lam2nu2 * q2 + std::sqrt(aq2) * s.dF.norm();
            const double shortfall = rhs - lhs;
            if (shortfall > 1e-12 * scale) {
                ++acc.violations;
                if (shortfall > acc.worst) {
                    acc.worst = shortfall;
                    acc.witness = Witness{s.x, s.P, s.Q};
                }
            }
            acc.nearness = std::max(acc.nearness, (s.dF - s.AQ).norm() / std::sqrt(q2));
        },
        [](Acc& into, const Acc& from) {
            into.violations += from.violations;
            if (from.worst > into.worst) {
                into.worst = from.worst;
                into.witness = from.witness;
            }
            into.nearness = std::max(into.nearness, from.nearness);
        });

    PseudoMonotonicityReport r;
    r.lambda = lambda;
    r.violations = acc.violations;
    r.worst_violation = acc.worst;
    r.worst_witness = acc.witness;
    r.samples_used = set.size();
    r.sampled_nearness = acc.nearness;
    return r;
}

LipschitzReport lipschitz_and_converse(const NonlinearOperator& F, const ConstantTensor& A, double lambda,
                                       const NearnessSampler& sampler) {
    LipschitzReport r;
    r.lambda = lambda;
    r.pseudo_monotonicity = check_pseudomonotonicity(F, A, lambda, sampler);
    r.sampled_nearness = r.pseudo_monotonicity.sampled_nearness;
    const double nu = nu_for(F, A);
    const auto set = build_samples(sampler, A.N(), A.n());
    r.lipschitz_estimate = reduce_samples(
        F, A, set, 0.0, [](double& acc, const SamplePoint& s) { acc = std::max(acc, s.dF.norm() / s.Q.norm()); },
        [](double& into, double from) { into = std::max(into, from); });
    r.threshold = std::sqrt(1.0 - lambda * lambda) * nu;
    r.converse_applies = r.pseudo_monotonicity.violations == 0 && r.lipschitz_estimate < r.threshold;
    if (r.converse_applies) {
        const double delta = r.lipschitz_estimate / r.threshold;
        r.implied_nearness_bound = std::sqrt(lambda * lambda + delta * delta * (1.0 - lambda * lambda)) * nu;
        r.concludes_strictly_elliptic = r.implied_nearness_bound < nu;
    }
    return r;
}

}  // namespace ellsys
