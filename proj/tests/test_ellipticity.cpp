#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ellsys/catalog.hpp"
#include "ellsys/ellipticity.hpp"
#include "ellsys/errors.hpp"
#include "ellsys/oracle.hpp"
#include "ellsys/rng.hpp"
#include "ellsys/sphere.hpp"
#include "support.hpp"

using namespace ellsys;

TEST(Ellipticity, DiracAndCauchyRiemannHaveUnitConstant) {
    EXPECT_NEAR(ellipticity_constant(catalog::dirac()).nu, 1.0, 1e-9);
    EXPECT_NEAR(ellipticity_constant(catalog::cauchy_riemann()).nu, 1.0, 1e-9);
    EXPECT_NEAR(det_condition(catalog::dirac()), 1.0, 1e-9);
    EXPECT_NEAR(det_condition(catalog::cauchy_riemann()), 1.0, 1e-9);
}

TEST(Ellipticity, GeneralizedCauchyRiemannAgainstFineScan) {
    const double ref = support::generalized_cr_nu(2, 1, 1, 1);
    EXPECT_NEAR(ref, 2.0 / std::sqrt(5.0), 1e-9);
    const EllipticityReport r = ellipticity_constant(catalog::generalized_cr(2, 1, 1, 1));
    EXPECT_NEAR(r.nu, ref, 1e-9);
    EXPECT_TRUE(r.elliptic);
    // minimizer sits at a_1^2 = 1/5
    EXPECT_NEAR(r.argmin_direction(0) * r.argmin_direction(0), 0.2, 1e-5);

    const double params[][4] = {{1, 3, 0.5, 2}, {0.3, 1, 1, 4}, {2, 2, 2, 2}, {1, 0.2, 5, 1}};
    for (const auto& p : params) {
        const double want = support::generalized_cr_nu(p[0], p[1], p[2], p[3]);
        EXPECT_NEAR(ellipticity_constant(catalog::generalized_cr(p[0], p[1], p[2], p[3])).nu, want, 1e-8)
            << p[0] << "," << p[1] << "," << p[2] << "," << p[3];
    }
}

TEST(Ellipticity, ZeroAndDegenerateTensors) {
    const EllipticityReport z = ellipticity_constant(ConstantTensor(2, 2));
    EXPECT_EQ(z.nu, 0.0);
    EXPECT_FALSE(z.elliptic);

    // Aa = a_1 I vanishes along a = e_2
    std::vector<double> e(8, 0.0);
    e[ConstantTensor::flat_index(2, 2, 0, 0, 0)] = 1.0;
    e[ConstantTensor::flat_index(2, 2, 1, 1, 0)] = 1.0;
    const EllipticityReport d = ellipticity_constant(ConstantTensor(2, 2, e));
    EXPECT_LT(d.nu, 1e-9);
    EXPECT_FALSE(d.elliptic);
    EXPECT_NEAR(std::abs(d.argmin_direction(1)), 1.0, 1e-6);
}

TEST(Ellipticity, ScalesLinearlyAndAgreesWithBruteForce) {
    const ConstantTensor A = catalog::generalized_cr(2, 1, 1, 1);
    EXPECT_NEAR(ellipticity_constant(A.scaled(-3.0)).nu, 3.0 * 2.0 / std::sqrt(5.0), 1e-8);
    Xoshiro256 rng(21);
    std::vector<double> e(3 * 3 * 3);
    for (auto& v : e) v = rng.normal();
    const ConstantTensor R(3, 3, e);
    const double nu = ellipticity_constant(R).nu;
    const double brute = brute_nu(R, 200000, 4);
    // brute force only samples, so it bounds nu from above
    EXPECT_LE(nu, brute + 1e-12);
    EXPECT_NEAR(nu, brute, 2e-2 * std::max(1.0, brute));
}

TEST(Ellipticity, ResolutionValidation) {
    EXPECT_THROW(ellipticity_constant(catalog::dirac(), 99), DomainError);
    EXPECT_NO_THROW(ellipticity_constant(catalog::dirac(), 100));
}

TEST(Sphere, SamplesAreUnitAndNelderMeadFindsQuadraticMinimum) {
    for (int n : {2, 3, 4}) {
        const auto pts = sphere_samples(n, 300);
        EXPECT_GE(pts.size(), 100u);
        for (const auto& p : pts) EXPECT_NEAR(p.norm(), 1.0, 1e-12);
    }
    Vector start(2);
    start << 3, -1;
    const auto r = nelder_mead([](const Vector& v) { return (v(0) - 1) * (v(0) - 1) + 2 * (v(1) + 0.5) * (v(1) + 0.5); },
                               start, 0.5);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.argmin(0), 1.0, 1e-6);
    EXPECT_NEAR(r.argmin(1), -0.5, 1e-6);
}

TEST(Nearness, LinearOperatorHasZeroNearness) {
    const ConstantTensor A = catalog::dirac();
    const NearnessReport r = nearness_constant(NonlinearOperator::linear(A), A);
    // exact value 0; F(P+Q) - F(P) loses about eps |P| / |Q| at the smallest sampled |Q|
    EXPECT_LT(r.nu_FA, 1e-10);
    EXPECT_GT(r.samples_used, 0u);
}

TEST(Nearness, VariableLinearAttainsItsDeclaredNearness) {
    // |eps cos(2 pi x_1) B:Q| / |Q| with B a unit entry: the x_1 = 0 sample and Q along that
    // entry give exactly eps.
    const ConstantTensor A = catalog::cauchy_riemann();
    for (double eps : {0.1, 0.4, 0.9}) {
        const NonlinearOperator F = catalog::variable_linear(A, eps);
        const NearnessReport r = nearness_constant(F, A);
        EXPECT_NEAR(r.nu_FA, eps, 1e-10);
        EXPECT_NEAR(r.ratio, eps, 1e-9);
        Vector x(2);
        x << 0.25, 0.0;  // cos vanishes
        EXPECT_LT(nearness_quotient(F, A, x, Matrix::Zero(2, 2), Matrix::Identity(2, 2)), 1e-15);
    }
}

TEST(Nearness, LipschitzPerturbationStaysBelowDeclaredBound) {
    const ConstantTensor A = catalog::dirac();
    for (auto shape : {catalog::Shape::sin_q11, catalog::Shape::tanh_trace}) {
        const NonlinearOperator F = catalog::lipschitz_perturbation(A, 0.5, shape);
        const NearnessReport r = nearness_constant(F, A);
        EXPECT_LE(r.nu_FA, *F.declared_nearness() * (1 + 1e-12));
        EXPECT_GT(r.nu_FA, 0.4 * *F.declared_nearness());
        const StrictEllipticityReport s = is_strictly_elliptic(F, A);
        EXPECT_TRUE(s.elliptic);
        EXPECT_FALSE(s.caveat.empty());
    }
    const StrictEllipticityReport bad = is_strictly_elliptic(catalog::lipschitz_perturbation(A, 1.5, catalog::Shape::sin_q11), A);
    EXPECT_FALSE(bad.elliptic);
}

TEST(PseudoMonotonicity, NoViolationsWhenNearnessIsBelowLambdaNu) {
    const ConstantTensor A = catalog::dirac();
    for (double lam : {0.1, 0.5, 0.9}) {
        const NonlinearOperator F = catalog::lipschitz_perturbation(A, lam, catalog::Shape::sin_q11);
        const PseudoMonotonicityReport r = check_pseudomonotonicity(F, A, std::min(0.99, lam + 1e-9));
        EXPECT_EQ(r.violations, 0u) << "lambda=" << lam;
        EXPECT_LE(r.sampled_nearness, lam + 1e-12);
    }
}

TEST(PseudoMonotonicity, AdversarialSamplesExposeViolation) {
    // F = Dirac + 0.5 sin(Q11) e_1 tested with lambda = 0.1. Along Q = t(E11 - E22/2) at P11 = pi the
    // pairing vanishes to second order while the right side is (1/8 - 5 lambda^2 / 8) t^2 > 0.
    const ConstantTensor A = catalog::dirac();
    const NonlinearOperator F = catalog::lipschitz_perturbation(A, 0.5, catalog::Shape::sin_q11);
    NearnessSampler s;
    Matrix P = Matrix::Zero(4, 3);
    P(0, 0) = std::numbers::pi;
    Matrix Q = Matrix::Zero(4, 3);
    Q(0, 0) = 1.0;
    Q(1, 1) = -0.5;
    s.extra_p = {P};
    s.extra_q_directions = {Q};
    const PseudoMonotonicityReport r = check_pseudomonotonicity(F, A, 0.1, s);
    EXPECT_GT(r.violations, 0u);
    EXPECT_GT(r.worst_violation, 0.0);
    // the threshold for this direction is lambda^2 = 1/5
    const PseudoMonotonicityReport ok = check_pseudomonotonicity(F, A, 0.5, s);
    EXPECT_EQ(ok.violations, 0u);
    EXPECT_THROW(check_pseudomonotonicity(F, A, 1.0, s), DomainError);
}

TEST(PseudoMonotonicity, ConverseConcludesStrictEllipticity) {
    // F = A:Q / 2: Lipschitz constant |A|/2 = sqrt(3)/2 < sqrt(1 - 0.09), and the pairing is |A:Q|^2/2.
    const ConstantTensor A = catalog::dirac();
    const NonlinearOperator F([A](const Vector&, const Matrix& Q) { return Vector(0.5 * contract(A, Q)); }, A);
    const LipschitzReport r = lipschitz_and_converse(F, A, 0.3);
    EXPECT_NEAR(r.threshold, std::sqrt(0.91), 1e-9);
    EXPECT_LE(r.lipschitz_estimate, 0.5 * std::sqrt(3.0) + 1e-12);
    EXPECT_EQ(r.pseudo_monotonicity.violations, 0u);
    EXPECT_TRUE(r.converse_applies);
    EXPECT_TRUE(r.concludes_strictly_elliptic);
    EXPECT_LE(r.sampled_nearness, r.implied_nearness_bound + 1e-12);
    EXPECT_LT(r.implied_nearness_bound, 1.0);

    // doubling F breaks the Lipschitz cap
    const NonlinearOperator G([A](const Vector&, const Matrix& Q) { return Vector(2.0 * contract(A, Q)); }, A);
    EXPECT_FALSE(lipschitz_and_converse(G, A, 0.3).converse_applies);
}
