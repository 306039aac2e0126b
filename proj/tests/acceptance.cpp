// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "ellsys/catalog.hpp"
#include "ellsys/ellipticity.hpp"
#include "ellsys/linear_solver.hpp"
#include "ellsys/nonlinear_solver.hpp"
#include "ellsys/oracle.hpp"
#include "support.hpp"

using namespace ellsys;
using std::numbers::pi;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void criterion_1(Outcome& o) {
    const double want_gcr = 2.0 / std::sqrt(5.0);
    struct Case {
        const char* name;
        ConstantTensor A;
        double want;
        double tol;
    };
    const Case cases[] = {{"dirac", catalog::dirac(), 1.0, 1e-9},
                          {"cauchy_riemann", catalog::cauchy_riemann(), 1.0, 1e-9},
                          {"generalized_cr(2,1,1,1)", catalog::generalized_cr(2, 1, 1, 1), want_gcr, 1e-6}};
    o.detail.precision(12);
    for (const auto& c : cases) {
        const auto t0 = std::chrono::steady_clock::now();
        const double nu = ellipticity_constant(c.A).nu;
        const double dt = seconds_since(t0);
        const double brute = brute_nu(c.A);
        o.detail << c.name << ": nu=" << nu << " brute=" << brute << " (" << dt << " s); ";
        o.require(std::abs(nu - c.want) <= c.tol, std::string(c.name) + " nu");
        o.require(std::abs(brute - nu) <= 1e-3, std::string(c.name) + " brute_nu");
        o.require(dt < 10.0, std::string(c.name) + " runtime");
    }
    // independent closed-form scan for the generalized case
    const double scan = support::generalized_cr_nu(2, 1, 1, 1);
    o.require(std::abs(scan - want_gcr) <= 1e-9, "closed-form scan");
}

void criterion_2(Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const ConstantTensor A = catalog::dirac();
    const PeriodicGrid g(3, 16);
    const MultiplierPlan plan(A, g);
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 5; ++s) {
        const GridFunction f = random_band_limited(g, 4, 6, s);
        const LinearSolution sol = solve_linear(plan, f);
        worst = std::max(worst, norm_l2(apply_operator(A, sol.u) - f) / norm_l2(f));
    }
    const GridFunction f = sample_field(g, 4, [](const Vector& x, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
        out[0] = std::sin(2 * pi * x(0));
    });
    const GridFunction exact = sample_field(g, 4, [](const Vector& x, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
        out[0] = -std::cos(2 * pi * x(0)) / (2 * pi);
    });
    const double err = norm_linf(solve_linear(plan, f).u - exact);
    const double dt = seconds_since(t0);
    o.detail << "max residual=" << worst << ", closed-form max error=" << err << " (" << dt << " s)";
    o.require(worst <= 1e-10, "residual");
    o.require(err <= 1e-10, "closed form");
    o.require(dt < 5.0, "runtime");
}

void criterion_3(Outcome& o) {
    for (const auto& [name, A] : {std::pair{"cauchy_riemann", catalog::cauchy_riemann()},
                                  std::pair{"generalized_cr(2,1,1,1)", catalog::generalized_cr(2, 1, 1, 1)},
                                  std::pair{"dirac", catalog::dirac()}}) {
        const PeriodicGrid g(A.n(), 16);
        const MultiplierPlan plan(A, g);
        const double nu = plan.ellipticity().nu;
        double worst = 0.0;
        for (std::uint64_t s = 0; s < 100; ++s) {
            const GridFunction f = random_band_limited(g, A.N(), 5, 1000 + s);
            worst = std::max(worst, verify_apriori(nu, solve_linear(plan, f).u, f).ratio_grad);
        }
        o.detail << name << ": max nu|Du|/|f|=" << worst << "; ";
        o.require(worst <= 1.0 + 1e-10, name);
    }
}

void criterion_4(Outcome& o) {
    const ConstantTensor A = catalog::dirac();
    const PeriodicGrid g(3, 16, 2.0);
    const MultiplierPlan plan(A, g);
    const GridFunction f = random_band_limited(g, 4, 6, 4);
    const GridFunction u = solve_linear(plan, f).u;
    const double unorm = norm_l2(u);
    for (double m : {1.0, 10.0, 100.0, 1000.0}) {
        const auto r = solve_representation(plan, f, RegularizerSequence(RegularizerSequence::Kind::rational, m));
        const double err = norm_l2(r.u - u) / unorm;
        const double bound = 1.0 / (m * m * r.report.z_min * r.report.z_min);
        o.detail << "m=" << m << ": err=" << err << " bound=" << bound << "; ";
        o.require(err <= bound, "rational bound at m=" + std::to_string(m));
    }
    const double big = 1e7;
    const auto rat = solve_representation(plan, f, RegularizerSequence(RegularizerSequence::Kind::rational, big));
    const auto tru = solve_representation(plan, f, RegularizerSequence(RegularizerSequence::Kind::truncation, big));
    const double gap = norm_l2(rat.u - tru.u) / unorm;
    o.detail << "rational vs truncation at m=1e7: " << gap;
    o.require(gap <= 1e-9, "kinds agree");
}

void criterion_5(Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const ConstantTensor A = catalog::dirac();
    const PeriodicGrid g(3, 4);
    const GridFunction f = random_band_limited(g, 4, 1, 5);
    const DenseSolveResult d = solve_dense(A, f);
    o.require(d.u.has_value(), "dense solve");
    if (!d.u) return;
    const GridFunction Du = gradient(solve_linear(A, f).u);
    const double rel = norm_l2(Du - gradient(*d.u)) / norm_l2(Du);
    const double dt = seconds_since(t0);
    o.detail << "unknowns=" << 4 * g.size() << ", relative gradient gap=" << rel << " (" << dt << " s)";
    o.require(rel <= 1e-9, "agreement");
    o.require(dt < 2.0, "runtime");
}

void criterion_6(Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const ConstantTensor A = catalog::dirac();
    const PeriodicGrid g(3, 16);
    // unit-norm data keeps sin(Q11) resolved at G = 16; the residual counts aliasing onto Nyquist planes
    GridFunction f = random_band_limited(g, 4, 1, 6);
    f *= 1.0 / norm_l2(f);
    for (double lam : {0.1, 0.5, 0.9}) {
        const NonlinearOperator F = catalog::lipschitz_perturbation(A, lam, catalog::Shape::sin_q11);
        const CampanatoSolution s = campanato_solve(F, f, {.tol = 1e-10});
        const int cap = static_cast<int>(std::ceil(std::log(1e-10) / std::log(lam))) + 10;
        const double ratio = s.trace.max_ratio_above_floor();
        o.detail << "lambda=" << lam << ": iters=" << s.trace.iterations << "/" << cap << " max ratio=" << ratio
                 << " residual=" << s.residual_abs / s.rhs_norm << "; ";
        o.require(s.trace.converged, "converged");
        o.require(ratio <= lam + 0.05, "ratio");
        o.require(s.trace.iterations <= cap, "iterations");
        o.require(s.residual_abs <= 1e-8 * s.rhs_norm, "residual");
    }
    const double dt = seconds_since(t0);
    o.detail << "(" << dt << " s)";
    o.require(dt < 60.0, "runtime");
}

void criterion_7(Outcome& o) {
    const ConstantTensor A = catalog::dirac();
    const NonlinearOperator F = catalog::lipschitz_perturbation(A, 0.5, catalog::Shape::sin_q11);
    const PeriodicGrid g(3, 16);
    double worst = 0.0;
    int failures = 0;
    for (std::uint64_t s = 0; s < 50; ++s) {
        const ComparisonReport r = verify_comparison(F, random_band_limited(g, 4, 4, 7000 + 2 * s),
                                                     random_band_limited(g, 4, 4, 7001 + 2 * s));
        worst = std::max(worst, r.ratio);
        if (!(r.ratio <= 1.0 + 1e-9)) ++failures;
    }
    o.detail << "50 pairs, max (nu - lambda nu)|Dw-Dv| / |F(Dw)-F(Dv)| = " << worst;
    o.require(failures == 0, "comparison bound");
}

void criterion_8(Outcome& o) {
    const ConstantTensor A = catalog::dirac();
    const NonlinearOperator F = catalog::lipschitz_perturbation(A, 0.5, catalog::Shape::sin_q11);
    const PeriodicGrid g(3, 16);
    const GridFunction f = random_band_limited(g, 4, 3, 8);
    const double tol = 1e-10;
    const CampanatoSolution a = campanato_solve(F, f, {.tol = tol});
    CampanatoOptions opts{.tol = tol};
    opts.initial_guess = random_band_limited(g, 4, 5, 88);
    const CampanatoSolution b = campanato_solve(F, f, opts);
    const GridFunction Da = gradient(a.u);
    const double gap = norm_l2(Da - gradient(b.u));
    const double rel = gap / norm_l2(Da);
    o.detail << "|Du0 - Du1|=" << gap << ", relative=" << rel << " (limit " << 10 * tol << ")";
    o.require(a.trace.converged && b.trace.converged, "both converge");
    o.require(rel <= 10 * tol, "gradients agree");
}

void criterion_9(Outcome& o) {
    const ConstantTensor A = catalog::dirac();
    const double nu = ellipticity_constant(A).nu;

    NearnessSampler adversarial;
    Matrix P = Matrix::Zero(4, 3);
    P(0, 0) = pi;
    Matrix Q = Matrix::Zero(4, 3);
    Q(0, 0) = 1.0;
    Q(1, 1) = -0.5;
    adversarial.extra_p = {P};
    adversarial.extra_q_directions = {Q};
    adversarial.seed = 9;

    struct Case {
        std::string name;
        NonlinearOperator F;
        double lambda;
    };
    std::vector<Case> cases;
    for (double lam : {0.1, 0.5, 0.9})
        for (auto shape : {catalog::Shape::sin_q11, catalog::Shape::tanh_trace})
            cases.push_back({"lipschitz_perturbation(" + catalog::shape_name(shape) + ", " + std::to_string(lam) + ")",
                             catalog::lipschitz_perturbation(A, lam, shape), lam});
    cases.push_back({"variable_linear(0.4)", catalog::variable_linear(A, 0.4), 0.4});
    cases.push_back({"A:Q/2", NonlinearOperator([A](const Vector&, const Matrix& q) { return Vector(0.5 * contract(A, q)); }, A), 0.3});

    int premise_sets = 0, converse_sets = 0;
    for (const auto& c : cases) {
        for (const NearnessSampler& s : {NearnessSampler{}, adversarial}) {
            const LipschitzReport r = lipschitz_and_converse(c.F, A, c.lambda, s);
            const PseudoMonotonicityReport& pm = r.pseudo_monotonicity;
            if (pm.sampled_nearness <= c.lambda * nu) {
                ++premise_sets;
                o.require(pm.violations == 0, c.name + ": violations under the nearness premise");
            }
            if (r.lipschitz_estimate < r.threshold && pm.violations == 0) {
                ++converse_sets;
                o.require(r.concludes_strictly_elliptic, c.name + ": converse did not conclude");
                o.require(pm.sampled_nearness <= r.implied_nearness_bound * (1 + 1e-12), c.name + ": implied bound");
            }
        }
    }
    // control: the premise fails and violations do appear
    const PseudoMonotonicityReport ctrl =
        check_pseudomonotonicity(catalog::lipschitz_perturbation(A, 0.5, catalog::Shape::sin_q11), A, 0.1, adversarial);
    o.detail << premise_sets << " sample sets met the nearness premise with zero violations; " << converse_sets
             << " met the Lipschitz cap and concluded strict ellipticity; control with the premise false: "
             << ctrl.violations << " violations";
    o.require(premise_sets > 0, "some premise set");
    o.require(converse_sets > 0, "some converse set");
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
        {"ellipticity constants", criterion_1},
        {"linear solver exactness", criterion_2},
        {"a-priori gradient estimate", criterion_3},
        {"representation formula", criterion_4},
        {"dense oracle equivalence", criterion_5},
        {"Campanato contraction", criterion_6},
        {"comparison principle", criterion_7},
        {"uniqueness", criterion_8},
        {"pseudo-monotonicity implication", criterion_9},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        o.detail.precision(6);
        const auto t0 = std::chrono::steady_clock::now();
        try {
            criteria[i].second(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        std::printf("criterion %zu %s: %s | %s [%.2f s]\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                    o.detail.str().c_str(), seconds_since(t0));
        std::fflush(stdout);
        if (!o.pass) ++failed;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
