#include "ellsys/nonlinear_solver.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>
#include <thread>

namespace ellsys {

namespace {

constexpr int kDivergenceWindow = 3;

struct Nearness {
    double value = 0.0;
    bool declared = false;
};

Nearness resolve_nearness(const NonlinearOperator& F, const NearnessSampler& sampler) {
    if (auto d = F.declared_nearness()) return {*d, true};
    return {nearness_constant(F, F.anchor(), sampler).nu_FA, false};
}

void evaluate_range(const NonlinearOperator& F, const GridFunction& Du, GridFunction& out, std::size_t begin,
                    std::size_t end) {
    const int N = F.N(), n = F.n();
    Matrix Q(N, n);
    for (std::size_t p = begin; p < end; ++p) {
        for (int a = 0; a < N; ++a)
            for (int j = 0; j < n; ++j) Q(a, j) = Du.at(a * n + j, p);
        const Vector v = F(Du.grid().point(p), Q);
        for (int a = 0; a < N; ++a) out.at(a, p) = v(a);
    }
}

GridFunction mean_free(const GridFunction& g) { return project_mean_zero(g).field; }

}  // namespace

double IterationTrace::max_ratio_above_floor() const {
    double m = 0.0;
    for (const auto& r : records) {
        if (r.k >= 2 && r.d > noise_floor && std::isfinite(r.ratio)) m = std::max(m, r.ratio);
    }
    return m;
}

GridFunction evaluate_operator_on_gradient(const NonlinearOperator& F, const GridFunction& Du) {
    if (Du.components() != F.N() * F.n() || Du.grid().n() != F.n()) {
        throw DimensionError("gradient field does not match the operator's N*n components");
    }
    GridFunction out(Du.grid(), F.N());
    const std::size_t size = Du.grid().size();
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (!F.thread_safe() || hw == 1 || size < 4096) {
        evaluate_range(F, Du, out, 0, size);
        return out;
    }
    std::vector<std::future<void>> parts;
    for (unsigned c = 0; c < hw; ++c) {
        const std::size_t b = size * c / hw, e = size * (c + 1) / hw;
        parts.push_back(std::async(std::launch::async, [&, b, e] { evaluate_range(F, Du, out, b, e); }));
    }
    for (auto& p : parts) p.get();
    return out;
}

GridFunction evaluate_operator(const NonlinearOperator& F, const GridFunction& u) {
    if (u.components() != F.N()) throw DimensionError("field must have N components");
    return evaluate_operator_on_gradient(F, gradient(u));
}

double contraction_metric(const GridFunction& u, const GridFunction& v, const ConstantTensor& A) {
    return norm_l2(apply_operator(A, u - v));
}

CampanatoSolution campanato_solve(const NonlinearOperator& F, const GridFunction& f, const CampanatoOptions& options) {
    if (f.components() != F.N() || f.grid().n() != F.n()) throw DimensionError("right-hand side does not match F");
    if (!(options.tol > 0.0) || options.max_iter < 1) throw InputError("campanato_solve needs tol > 0 and max_iter >= 1");
    if (!F.x_periodic()) throw InputError("torus solves need an x-periodic operator");

    const ConstantTensor& A = F.anchor();
    const MultiplierPlan plan(A, f.grid());
    const double nu = plan.ellipticity().nu;

    IterationTrace trace;
    const Nearness near = resolve_nearness(F, options.sampler);
    trace.nu_A = nu;
    trace.nu_FA = near.value;
    trace.nearness_declared = near.declared;
    trace.K_theory = near.value / nu;
    if (!(nu - near.value > 0.0)) {
        std::ostringstream os;
        os << "F is not strictly elliptic w.r.t. its anchor: nu(F,A) = " << near.value << " >= nu(A) = " << nu;
        throw NonEllipticError(os.str());
    }

    // Shift F(., 0) out so the iteration works with F~(x, 0) = 0.
    const GridFunction zero(f.grid(), F.N());
    const GridFunction shift = evaluate_operator_on_gradient(F, GridFunction(f.grid(), F.N() * F.n()));
    const GridFunction rhs = f - shift;
    const double rhs_norm = norm_l2(rhs);
    trace.noise_floor = 1e-13 * norm_l2(f);

    auto state_of = [&](const GridFunction& u) {
        struct State {
            GridFunction Au;
            GridFunction Fu;
        };
        const GridFunction Du = gradient(u);
        GridFunction Au(u.grid(), F.N());
        {
            const int width = F.N() * F.n();
            std::vector<double> q(static_cast<std::size_t>(width)), r(static_cast<std::size_t>(F.N()));
            for (std::size_t p = 0; p < u.grid().size(); ++p) {
                for (int c = 0; c < width; ++c) q[static_cast<std::size_t>(c)] = Du.at(c, p);
                contract_flat(A, q, r);
                for (int a = 0; a < F.N(); ++a) Au.at(a, p) = r[static_cast<std::size_t>(a)];
            }
        }
        return State{std::move(Au), evaluate_operator_on_gradient(F, Du) - shift};
    };
    auto residual_of = [&](const GridFunction& Fu, double& abs_out, double& rhs_out) {
        // F~[u] - (f~ - m) with m the mean of f~ - F~[u]
        const GridFunction r = mean_free(Fu - rhs);
        const GridFunction compatible = Fu - r;
        abs_out = norm_l2(r);
        rhs_out = norm_l2(compatible);
        return rhs_out > 0.0 ? abs_out / rhs_out : abs_out;
    };

    GridFunction u = options.initial_guess ? *options.initial_guess : zero;
    if (u.components() != F.N() || !(u.grid() == f.grid())) throw DimensionError("initial guess has the wrong shape");
    auto state = state_of(u);

    CampanatoSolution out{u, {}, 0.0, 0.0};
    double prev_d = std::numeric_limits<double>::quiet_NaN();
    int non_contracting = 0;
    double last_dropped = 0.0;
    for (int k = 1; k <= options.max_iter; ++k) {
        GridFunction g = state.Au - state.Fu + rhs;
        auto step = solve_linear(plan, g);
        auto next = state_of(step.u);

        IterationRecord rec;
        rec.k = k;
        rec.d = norm_l2(next.Au - state.Au);
        rec.ratio = (k == 1 || !(prev_d > 0.0)) ? std::numeric_limits<double>::quiet_NaN() : rec.d / prev_d;
        rec.dropped_mean_norm = step.report.dropped_mean_norm;
        double res_abs = 0.0, res_rhs = 0.0;
        rec.residual = residual_of(next.Fu, res_abs, res_rhs);
        trace.records.push_back(rec);
        trace.iterations = k;
        last_dropped = rec.dropped_mean_norm;

        u = std::move(step.u);
        state = std::move(next);
        out.residual_abs = res_abs;
        out.rhs_norm = res_rhs;

        if (rec.d <= options.tol * rhs_norm || rec.residual <= options.tol) {
            trace.converged = true;
            break;
        }
        if (k >= 2 && rec.d > trace.noise_floor && rec.d >= prev_d) {
            if (++non_contracting >= kDivergenceWindow) {
                std::ostringstream os;
                os << "fixed-point iteration stopped contracting at step " << k << " (d = " << rec.d << ")";
                throw DivergenceError(os.str(), trace);
            }
        } else {
            non_contracting = 0;
        }
        prev_d = rec.d;
    }
    if (last_dropped > 1e-8 * norm_l2(f)) {
        trace.warnings.push_back("persistent dropped mean at convergence (torus compatibility artifact)");
    }
    if (out.rhs_norm > 0.0 && out.residual_abs > 10.0 * options.tol * out.rhs_norm) {
        // A:Du has no Nyquist-plane modes, so whatever F(., Du) puts there cannot be cancelled
        SpectralField R = dft_forward(mean_free(state.Fu - rhs));
        const double aliased = std::sqrt(remove_nyquist(R));
        if (aliased > 0.5 * out.residual_abs) {
            trace.warnings.push_back("residual is dominated by Nyquist-plane aliasing of F(., Du); refine the grid");
        }
    }
    out.u = std::move(u);
    out.trace = std::move(trace);
    return out;
}

ComparisonReport verify_comparison(const NonlinearOperator& F, const GridFunction& w, const GridFunction& v) {
    if (w.components() != F.N() || v.components() != F.N() || !(w.grid() == v.grid())) {
        throw DimensionError("comparison fields do not match F");
    }
    ComparisonReport r;
    const Nearness near = resolve_nearness(F, NearnessSampler{});
    r.nearness_declared = near.declared;
    r.margin = F.anchor_nu() - near.value;
    const GridFunction diff = w - v;
    r.grad_diff = norm_l2(gradient(diff));
    r.operator_diff = norm_l2(evaluate_operator(F, w) - evaluate_operator(F, v));
    if (r.operator_diff > 0.0) {
        r.ratio = r.grad_diff * r.margin / r.operator_diff;
        if (w.grid().n() >= 3) r.sobolev_ratio = norm_l2star(diff) / r.operator_diff;
    } else {
        // equal images with distinct gradients would contradict uniqueness
        r.ratio = (r.grad_diff > 0.0 && r.margin > 0.0) ? std::numeric_limits<double>::infinity() : 0.0;
        if (w.grid().n() >= 3) r.sobolev_ratio = 0.0;
    }
    r.holds = r.ratio <= 1.0 + 1e-9;
    return r;
}

NearOperatorReport near_operator_check(const NonlinearOperator& F,
                                       const std::vector<std::pair<GridFunction, GridFunction>>& pairs) {
    NearOperatorReport r;
    const Nearness near = resolve_nearness(F, NearnessSampler{});
    r.K = near.value / F.anchor_nu();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& [u, v] = pairs[i];
        const GridFunction diff = u - v;
        const GridFunction Adiff = apply_operator(F.anchor(), diff);
        const GridFunction lhs_field = evaluate_operator(F, u) - evaluate_operator(F, v) - Adiff;
        const double lhs = norm_l2(lhs_field);
        const double rhs = norm_l2(Adiff);
        ++r.pairs_checked;
        if (rhs > 0.0) r.max_ratio = std::max(r.max_ratio, lhs / rhs);
        const double scale = norm_l2(evaluate_operator(F, u)) + norm_l2(evaluate_operator(F, v));
        if (lhs > r.K * rhs * (1.0 + 1e-9) + 1e-13 * scale) {
            ++r.violations;
            r.violating_pairs.push_back(i);
        }
    }
    return r;
}

}  // namespace ellsys
