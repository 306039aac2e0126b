#include "ellsys/linear_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ellsys/errors.hpp"

namespace ellsys {

namespace {

std::string grid_label(const PeriodicGrid& g) {
    std::ostringstream os;
    os << g.G() << "^" << g.n() << "/L=" << g.L();
    return os.str();
}

double nyquist_energy(const SpectralField& F) {
    const auto& grid = F.grid();
    double e = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (!grid.on_nyquist(k)) continue;
        for (int c = 0; c < F.components(); ++c) e += std::norm(F.at(c, k));
    }
    return std::pow(grid.L(), grid.n()) * e;
}

void check_rhs(const MultiplierPlan& plan, const GridFunction& f) {
    if (f.components() != plan.tensor().N()) throw DimensionError("right-hand side must have N components");
    if (!(f.grid() == plan.grid())) throw DimensionError("right-hand side lives on a different grid");
}

struct Prepared {
    MeanProjection projection;
    SpectralField spectrum;
    SolveReport report;
};

Prepared prepare(const MultiplierPlan& plan, const GridFunction& f) {
    check_rhs(plan, f);
    Prepared p{project_mean_zero(f), {}, {}};
    p.spectrum = dft_forward(p.projection.field);
    p.report.grid = grid_label(plan.grid());
    p.report.nu = plan.ellipticity().nu;
    p.report.dropped_mean = p.projection.dropped_mean;
    p.report.dropped_mean_norm = p.projection.dropped_mean.norm();
    p.report.nyquist_energy = nyquist_energy(p.spectrum);
    const double fnorm = norm_l2(p.projection.field);
    p.report.truncated = std::sqrt(p.report.nyquist_energy) > 1e-12 * std::max(fnorm, 1e-300);
    p.report.min_abs_det = plan.min_abs_det();
    return p;
}

void finish(const MultiplierPlan& plan, const GridFunction& u, Prepared& p) {
    const double fnorm = norm_l2(p.projection.field);
    const GridFunction r = apply_operator(plan.tensor(), u) - p.projection.field;
    p.report.residual = fnorm > 0.0 ? norm_l2(r) / fnorm : norm_l2(r);
}

}  // namespace

MultiplierPlan::MultiplierPlan(const ConstantTensor& A, const PeriodicGrid& grid)
    : A_(A), grid_(grid), ellipticity_(ellipticity_constant(A)) {
    if (grid.n() != A.n()) throw DimensionError("grid dimension differs from the tensor's n");
    if (!ellipticity_.elliptic) {
        std::ostringstream os;
        os << "tensor is not elliptic: nu(A) = " << ellipticity_.nu << " near direction "
           << ellipticity_.argmin_direction.transpose();
        throw NonEllipticError(os.str());
    }
    retained_.assign(grid.size(), 0);
    inverse_.assign(grid.size(), Matrix());
    znorm_.assign(grid.size(), 0.0);
    min_abs_det_ = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < grid.size(); ++k) {
        if (grid.on_nyquist(k)) continue;
        const Vector z = grid.frequency(k);
        const double zn = z.norm();
        const Matrix D = direction_matrix(A, z / zn);
        const double det = determinant(D);
        if (det == 0.0) throw NonEllipticError("direction matrix is singular at a grid frequency");
        inverse_[k] = cofactor(D).transpose() / det;
        znorm_[k] = zn;
        retained_[k] = 1;
        min_abs_det_ = std::min(min_abs_det_, std::abs(det));
    }
}

Eigen::MatrixXcd MultiplierPlan::symbol(std::size_t k) const {
    using C = std::complex<double>;
    if (!retained_[k]) return Eigen::MatrixXcd::Zero(A_.N(), A_.N());
    return inverse_[k].cast<C>() / C(0.0, 2.0 * std::numbers::pi * znorm_[k]);
}

RegularizerSequence::RegularizerSequence(Kind kind, double m) : kind_(kind), m_(m) {
    if (!(m >= 1.0) || !std::isfinite(m)) throw DomainError("regularizer index m must be finite and >= 1");
}

double RegularizerSequence::operator()(double znorm) const {
    if (znorm <= 0.0) return 0.0;
    switch (kind_) {
        case Kind::rational:
            return znorm / (znorm * znorm + 1.0 / (m_ * m_));
        case Kind::truncation:
            return std::min(m_, 1.0 / znorm);
    }
    return 0.0;
}

RegularizerSequence::Kind RegularizerSequence::parse_kind(const std::string& name) {
    if (name == "rational") return Kind::rational;
    if (name == "truncation") return Kind::truncation;
    throw LookupError("unknown regularizer kind '" + name + "' (expected rational or truncation)");
}

std::string RegularizerSequence::kind_name(Kind kind) {
    return kind == Kind::rational ? "rational" : "truncation";
}

GridFunction apply_operator(const ConstantTensor& A, const GridFunction& u) {
    if (u.components() != A.N() || u.grid().n() != A.n()) throw DimensionError("apply_operator: shape mismatch");
    const GridFunction Du = gradient(u);
    GridFunction out(u.grid(), A.N());
    const int width = A.N() * A.n();
    std::vector<double> q(static_cast<std::size_t>(width));
    std::vector<double> r(static_cast<std::size_t>(A.N()));
    for (std::size_t p = 0; p < u.grid().size(); ++p) {
        for (int c = 0; c < width; ++c) q[static_cast<std::size_t>(c)] = Du.at(c, p);
        contract_flat(A, q, r);
        for (int a = 0; a < A.N(); ++a) out.at(a, p) = r[static_cast<std::size_t>(a)];
    }
    return out;
}

LinearSolution solve_linear(const MultiplierPlan& plan, const GridFunction& f) {
    auto p = prepare(plan, f);
    GridFunction u = dft_inverse(plan.apply(p.spectrum, [](double zn) { return 1.0 / zn; }));
    finish(plan, u, p);
    return {std::move(u), std::move(p.report)};
}

LinearSolution solve_linear(const ConstantTensor& A, const GridFunction& f) {
    return solve_linear(MultiplierPlan(A, f.grid()), f);
}

RepresentationSolution solve_representation(const MultiplierPlan& plan, const GridFunction& f,
                                            const RegularizerSequence& h) {
    auto p = prepare(plan, f);
    GridFunction u = dft_inverse(plan.apply(p.spectrum, [&h](double zn) { return h(zn); }));
    finish(plan, u, p);

    RepresentationReport rep;
    rep.kind = h.kind();
    rep.m = h.m();
    const auto& grid = plan.grid();
    double cmax = 0.0;
    for (const auto& c : p.spectrum.coefficients()) cmax = std::max(cmax, std::abs(c));
    double zmin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (!plan.retained(k)) continue;
        bool active = false;
        for (int c = 0; c < p.spectrum.components(); ++c) active = active || std::abs(p.spectrum.at(c, k)) > 1e-12 * cmax;
        if (!active) continue;
        const double zn = grid.frequency(k).norm();
        zmin = std::min(zmin, zn);
        rep.max_factor_deviation = std::max(rep.max_factor_deviation, std::abs(1.0 - h(zn) * zn));
    }
    rep.z_min = std::isfinite(zmin) ? zmin : 0.0;
    if (h.kind() == RegularizerSequence::Kind::rational && rep.z_min > 0.0) {
        rep.error_bound = 1.0 / (h.m() * h.m() * rep.z_min * rep.z_min);
    } else {
        rep.error_bound = rep.max_factor_deviation;
    }
    rep.solve = std::move(p.report);
    return {std::move(u), std::move(rep)};
}

RepresentationSolution solve_representation(const ConstantTensor& A, const GridFunction& f,
                                            const RegularizerSequence& h) {
    return solve_representation(MultiplierPlan(A, f.grid()), f, h);
}

double riesz_constant(int n, double alpha) {
    if (n < 1) throw DomainError("riesz_constant needs n >= 1");
    if (!(alpha > 0.0 && alpha < n)) throw DomainError("riesz_constant needs 0 < alpha < n");
    return std::pow(2.0, alpha) * std::pow(std::numbers::pi, 0.5 * n) * std::tgamma(0.5 * alpha) /
           std::tgamma(0.5 * n - 0.5 * alpha);
}

AprioriReport verify_apriori(double nu, const GridFunction& u, const GridFunction& f) {
    AprioriReport r;
    const GridFunction Du = gradient(u);
    r.grad_norm = norm_l2(Du);
    r.rhs_norm = norm_l2(project_mean_zero(f).field);
    r.ratio_grad = r.rhs_norm > 0.0 ? r.grad_norm * nu / r.rhs_norm : 0.0;
    if (u.grid().n() >= 3) r.ratio_sobolev = r.grad_norm > 0.0 ? norm_l2star(u) / r.grad_norm : 0.0;
    return r;
}

AprioriReport verify_apriori(const ConstantTensor& A, const GridFunction& u, const GridFunction& f) {
    return verify_apriori(ellipticity_constant(A).nu, u, f);
}

}  // namespace ellsys
