#include "ellsys/catalog.hpp"

#include <cmath>
#include <numbers>

#include "ellsys/ellipticity.hpp"
#include "ellsys/errors.hpp"

namespace ellsys::catalog {

namespace {

double parse_number(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw InputError("catalog: cannot parse " + what + " from '" + s + "'");
    }
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

void expect_count(const std::string& name, const std::vector<std::string>& params, std::size_t lo, std::size_t hi) {
    if (params.size() < lo || params.size() > hi) {
        throw InputError("catalog entry '" + name + "' takes " + std::to_string(lo) +
                         (lo == hi ? "" : "-" + std::to_string(hi)) + " parameters, got " +
                         std::to_string(params.size()));
    }
}

Entry tensor_entry(std::string name, std::vector<std::string> params, ConstantTensor A,
                   std::optional<double> nu) {
    Entry e;
    e.name = std::move(name);
    e.kind = Kind::constant_tensor;
    e.params = std::move(params);
    e.documented_nu = nu;
    e.object = std::move(A);
    return e;
}

}  // namespace

const ConstantTensor& Entry::tensor() const {
    if (const auto* t = std::get_if<ConstantTensor>(&object)) return *t;
    throw LookupError("catalog entry '" + name + "' is an operator, not a constant tensor");
}

const NonlinearOperator& Entry::op() const {
    if (const auto* f = std::get_if<NonlinearOperator>(&object)) return *f;
    throw LookupError("catalog entry '" + name + "' is a constant tensor, not an operator");
}

ConstantTensor cauchy_riemann() { return generalized_cr(1.0, 1.0, 1.0, 1.0); }

ConstantTensor generalized_cr(double kappa, double lambda, double mu, double nu) {
    if (!(kappa > 0 && lambda > 0 && mu > 0 && nu > 0)) {
        throw DomainError("generalized_cr needs kappa, lambda, mu, nu > 0");
    }
    std::vector<double> e(8, 0.0);
    auto at = [&](int a, int b, int j) -> double& { return e[ConstantTensor::flat_index(2, 2, a, b, j)]; };
    at(0, 0, 0) = kappa;
    at(0, 1, 1) = lambda;
    at(1, 0, 1) = -mu;
    at(1, 1, 0) = nu;
    return {2, 2, std::move(e)};
}

ConstantTensor dirac() {
    std::vector<double> e(48, 0.0);
    auto at = [&](int a, int b, int j) -> double& { return e[ConstantTensor::flat_index(4, 3, a, b, j)]; };
    //  D1u1 + D2u2 + D3u3
    at(0, 0, 0) = 1;
    at(0, 1, 1) = 1;
    at(0, 2, 2) = 1;
    // -D2u1 + D1u2 + D3u4
    at(1, 0, 1) = -1;
    at(1, 1, 0) = 1;
    at(1, 3, 2) = 1;
    // -D3u1 + D1u3 - D2u4
    at(2, 0, 2) = -1;
    at(2, 2, 0) = 1;
    at(2, 3, 1) = -1;
    // -D3u2 + D2u3 + D1u4
    at(3, 1, 2) = -1;
    at(3, 2, 1) = 1;
    at(3, 3, 0) = 1;
    return {4, 3, std::move(e)};
}

Shape parse_shape(const std::string& name) {
    if (name == "sin_q11") return Shape::sin_q11;
    if (name == "tanh_trace") return Shape::tanh_trace;
    throw LookupError("unknown perturbation shape '" + name + "' (expected sin_q11 or tanh_trace)");
}

std::string shape_name(Shape s) { return s == Shape::sin_q11 ? "sin_q11" : "tanh_trace"; }

NonlinearOperator lipschitz_perturbation(const ConstantTensor& base, double lambda, Shape shape) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("perturbation size lambda must be >= 0");
    const double nu = ellipticity_constant(base).nu;
    const double amp = lambda * nu;
    NonlinearOperator::Evaluator eval;
    if (shape == Shape::sin_q11) {
        eval = [base, amp](const Vector&, const Matrix& Q) {
            Vector v = contract(base, Q);
            v(0) += amp * std::sin(Q(0, 0));
            return v;
        };
    } else {
        // |sum_j Q_1j| <= sqrt(n) |Q|, so the argument is scaled by 1/sqrt(n) to keep s 1-Lipschitz.
        const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(base.n()));
        eval = [base, amp, inv_sqrt_n](const Vector&, const Matrix& Q) {
            Vector v = contract(base, Q);
            v(0) += amp * std::tanh(inv_sqrt_n * Q.row(0).sum());
            return v;
        };
    }
    NonlinearOperator::Options opts;
    opts.declared_nearness = amp;
    opts.name = "lipschitz_perturbation(" + shape_name(shape) + ")";
    return {std::move(eval), base, opts};
}

NonlinearOperator variable_linear(const ConstantTensor& base, double eps, std::optional<ConstantTensor> B,
                                  double period) {
    if (!(eps >= 0.0) || !std::isfinite(eps)) throw DomainError("variable_linear needs eps >= 0");
    ConstantTensor dir = B ? *B : ConstantTensor(base.N(), base.n());
    if (!B) {
        std::vector<double> e(dir.entries().begin(), dir.entries().end());
        e[0] = 1.0;
        dir = ConstantTensor(base.N(), base.n(), std::move(e));
    }
    if (dir.N() != base.N() || dir.n() != base.n()) throw DimensionError("B must have the shape of the base tensor");
    const double bn = operator_norm(dir);
    if (!(bn > 0.0)) throw InputError("B must be nonzero");
    dir = dir.scaled(1.0 / bn);
    NonlinearOperator::Options opts;
    opts.declared_nearness = eps;
    opts.name = "variable_linear";
    return {[base, dir, eps, period](const Vector& x, const Matrix& Q) {
                return Vector(contract(base, Q) + eps * std::cos(2.0 * std::numbers::pi * x(0) / period) * contract(dir, Q));
            },
            base, opts};
}

std::vector<std::string> names() {
    return {"cauchy_riemann", "generalized_cr", "dirac", "lipschitz_perturbation", "variable_linear"};
}

Entry get(const std::string& name, const std::vector<std::string>& raw_params) {
    std::vector<std::string> params;
    for (const auto& p : raw_params) params.push_back(trim(p));

    if (name == "cauchy_riemann") {
        expect_count(name, params, 0, 0);
        return tensor_entry(name, params, cauchy_riemann(), 1.0);
    }
    if (name == "dirac") {
        expect_count(name, params, 0, 0);
        return tensor_entry(name, params, dirac(), 1.0);
    }
    if (name == "generalized_cr") {
        expect_count(name, params, 4, 4);
        double v[4];
        for (int i = 0; i < 4; ++i) v[i] = parse_number(params[static_cast<std::size_t>(i)], "generalized_cr parameter");
        std::optional<double> nu;
        if (v[0] == 1.0 && v[1] == 1.0 && v[2] == 1.0 && v[3] == 1.0) nu = 1.0;
        // interior minimum of sigma_min([[2 a1, a2], [-a2, a1]]) at a1^2 = 1/5
        if (v[0] == 2.0 && v[1] == 1.0 && v[2] == 1.0 && v[3] == 1.0) nu = 2.0 / std::sqrt(5.0);
        return tensor_entry(name, params, generalized_cr(v[0], v[1], v[2], v[3]), nu);
    }
    if (name == "lipschitz_perturbation") {
        expect_count(name, params, 2, 3);
        const ConstantTensor base = get(params[0]).tensor();
        const double lambda = parse_number(params[1], "lambda");
        const Shape shape = params.size() > 2 ? parse_shape(params[2]) : Shape::sin_q11;
        Entry e;
        e.name = name;
        e.kind = Kind::fully_nonlinear;
        e.params = params;
        e.flagged_non_elliptic = lambda >= 1.0;
        e.object = lipschitz_perturbation(base, lambda, shape);
        return e;
    }
    if (name == "variable_linear") {
        expect_count(name, params, 2, 2);
        const ConstantTensor base = get(params[0]).tensor();
        const double eps = parse_number(params[1], "eps");
        Entry e;
        e.name = name;
        e.kind = Kind::variable_linear;
        e.params = params;
        e.object = variable_linear(base, eps);
        e.flagged_non_elliptic = eps >= e.op().anchor_nu();
        return e;
    }
    throw LookupError("unknown catalog entry '" + name + "'");
}

Entry get(const std::string& spec) {
    const std::string s = trim(spec);
    const auto open = s.find('(');
    if (open == std::string::npos) return get(s, {});
    if (s.back() != ')') throw InputError("catalog spec '" + s + "' is missing a closing parenthesis");
    const std::string name = trim(s.substr(0, open));
    const std::string inner = s.substr(open + 1, s.size() - open - 2);
    std::vector<std::string> params;
    int depth = 0;
    std::string cur;
    for (char c : inner) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == ',' && depth == 0) {
            params.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (depth != 0) throw InputError("catalog spec '" + s + "' has unbalanced parentheses");
    if (!trim(cur).empty() || !params.empty()) params.push_back(trim(cur));
    return get(name, params);
}

}  // namespace ellsys::catalog
