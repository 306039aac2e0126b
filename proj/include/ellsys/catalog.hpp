#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ellsys/nonlinear_operator.hpp"
#include "ellsys/tensor.hpp"

namespace ellsys::catalog {

enum class Kind { constant_tensor, variable_linear, fully_nonlinear };

struct Entry {
    std::string name;
    Kind kind = Kind::constant_tensor;
    std::vector<std::string> params;
    /// nu(A) where it is known in closed form.
    std::optional<double> documented_nu;
    /// Parameters outside the elliptic range (lambda >= 1, eps >= nu(A)).
    bool flagged_non_elliptic = false;
    std::variant<ConstantTensor, NonlinearOperator> object;

    const ConstantTensor& tensor() const;
    const NonlinearOperator& op() const;
};

/// Cauchy-Riemann operator, N = n = 2: (Q11 + Q22, -Q12 + Q21).
ConstantTensor cauchy_riemann();
/// (kappa Q11 + lambda Q22, -mu Q12 + nu Q21); kappa = lambda = mu = nu = 1 is Cauchy-Riemann.
ConstantTensor generalized_cr(double kappa, double lambda, double mu, double nu);
/// Static massless Dirac operator in real coordinates, N = 4, n = 3.
ConstantTensor dirac();

enum class Shape { sin_q11, tanh_trace };
Shape parse_shape(const std::string& name);
std::string shape_name(Shape s);

/// F(x, Q) = A:Q + lambda nu(A) s(Q) with s 1-Lipschitz; declared nearness lambda nu(A).
NonlinearOperator lipschitz_perturbation(const ConstantTensor& base, double lambda, Shape shape);

/// F(x, Q) = (A + eps cos(2 pi x_1 / L) B):Q with B normalized to |B| = 1; declared nearness eps.
/// The default B has a single unit entry at (1, 1, 1).
NonlinearOperator variable_linear(const ConstantTensor& base, double eps, std::optional<ConstantTensor> B = {},
                                  double period = 1.0);

/// Lookup by name with string parameters, e.g. get("generalized_cr", {"2","1","1","1"}) or
/// get("lipschitz_perturbation", {"dirac", "0.5", "sin_q11"}).
Entry get(const std::string& name, const std::vector<std::string>& params);

/// Parses "name(p1, p2, ...)" (nested parentheses allowed in parameters) and calls get().
Entry get(const std::string& spec);

std::vector<std::string> names();

}  // namespace ellsys::catalog
