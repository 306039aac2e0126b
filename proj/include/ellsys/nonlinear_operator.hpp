#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "ellsys/tensor.hpp"

namespace ellsys {

struct EllipticityReport;

/// Pointwise map (x, Q) -> F(x, Q) in R^N together with the constant tensor it is
/// anchored to. The anchor's ellipticity constant is computed once on construction.
class NonlinearOperator {
public:
    using Evaluator = std::function<Vector(const Vector& x, const Matrix& Q)>;

    struct Options {
        std::optional<double> declared_nearness;
        bool thread_safe = true;
        bool x_periodic = true;
        std::string name;
    };

    NonlinearOperator(Evaluator evaluator, ConstantTensor anchor, Options options);
    NonlinearOperator(Evaluator evaluator, ConstantTensor anchor)
        : NonlinearOperator(std::move(evaluator), std::move(anchor), Options{}) {}

    /// Evaluates F; throws EvaluationError on a wrong-sized or non-finite result.
    Vector operator()(const Vector& x, const Matrix& Q) const;

    const ConstantTensor& anchor() const { return anchor_; }
    const EllipticityReport& anchor_ellipticity() const { return *anchor_report_; }
    double anchor_nu() const;
    std::optional<double> declared_nearness() const { return options_.declared_nearness; }
    bool thread_safe() const { return options_.thread_safe; }
    bool x_periodic() const { return options_.x_periodic; }
    const std::string& name() const { return options_.name; }
    int N() const { return anchor_.N(); }
    int n() const { return anchor_.n(); }

    /// The linear operator Q -> A:Q, anchored to A itself.
    static NonlinearOperator linear(const ConstantTensor& A, std::string name = "linear");

private:
    Evaluator evaluator_;
    ConstantTensor anchor_;
    Options options_;
    std::shared_ptr<const EllipticityReport> anchor_report_;
};

}  // namespace ellsys
