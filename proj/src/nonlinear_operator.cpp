#include "ellsys/nonlinear_operator.hpp"

#include <cmath>
#include <string>

#include "ellsys/ellipticity.hpp"
#include "ellsys/errors.hpp"

namespace ellsys {

NonlinearOperator::NonlinearOperator(Evaluator evaluator, ConstantTensor anchor, Options options)
    : evaluator_(std::move(evaluator)), anchor_(std::move(anchor)), options_(std::move(options)) {
    if (!evaluator_) throw InputError("nonlinear operator needs an evaluator");
    if (options_.declared_nearness && !(*options_.declared_nearness >= 0.0)) {
        throw InputError("declared nearness must be nonnegative");
    }
    anchor_report_ = std::make_shared<const EllipticityReport>(ellipticity_constant(anchor_));
}

Vector NonlinearOperator::operator()(const Vector& x, const Matrix& Q) const {
    Vector out;
    try {
        out = evaluator_(x, Q);
    } catch (const EvaluationError&) {
        throw;
    } catch (const std::exception& e) {
        throw EvaluationError(std::string("operator evaluation failed: ") + e.what());
    }
    if (out.size() != anchor_.N()) {
        throw EvaluationError("operator returned " + std::to_string(out.size()) + " values, expected " +
                              std::to_string(anchor_.N()));
    }
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        if (!std::isfinite(out(i))) throw EvaluationError("operator returned a non-finite value");
    }
    return out;
}

double NonlinearOperator::anchor_nu() const { return anchor_report_->nu; }

NonlinearOperator NonlinearOperator::linear(const ConstantTensor& A, std::string name) {
    Options opts;
    opts.declared_nearness = 0.0;
    opts.name = std::move(name);
    return {[A](const Vector&, const Matrix& Q) { return contract(A, Q); }, A, opts};
}

}  // namespace ellsys
