#include "cgn/problem.hpp"

#include <cmath>
#include <utility>

namespace cgn {

CompositeProblem::CompositeProblem(SmoothMap F, OuterConvex g, FeasibleSet D)
    : F_(std::move(F)), g_(std::move(g)), D_(std::move(D)) {
    if (F_.input_dim <= 0 || F_.output_dim <= 0) {
        throw std::invalid_argument("CompositeProblem: map dimensions must be positive");
    }
    if (!F_.value || !F_.jacobian) {
        throw std::invalid_argument("CompositeProblem: smooth map needs value and jacobian oracles");
    }
    if (!g_.value || !g_.subgradient || !g_.prox) {
        throw std::invalid_argument("CompositeProblem: outer function needs value, subgradient and prox oracles");
    }
    if (!D_.project || !D_.contains) {
        throw std::invalid_argument("CompositeProblem: feasible set needs project and contains oracles");
    }
    if (F_.output_dim != g_.dim) {
        throw std::invalid_argument("CompositeProblem: F output dimension " +
                                    std::to_string(F_.output_dim) + " != outer dimension " +
                                    std::to_string(g_.dim));
    }
    if (F_.input_dim != D_.dim) {
        throw std::invalid_argument("CompositeProblem: F input dimension " +
                                    std::to_string(F_.input_dim) + " != set dimension " +
                                    std::to_string(D_.dim));
    }
}

void CompositeProblem::require_point_dim(const Vector& x, const char* what) const {
    if (x.size() != F_.input_dim) {
        throw std::invalid_argument(std::string(what) + ": point has dimension " +
                                    std::to_string(x.size()) + ", expected " +
                                    std::to_string(F_.input_dim));
    }
}

double CompositeProblem::objective(const Vector& x) const {
    require_point_dim(x, "objective");
    return g_.value(F_.value(x));
}

double CompositeProblem::model(const Vector& x, const Vector& y) const {
    require_point_dim(x, "model");
    require_point_dim(y, "model");
    return g_.value(F_.value(x) + F_.jacobian(x) * (y - x));
}

Vector CompositeProblem::hessian_vec(const Vector& x, const Vector& v, const Vector& d) const {
    require_point_dim(x, "hessian_vec");
    if (v.size() != F_.output_dim) {
        throw std::invalid_argument("hessian_vec: weight vector has wrong dimension");
    }
    if (F_.has_hessian_vec()) {
        return F_.hessian_vec(x, v, d);
    }
    const double dnorm = d.norm();
    if (dnorm == 0.0) {
        return Vector::Zero(F_.input_dim);
    }
    const double h = 1e-5 * (1.0 + x.norm());
    const Vector dir = d / dnorm;
    const Vector plus = F_.jacobian(x + h * dir).transpose() * v;
    const Vector minus = F_.jacobian(x - h * dir).transpose() * v;
    return (plus - minus) * (dnorm / (2.0 * h));
}

}  // namespace cgn
