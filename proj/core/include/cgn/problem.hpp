#pragma once

#include <Eigen/Core>

#include <functional>
#include <stdexcept>
#include <string>

namespace cgn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Smooth inner map F : R^n -> R^m with value and Jacobian oracles.
///
/// The optional hessian_vec oracle evaluates (sum_i v_i H_i(x)) d, where
/// H_i is the Hessian of coordinate i of F. Oracles must be deterministic
/// and must not mutate shared state; problems are shared across threads.
struct SmoothMap {
    int input_dim = 0;   // n
    int output_dim = 0;  // m
    std::function<Vector(const Vector&)> value;
    std::function<Matrix(const Vector&)> jacobian;
    /// (x, v in R^m, d in R^n) -> R^n; empty when unavailable.
    std::function<Vector(const Vector&, const Vector&, const Vector&)> hessian_vec;

    bool has_hessian_vec() const { return static_cast<bool>(hessian_vec); }
};

/// Convex, finite-valued outer function g : R^m -> R.
///
/// subgradient returns one deterministic element of the subdifferential.
/// prox(z, t) = argmin_w g(w) + ||w - z||^2 / (2t) for t > 0.
struct OuterConvex {
    int dim = 0;  // m
    std::function<double(const Vector&)> value;
    std::function<Vector(const Vector&)> subgradient;
    std::function<Vector(const Vector&, double)> prox;
};

/// Closed convex feasible set D in R^n with exact Euclidean projection.
struct FeasibleSet {
    int dim = 0;  // n
    std::function<Vector(const Vector&)> project;
    /// Membership up to tol, measured as distance to the projection.
    std::function<bool(const Vector&, double)> contains;
};

/// A composite instance min_{x in D} g(F(x)).
class CompositeProblem {
public:
    CompositeProblem(SmoothMap F, OuterConvex g, FeasibleSet D);

    const SmoothMap& smooth_map() const { return F_; }
    const OuterConvex& outer() const { return g_; }
    const FeasibleSet& feasible_set() const { return D_; }

    int input_dim() const { return F_.input_dim; }
    int output_dim() const { return F_.output_dim; }

    /// g(F(x)). No feasibility check; callers test membership separately.
    double objective(const Vector& x) const;

    /// Partial linearization h(x, y) = g(F(x) + J(x) (y - x)), convex in y.
    double model(const Vector& x, const Vector& y) const;

    /// Hessian-vector product (sum_i v_i H_i(x)) d, via the oracle when
    /// present, otherwise by central differences of x -> J(x)^T v with
    /// step 1e-5 * (1 + ||x||).
    Vector hessian_vec(const Vector& x, const Vector& v, const Vector& d) const;

private:
    void require_point_dim(const Vector& x, const char* what) const;

    SmoothMap F_;
    OuterConvex g_;
    FeasibleSet D_;
};

}  // namespace cgn
