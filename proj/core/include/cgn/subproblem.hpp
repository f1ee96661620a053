#pragma once

#include <stdexcept>
#include <string>

#include "cgn/problem.hpp"

namespace cgn {

/// Budget and accuracy knobs for the proximal subproblem solver.
struct InnerConfig {
    /// Target on the fixed-point residual certificate (see solve_subproblem).
    double tolerance = 1e-10;
    int max_inner_iterations = 100000;
};

/// Result of minimizing y |-> g(F(x) + J(x)(y-x)) + (mu/2)||y-x||^2 over D.
struct SubproblemSolution {
    Vector p;               ///< approximate minimizer; always a projection output, so p lies in D
    double value = 0.0;     ///< subproblem objective recomputed at p
    int inner_iterations = 0;
    double residual = 0.0;  ///< certified fixed-point residual at p
    double mu = 0.0;
};

/// Thrown when the inner iteration budget runs out before the residual
/// target is met. Carries the best candidate seen so callers can degrade
/// gracefully instead of losing the work.
class InnerSolveError : public std::runtime_error {
public:
    InnerSolveError(const std::string& what, SubproblemSolution best);
    const SubproblemSolution& best() const { return best_; }

private:
    SubproblemSolution best_;
};

/// Largest singular value of J by power iteration on J^T J (50 rounds,
/// relative tolerance 1e-10, deterministic start vector), inflated by 1e-6
/// relative so step sizes built from the estimate stay on the safe side.
double operator_norm_estimate(const Matrix& J);

/// Solves the strongly convex subproblem with a primal-dual splitting
/// (Chambolle-Pock with fixed steps, one-step extrapolation, and residual
/// balancing: when one block's movement dominates the other's by two orders
/// of magnitude at doubling-spaced checkpoints, the step ratio sigma/tau
/// shifts toward the slow block while tau * sigma * ||J||^2 stays 1).
/// Certification: the returned p is the primal output of one balanced
/// fixed-step primal-dual round from the current state, and residual
/// measures how far one further exact round moves the primal-dual pair
/// (both blocks; a projection-pinned primal alone proves nothing), divided
/// by (1 + ||x||). The probe uses the balanced steps 1/||J|| regardless of
/// the running ratio. Success means residual <= cfg.tolerance.
///
/// warm_start, when given, seeds the primal iterate (it is projected onto D
/// first). Inputs determine the output exactly; there is no hidden state.
SubproblemSolution solve_subproblem(const CompositeProblem& problem, const Vector& x,
                                    double mu, const InnerConfig& cfg,
                                    const Vector* warm_start = nullptr);

/// ||x - p_mu(x)||: vanishes exactly at points where no feasible first-order
/// improvement of the linearized model exists.
double criticality_measure(const CompositeProblem& problem, const Vector& x, double mu,
                           const InnerConfig& cfg);

}  // namespace cgn
