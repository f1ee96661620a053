#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "cgn/problem.hpp"
#include "cgn/subproblem.hpp"

namespace cgn {

struct SolverConfig {
    double mu0 = 1.0;                     ///< initial proximal weight, reset point of each iteration
    double tau = 2.0;                     ///< backtracking multiplier, > 1
    double step_tolerance = 1e-8;         ///< stop when ||x_{k+1} - x_k|| falls below this
    int max_outer_iterations = 10000;
    double divergence_norm_bound = 1e10;  ///< declare divergence when ||x_k|| reaches this
    int max_backtracks_per_iteration = 60;
    InnerConfig inner;
    /// True (default): every iteration restarts the proximal weight at mu0.
    /// False: start one backtracking rung below the previously accepted
    /// value. The false setting trades fidelity to the plain scheme for
    /// fewer subproblem solves; results stay deterministic either way.
    bool reset_mu_each_iteration = true;
};

/// One row of the run trace. criticality duplicates step_norm by
/// construction (the accepted candidate *is* the proximal map at the
/// accepted weight); both are kept because they are distinct quantities
/// conceptually and in the output format.
struct IterateRecord {
    int k = 0;
    Vector x;                       ///< iterate before the step
    double objective = 0.0;         ///< composite objective at x
    double mu = 0.0;                ///< accepted proximal weight
    double step_norm = 0.0;         ///< ||x_{k+1} - x_k||
    int backtracks = 0;
    int inner_iterations = 0;       ///< summed over the whole backtracking ladder
    double criticality = 0.0;       ///< ||x_k - p(x_k)|| at the accepted weight
    double cumulative_step = 0.0;
    double subproblem_value = 0.0;  ///< certified model value at the accepted candidate
};

enum class RunStatus {
    converged_critical,
    diverging_norm,
    outer_budget_exhausted,
    backtrack_budget_exhausted,
    inner_failure,
};

/// Hyphenated names used in trace files and CLI output.
const char* to_string(RunStatus status);

struct RunOutcome {
    RunStatus status = RunStatus::outer_budget_exhausted;
    Vector final_x;
    double final_objective = 0.0;
    /// For converged runs this is recomputed from scratch at final_x as a
    /// certificate; otherwise it is the last observed step norm.
    double final_criticality = 0.0;
    double final_mu = 0.0;
    std::vector<IterateRecord> trace;
    bool projected_x0 = false;  ///< x0 was infeasible and was projected first
};

/// Raised when the proximal weight is doubled past the per-iteration budget
/// without the decrease test passing; this typically indicates an
/// inconsistent jacobian oracle or a non-smooth inner map.
class BacktrackBudgetError : public std::runtime_error {
public:
    BacktrackBudgetError(const std::string& what, double mu_reached);
    double mu_reached() const { return mu_reached_; }

private:
    double mu_reached_;
};

struct BacktrackResult {
    Vector x_next;
    double mu_accepted = 0.0;
    int backtracks = 0;
    int inner_iterations = 0;
    double subproblem_value = 0.0;  ///< model value certifying the decrease test
    double step_norm = 0.0;
};

/// One outer iteration: solve the proximal subproblem at increasing weights
/// mu, mu*tau, mu*tau^2, ... until the candidate passes the decrease test
///     objective(candidate) <= subproblem value + slack,
/// where the slack is ten times the inner tolerance actually requested (ties
/// count as acceptance). mu_start <= 0 means config.mu0.
/// previous_step_norm < 0 means "no history"; otherwise it tightens the
/// requested inner tolerance to 1e-4 * mu * previous_step_norm^2 (floored at
/// 1e-13) so subproblem inexactness stays negligible against the quadratic
/// decrease term.
BacktrackResult backtracking_step(const CompositeProblem& problem, const Vector& x_k,
                                  const SolverConfig& config, double mu_start = 0.0,
                                  double previous_step_norm = -1.0);

/// Full outer loop: backtracking steps until the step norm falls below
/// step_tolerance (converged-critical), the iterate norm reaches
/// divergence_norm_bound (diverging-norm), or a budget runs out. Budget and
/// failure conditions are reported as statuses, never exceptions.
RunOutcome run(const CompositeProblem& problem, const Vector& x0, const SolverConfig& config);

}  // namespace cgn
