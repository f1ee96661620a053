#include "cgn/solver.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace cgn {

const char* to_string(RunStatus status) {
    switch (status) {
        case RunStatus::converged_critical: return "converged-critical";
        case RunStatus::diverging_norm: return "diverging-norm";
        case RunStatus::outer_budget_exhausted: return "outer-budget-exhausted";
        case RunStatus::backtrack_budget_exhausted: return "backtrack-budget-exhausted";
        case RunStatus::inner_failure: return "inner-failure";
    }
    return "unknown";
}

BacktrackBudgetError::BacktrackBudgetError(const std::string& what, double mu_reached)
    : std::runtime_error(what), mu_reached_(mu_reached) {}

namespace {

constexpr double kMembershipTol = 1e-10;
constexpr double kInnerToleranceFloor = 1e-13;

void validate(const SolverConfig& c) {
    if (!(c.mu0 > 0.0)) throw std::invalid_argument("SolverConfig: mu0 must be positive");
    if (!(c.tau > 1.0)) throw std::invalid_argument("SolverConfig: tau must exceed 1");
    if (!(c.step_tolerance > 0.0))
        throw std::invalid_argument("SolverConfig: step_tolerance must be positive");
    if (c.max_outer_iterations <= 0)
        throw std::invalid_argument("SolverConfig: max_outer_iterations must be positive");
    if (!(c.divergence_norm_bound > 0.0))
        throw std::invalid_argument("SolverConfig: divergence_norm_bound must be positive");
    if (c.max_backtracks_per_iteration < 0)
        throw std::invalid_argument("SolverConfig: max_backtracks_per_iteration must be >= 0");
    if (!(c.inner.tolerance > 0.0))
        throw std::invalid_argument("SolverConfig: inner tolerance must be positive");
    if (c.inner.max_inner_iterations <= 0)
        throw std::invalid_argument("SolverConfig: inner iteration budget must be positive");
}

// The requested subproblem accuracy shrinks with the square of the previous
// step so that inexactness stays an order below the (mu/2)||step||^2
// decrease margin; the floor keeps the request attainable in doubles.
double effective_inner_tolerance(const SolverConfig& config, double mu,
                                 double previous_step_norm) {
    if (previous_step_norm < 0.0) return config.inner.tolerance;
    const double scaled = 1e-4 * mu * previous_step_norm * previous_step_norm;
    return std::min(config.inner.tolerance, std::max(kInnerToleranceFloor, scaled));
}

}  // namespace

BacktrackResult backtracking_step(const CompositeProblem& problem, const Vector& x_k,
                                  const SolverConfig& config, double mu_start,
                                  double previous_step_norm) {
    validate(config);
    if (x_k.size() != problem.input_dim())
        throw std::invalid_argument("backtracking_step: point has wrong dimension");
    if (!problem.feasible_set().contains(x_k, kMembershipTol))
        throw std::invalid_argument("backtracking_step: point is outside the feasible set");

    double mu = mu_start > 0.0 ? mu_start : config.mu0;
    int backtracks = 0;
    int inner_total = 0;
    Vector ladder_warm;
    const Vector* warm = nullptr;

    for (;;) {
        InnerConfig inner = config.inner;
        inner.tolerance = effective_inner_tolerance(config, mu, previous_step_norm);
        SubproblemSolution sol = solve_subproblem(problem, x_k, mu, inner, warm);
        inner_total += sol.inner_iterations;

        // Decrease test: actual objective at the candidate against the
        // certified model value. Equality (within the inexactness slack)
        // accepts; only a genuine overshoot backtracks.
        if (problem.objective(sol.p) <= sol.value + 10.0 * inner.tolerance) {
            BacktrackResult result;
            result.step_norm = (sol.p - x_k).norm();
            result.x_next = std::move(sol.p);
            result.mu_accepted = mu;
            result.backtracks = backtracks;
            result.inner_iterations = inner_total;
            result.subproblem_value = sol.value;
            return result;
        }
        if (++backtracks > config.max_backtracks_per_iteration)
            throw BacktrackBudgetError("decrease test kept failing up to mu = " +
                                           std::to_string(mu) +
                                           "; jacobian oracle likely inconsistent",
                                       mu);
        mu *= config.tau;
        ladder_warm = std::move(sol.p);  // rejected candidate still seeds the next solve
        warm = &ladder_warm;
    }
}

RunOutcome run(const CompositeProblem& problem, const Vector& x0, const SolverConfig& config) {
    validate(config);
    if (x0.size() != problem.input_dim())
        throw std::invalid_argument("run: x0 has wrong dimension");

    RunOutcome out;
    Vector x = x0;
    if (!problem.feasible_set().contains(x, kMembershipTol)) {
        x = problem.feasible_set().project(x);
        out.projected_x0 = true;
    }

    RunStatus status = RunStatus::outer_budget_exhausted;
    double cumulative = 0.0;
    double mu_start = config.mu0;
    double previous_step = -1.0;
    double final_mu = config.mu0;

    try {
        for (int k = 0; k < config.max_outer_iterations; ++k) {
            if (x.norm() >= config.divergence_norm_bound) {
                status = RunStatus::diverging_norm;
                break;
            }
            BacktrackResult step =
                backtracking_step(problem, x, config, mu_start, previous_step);

            IterateRecord rec;
            rec.k = k;
            rec.x = x;
            rec.objective = problem.objective(x);
            rec.mu = step.mu_accepted;
            rec.step_norm = step.step_norm;
            rec.backtracks = step.backtracks;
            rec.inner_iterations = step.inner_iterations;
            rec.criticality = step.step_norm;
            cumulative += step.step_norm;
            rec.cumulative_step = cumulative;
            rec.subproblem_value = step.subproblem_value;
            out.trace.push_back(std::move(rec));

            final_mu = step.mu_accepted;
            previous_step = step.step_norm;
            mu_start = config.reset_mu_each_iteration ? config.mu0
                                                      : step.mu_accepted / config.tau;
            x = std::move(step.x_next);

            if (step.step_norm <= config.step_tolerance) {
                status = RunStatus::converged_critical;
                break;
            }
        }
    } catch (const InnerSolveError&) {
        status = RunStatus::inner_failure;
    } catch (const BacktrackBudgetError&) {
        status = RunStatus::backtrack_budget_exhausted;
    }

    out.status = status;
    out.final_x = x;
    out.final_objective = problem.objective(x);
    out.final_mu = final_mu;
    out.final_criticality = out.trace.empty() ? std::numeric_limits<double>::quiet_NaN()
                                              : out.trace.back().step_norm;
    if (status == RunStatus::converged_critical) {
        // Recompute from scratch as a certificate rather than trusting the
        // last step norm.
        try {
            out.final_criticality = criticality_measure(problem, x, final_mu, config.inner);
        } catch (const InnerSolveError& e) {
            out.final_criticality = (x - e.best().p).norm();
        }
    }
    return out;
}

}  // namespace cgn
