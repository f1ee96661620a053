#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cgn/problem.hpp"
#include "cgn/subproblem.hpp"

namespace cgn {

/// Outcome of one numerical certification. pass is always equivalent to
/// max_violation <= tolerance; skipped counts probe points that were left
/// out (e.g. nondifferentiable spots), which never count against the check.
struct CheckReport {
    std::string name;
    double max_violation = 0.0;
    double tolerance = 0.0;
    int samples = 0;
    int skipped = 0;
    bool pass = true;
};

/// Heuristic differentiability filter for g at z: the subgradient oracle is
/// evaluated at 8 random perturbations of magnitude 1e-7; g is declared
/// differentiable at z when all returned vectors agree pairwise within 1e-9.
bool probe_differentiable(const OuterConvex& g, const Vector& z, std::uint64_t seed);

/// Compares J(x)^T v (v from the subgradient oracle) against central finite
/// differences of the composite objective, at x itself plus n_samples - 1
/// gaussian perturbations of it. A sample is skipped when the probe flags
/// its base point, or when a finite-difference stencil point selects a
/// different subgradient than the center (the quotient would straddle a
/// gradient jump). Tolerance: 1e-5 relative.
CheckReport chain_rule_check(const CompositeProblem& problem, const Vector& x, int n_samples,
                             std::uint64_t seed = 0);

/// Certifies both partial-derivative formulas of the partially linearized
/// model at one (x, y) pair: the y-partial J(x)^T v and the x-partial
/// (sum_i v_i Hess f_i(x))(y - x), each against finite differences of the
/// model. Skipped entirely if the probe flags the linearization point;
/// either half is skipped individually when its stencil leaves the
/// smoothness cell of the center.
CheckReport h_partial_checks(const CompositeProblem& problem, const Vector& x, const Vector& y,
                             std::uint64_t seed = 0);

/// Gradient formula for the subproblem optimal value as a function of x:
///   (sum_i v_i Hess f_i(x))(p - x) + mu (x - p),
/// with p the subproblem solution and v the subgradient of g at the
/// linearization of F through p. Zero (both terms) when x is a fixed point.
Vector value_function_gradient(const CompositeProblem& problem, const Vector& x, double mu,
                               const InnerConfig& cfg);

/// Finite-difference agreement of value_function_gradient at x and gaussian
/// perturbations of it. Skips probe-flagged points, points whose stencil
/// drags the linearization across a kink of g, and points where the
/// pointwise subgradient selection fails the inner stationarity condition
/// (the minimizer pins a kink, so the selection is not the multiplier the
/// sensitivity formula needs). Tolerance: 1e-4 relative (the value function
/// is differentiable only almost everywhere).
CheckReport value_function_gradient_check(const CompositeProblem& problem, const Vector& x,
                                          double mu, const InnerConfig& cfg, int n_samples,
                                          std::uint64_t seed = 0);

/// Scans mu_grid (ascending) for the smallest weight for which the descent
/// inequality
///   objective(p) <= model(x, p) + (mu/2)||p - x||^2 + 10 * cfg.tolerance
/// holds at every x sampled uniformly from the box [lower, upper]. Returns
/// nullopt when no grid value works; an empty sample set is vacuous, so the
/// first grid element wins.
std::optional<double> mu_bar_probe(const CompositeProblem& problem, const Vector& lower,
                                   const Vector& upper, const std::vector<double>& mu_grid,
                                   const InnerConfig& cfg, int n_samples = 20,
                                   std::uint64_t seed = 0);

/// The full certification battery used by the command-line `check` verb:
/// chain rule, model partials, subproblem value consistency and descent
/// bound, the per-iteration descent chain on a short run, the value-gradient
/// finite-difference and boundedness checks, and the mu threshold probe.
std::vector<CheckReport> standard_check_suite(const CompositeProblem& problem, const Vector& x0,
                                              int n_samples, std::uint64_t seed,
                                              const InnerConfig& cfg);

}  // namespace cgn
