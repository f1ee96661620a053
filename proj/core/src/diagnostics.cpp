#include "cgn/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "cgn/rng.hpp"
#include "cgn/solver.hpp"

namespace cgn {

namespace {

constexpr double kProbeRadius = 1e-7;

// A subgradient selection jump across a kink of the catalog functions has
// size of order one (a sign flip, a vertex swap), while the smooth drift of
// a gradient over a 1e-7 ball is at most ~2e-7 times the local curvature.
// 1e-6 sits between the two regimes with orders of magnitude to spare on
// both sides.
constexpr double kProbeAgreement = 1e-6;

// Agreement threshold between a pointwise subgradient selection and the
// multiplier implied by inner-problem optimality (see
// value_function_gradient_check). Measured on the catalog at the default
// inner tolerance, consistent selections leave a relative stationarity
// residual below 1e-8 while a wrong selection at a pinned kink leaves one of
// order 0.1; 1e-6 separates the regimes with two orders of margin.
constexpr double kMultiplierAgreement = 1e-6;

Vector gaussian_vector(SplitMix64& rng, int n) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = gaussian(rng);
    return v;
}

/// One evaluation of the quantity being differenced, together with the point
/// at which g was consulted to produce it.
struct StencilPoint {
    double value = 0.0;
    Vector z;
};

// Central differences with the step tied to the argument's size. The probe
// at the center only certifies differentiability within 1e-7, but the
// stencil drags the argument of g orders of magnitude farther, so each
// stencil point must additionally select the same subgradient as the center
// (up to the drift a C1 function can accumulate over the observed
// displacement). A stencil that reaches into a different smoothness cell
// straddles a gradient jump and certifies nothing; those samples are
// reported as skipped, never as failures.
std::optional<Vector> guarded_fd_gradient(const std::function<StencilPoint(const Vector&)>& eval,
                                          const OuterConvex& g, const Vector& x,
                                          const Vector& center_z) {
    const Vector center_v = g.subgradient(center_z);
    const double h = 1e-6 * (1.0 + x.norm());
    Vector grad(x.size());
    Vector probe = x;
    for (int i = 0; i < x.size(); ++i) {
        probe[i] = x[i] + h;
        const StencilPoint plus = eval(probe);
        probe[i] = x[i] - h;
        const StencilPoint minus = eval(probe);
        probe[i] = x[i];
        for (const StencilPoint* side : {&plus, &minus}) {
            const double dz = (side->z - center_z).lpNorm<Eigen::Infinity>();
            const double dv =
                (g.subgradient(side->z) - center_v).lpNorm<Eigen::Infinity>();
            if (dv > kProbeAgreement + 10.0 * dz) return std::nullopt;
        }
        grad[i] = (plus.value - minus.value) / (2.0 * h);
    }
    return grad;
}

double relative_deviation(const Vector& got, const Vector& reference) {
    return (got - reference).norm() / (1.0 + reference.norm());
}

void close(CheckReport& rep) { rep.pass = rep.max_violation <= rep.tolerance; }

}  // namespace

bool probe_differentiable(const OuterConvex& g, const Vector& z, std::uint64_t seed) {
    SplitMix64 rng(seed ^ 0x0ddba11c0ffee123ULL);
    const int m = static_cast<int>(z.size());
    std::vector<Vector> selections;
    selections.reserve(8);
    for (int k = 0; k < 8; ++k) {
        Vector dir = gaussian_vector(rng, m);
        const double n = dir.norm();
        if (n == 0.0)
            dir.setConstant(1.0 / std::sqrt(static_cast<double>(m)));
        else
            dir /= n;
        selections.push_back(g.subgradient(z + kProbeRadius * dir));
    }
    for (std::size_t i = 0; i < selections.size(); ++i)
        for (std::size_t j = i + 1; j < selections.size(); ++j)
            if ((selections[i] - selections[j]).lpNorm<Eigen::Infinity>() > kProbeAgreement)
                return false;
    return true;
}

CheckReport chain_rule_check(const CompositeProblem& problem, const Vector& x, int n_samples,
                             std::uint64_t seed) {
    CheckReport rep;
    rep.name = "chain-rule-fd";
    rep.tolerance = 1e-5;
    SplitMix64 rng(seed ^ 0xc4a18a1eULL);
    const SmoothMap& F = problem.smooth_map();
    const OuterConvex& g = problem.outer();
    for (int s = 0; s < n_samples; ++s) {
        const Vector xs =
            s == 0 ? x : Vector(x + 0.5 * gaussian_vector(rng, problem.input_dim()));
        const Vector z = F.value(xs);
        if (!probe_differentiable(g, z, rng.next())) {
            ++rep.skipped;
            continue;
        }
        const Vector analytic = F.jacobian(xs).transpose() * g.subgradient(z);
        const auto fd = guarded_fd_gradient(
            [&](const Vector& t) {
                Vector zt = F.value(t);
                const double value = g.value(zt);
                return StencilPoint{value, std::move(zt)};
            },
            g, xs, z);
        if (!fd) {
            ++rep.skipped;
            continue;
        }
        rep.max_violation = std::max(rep.max_violation, relative_deviation(analytic, *fd));
        ++rep.samples;
    }
    close(rep);
    return rep;
}

CheckReport h_partial_checks(const CompositeProblem& problem, const Vector& x, const Vector& y,
                             std::uint64_t seed) {
    CheckReport rep;
    rep.name = "h-partials-fd";
    rep.tolerance = 1e-5;
    const SmoothMap& F = problem.smooth_map();
    const Vector c = F.value(x) + F.jacobian(x) * (y - x);
    if (!probe_differentiable(problem.outer(), c, seed ^ 0x8badf00dULL)) {
        rep.skipped = 1;
        close(rep);
        return rep;
    }
    const OuterConvex& g = problem.outer();
    const Vector v = g.subgradient(c);
    const Vector Fx = F.value(x);
    const Matrix Jx = F.jacobian(x);

    const Vector y_analytic = Jx.transpose() * v;
    const auto y_fd = guarded_fd_gradient(
        [&](const Vector& t) {
            Vector zt = Fx + Jx * (t - x);
            const double value = g.value(zt);
            return StencilPoint{value, std::move(zt)};
        },
        g, y, c);
    if (y_fd) {
        rep.max_violation = std::max(rep.max_violation, relative_deviation(y_analytic, *y_fd));
        ++rep.samples;
    } else {
        ++rep.skipped;
    }

    const Vector x_analytic = problem.hessian_vec(x, v, y - x);
    const auto x_fd = guarded_fd_gradient(
        [&](const Vector& t) {
            Vector zt = F.value(t) + F.jacobian(t) * (y - t);
            const double value = g.value(zt);
            return StencilPoint{value, std::move(zt)};
        },
        g, x, c);
    if (x_fd) {
        rep.max_violation = std::max(rep.max_violation, relative_deviation(x_analytic, *x_fd));
        ++rep.samples;
    } else {
        ++rep.skipped;
    }

    close(rep);
    return rep;
}

Vector value_function_gradient(const CompositeProblem& problem, const Vector& x, double mu,
                               const InnerConfig& cfg) {
    const SubproblemSolution sol = solve_subproblem(problem, x, mu, cfg);
    const SmoothMap& F = problem.smooth_map();
    const Vector c = F.value(x) + F.jacobian(x) * (sol.p - x);
    const Vector v = problem.outer().subgradient(c);
    return problem.hessian_vec(x, v, sol.p - x) + mu * (x - sol.p);
}

CheckReport value_function_gradient_check(const CompositeProblem& problem, const Vector& x,
                                          double mu, const InnerConfig& cfg, int n_samples,
                                          std::uint64_t seed) {
    CheckReport rep;
    rep.name = "value-gradient-fd";
    rep.tolerance = 1e-4;
    SplitMix64 rng(seed ^ 0xfacefeed0514ULL);
    const SmoothMap& F = problem.smooth_map();
    const OuterConvex& g = problem.outer();
    const auto solve_at = [&](const Vector& t) {
        const SubproblemSolution sol = solve_subproblem(problem, t, mu, cfg);
        Vector zt = F.value(t) + F.jacobian(t) * (sol.p - t);
        return StencilPoint{sol.value, std::move(zt)};
    };
    for (int s = 0; s < n_samples; ++s) {
        const Vector xs =
            s == 0 ? x : Vector(x + 0.5 * gaussian_vector(rng, problem.input_dim()));
        const SubproblemSolution sol = solve_subproblem(problem, xs, mu, cfg);
        const Matrix J = F.jacobian(xs);
        const Vector c = F.value(xs) + J * (sol.p - xs);
        if (!probe_differentiable(g, c, rng.next())) {
            ++rep.skipped;
            continue;
        }
        const Vector v = g.subgradient(c);
        // The sensitivity formula below is valid only when this selection is
        // the multiplier picked by the inner optimality condition
        // J^T v + mu (p - x) in -N_D(p). When the minimizer pins a component
        // of its linearization against a kink, the selection at the inexact
        // primal point differs from that multiplier by an order-one amount
        // (the probe cannot see this: g itself is smooth a noise-width away
        // from the kink), so the sample certifies nothing and is skipped.
        const Vector jtv = J.transpose() * v;
        const Vector retracted =
            problem.feasible_set().project(sol.p - (jtv + mu * (sol.p - xs)) / mu);
        const double stationarity = mu * (retracted - sol.p).norm();
        const double scale = 1.0 + jtv.norm() + mu * (sol.p - xs).norm();
        if (stationarity > kMultiplierAgreement * scale) {
            ++rep.skipped;
            continue;
        }
        const Vector analytic = problem.hessian_vec(xs, v, sol.p - xs) + mu * (xs - sol.p);
        const auto fd = guarded_fd_gradient(solve_at, g, xs, c);
        if (!fd) {
            ++rep.skipped;
            continue;
        }
        rep.max_violation = std::max(rep.max_violation, relative_deviation(analytic, *fd));
        ++rep.samples;
    }
    close(rep);
    return rep;
}

std::optional<double> mu_bar_probe(const CompositeProblem& problem, const Vector& lower,
                                   const Vector& upper, const std::vector<double>& mu_grid,
                                   const InnerConfig& cfg, int n_samples, std::uint64_t seed) {
    if (lower.size() != problem.input_dim() || upper.size() != problem.input_dim())
        throw std::invalid_argument("mu_bar_probe: region does not match the problem dimension");
    for (int i = 0; i < lower.size(); ++i)
        if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]) || lower[i] > upper[i])
            throw std::invalid_argument("mu_bar_probe: region must be a bounded box");

    SplitMix64 rng(seed ^ 0xba5eba11ULL);
    std::vector<Vector> samples;
    samples.reserve(static_cast<std::size_t>(std::max(n_samples, 0)));
    for (int s = 0; s < n_samples; ++s) {
        Vector xs(lower.size());
        for (int i = 0; i < lower.size(); ++i) xs[i] = rng.uniform(lower[i], upper[i]);
        samples.push_back(std::move(xs));
    }

    for (const double mu : mu_grid) {
        if (!(mu > 0.0))
            throw std::invalid_argument("mu_bar_probe: grid entries must be positive");
        bool holds_everywhere = true;
        for (const Vector& xs : samples) {
            const SubproblemSolution sol = solve_subproblem(problem, xs, mu, cfg);
            if (problem.objective(sol.p) > sol.value + 10.0 * cfg.tolerance) {
                holds_everywhere = false;
                break;
            }
        }
        if (holds_everywhere) return mu;
    }
    return std::nullopt;
}

std::vector<CheckReport> standard_check_suite(const CompositeProblem& problem, const Vector& x0,
                                              int n_samples, std::uint64_t seed,
                                              const InnerConfig& cfg) {
    std::vector<CheckReport> reports;
    const int n = problem.input_dim();
    SplitMix64 rng(seed ^ 0x517ec0defadeULL);

    reports.push_back(chain_rule_check(problem, x0, n_samples, rng.next()));

    // Model partials over sampled (x, y) pairs, folded into one report.
    {
        CheckReport merged;
        merged.name = "h-partials-fd";
        merged.tolerance = 1e-5;
        const int pairs = std::max(1, std::min(n_samples, 50));
        for (int s = 0; s < pairs; ++s) {
            const Vector xs = x0 + 0.5 * gaussian_vector(rng, n);
            const Vector ys = xs + 0.5 * gaussian_vector(rng, n);
            const CheckReport one = h_partial_checks(problem, xs, ys, rng.next());
            merged.samples += one.samples;
            merged.skipped += one.skipped;
            merged.max_violation = std::max(merged.max_violation, one.max_violation);
        }
        close(merged);
        reports.push_back(merged);
    }

    const double weights[] = {0.1, 1.0, 10.0};

    // Subproblem value recomputation and the strong-convexity descent bound,
    // at feasible sample points.
    {
        CheckReport consistency;
        consistency.name = "value-consistency";
        consistency.tolerance = 1e-12;
        CheckReport descent;
        descent.name = "descent-bound";
        descent.tolerance = 1e-7;
        const int pts = std::max(1, std::min(n_samples, 20));
        for (const double mu : weights) {
            for (int s = 0; s < pts; ++s) {
                const Vector xs =
                    problem.feasible_set().project(x0 + 0.5 * gaussian_vector(rng, n));
                const SubproblemSolution sol = solve_subproblem(problem, xs, mu, cfg);
                const double recomputed =
                    problem.model(xs, sol.p) + 0.5 * mu * (sol.p - xs).squaredNorm();
                consistency.max_violation =
                    std::max(consistency.max_violation, std::abs(recomputed - sol.value));
                ++consistency.samples;
                // value + (mu/2)||p - x||^2 <= objective(x): the quadratic
                // growth of the strongly convex subproblem away from its
                // minimizer, evaluated at the feasible candidate y = x.
                const double gap = sol.value + 0.5 * mu * (sol.p - xs).squaredNorm() -
                                   problem.objective(xs);
                descent.max_violation = std::max(descent.max_violation, gap);
                ++descent.samples;
            }
        }
        close(consistency);
        close(descent);
        reports.push_back(consistency);
        reports.push_back(descent);
    }

    // Per-iteration descent chain on a short run: the certified model value
    // plus the quadratic term never exceeds the objective before the step,
    // and the next objective never exceeds the certified model value.
    {
        CheckReport chain;
        chain.name = "descent-chain";
        chain.tolerance = 1e-7;
        SolverConfig run_cfg;
        run_cfg.inner = cfg;
        run_cfg.max_outer_iterations = 25;
        const RunOutcome out = run(problem, x0, run_cfg);
        for (std::size_t k = 0; k < out.trace.size(); ++k) {
            const IterateRecord& r = out.trace[k];
            const double lhs = r.subproblem_value + 0.5 * r.mu * r.step_norm * r.step_norm;
            chain.max_violation = std::max(chain.max_violation, lhs - r.objective);
            if (k + 1 < out.trace.size())
                chain.max_violation = std::max(chain.max_violation,
                                               out.trace[k + 1].objective - r.subproblem_value);
            ++chain.samples;
        }
        close(chain);
        reports.push_back(chain);
    }

    // Value-gradient formula against finite differences, plus the ratio
    // ||gradient|| / ((1+mu)||x - p||), which stays bounded on compact boxes.
    {
        const int pts = std::max(1, std::min(n_samples, 20));
        reports.push_back(value_function_gradient_check(problem, x0, 1.0, cfg, pts, rng.next()));

        CheckReport ratio;
        ratio.name = "value-gradient-ratio";
        ratio.tolerance = 1e6;
        const double mu = 1.0;
        for (int s = 0; s < pts; ++s) {
            const Vector xs = x0 + 0.5 * gaussian_vector(rng, n);
            const SubproblemSolution sol = solve_subproblem(problem, xs, mu, cfg);
            const double dist = (xs - sol.p).norm();
            if (dist <= 1e-12) {
                ++ratio.skipped;  // at a fixed point the ratio is 0/0
                continue;
            }
            const Vector grad = value_function_gradient(problem, xs, mu, cfg);
            ratio.max_violation =
                std::max(ratio.max_violation, grad.norm() / ((1.0 + mu) * dist));
            ++ratio.samples;
        }
        close(ratio);
        reports.push_back(ratio);
    }

    // Smallest proximal weight certifying descent over a box around x0.
    {
        CheckReport bar;
        bar.name = "mu-threshold";
        bar.tolerance = 0.0;
        const Vector lower = (x0.array() - 0.5).matrix();
        const Vector upper = (x0.array() + 0.5).matrix();
        const std::vector<double> grid = {0.5, 1, 2, 4, 8, 16, 32, 64, 128, 256, 512};
        const int pts = std::max(0, std::min(n_samples, 15));
        const std::optional<double> found =
            mu_bar_probe(problem, lower, upper, grid, cfg, pts, rng.next());
        bar.samples = pts;
        bar.max_violation = found ? 0.0 : std::numeric_limits<double>::infinity();
        close(bar);
        reports.push_back(bar);
    }

    return reports;
}

}  // namespace cgn
