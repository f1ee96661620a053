#include <cmath>
#include <cstring>
#include <stdexcept>

#include "doctest.h"

#include "cgn/convex.hpp"
#include "cgn/registry.hpp"
#include "cgn/rng.hpp"
#include "cgn/solver.hpp"
#include "test_support.hpp"

using cgn::RunStatus;
using cgn::SolverConfig;
using cgn::Vector;
using testsupport::gaussian_vector;

TEST_CASE("quartic ladder accepts exactly where the hand enumeration says") {
    // Objective x^4 at x = 1: the candidate at weight mu is 1 - 4/mu and the
    // decrease test compares (1 - 4/mu)^4 against 1 - 8/mu. Walking the
    // ladder 1, 2, 4, 8 fails each time (81 > -7, 1 > -3, 0 > -1,
    // 0.0625 > 0) and 16 accepts (0.3164... <= 0.5).
    auto prob = testsupport::scalar_quartic();
    SolverConfig config;
    config.inner.tolerance = 1e-13;
    Vector x0(1);
    x0 << 1;
    auto step = cgn::backtracking_step(prob, x0, config);
    CHECK(step.mu_accepted == 16.0);
    CHECK(step.backtracks == 4);
    CHECK(std::abs(step.x_next[0] - 0.75) <= 1e-12);
}

TEST_CASE("affine maps accept without backtracking") {
    // Exact linearization means the decrease test holds at any weight.
    cgn::SmoothMap F;
    F.input_dim = 2;
    F.output_dim = 2;
    F.value = [](const Vector& x) { return x; };
    F.jacobian = [](const Vector&) { return cgn::Matrix(cgn::Matrix::Identity(2, 2)); };
    cgn::CompositeProblem prob(std::move(F), cgn::outer::l1_norm(2), cgn::sets::whole_space(2));

    cgn::SplitMix64 rng(3);
    for (double mu0 : {0.05, 1.0, 30.0}) {
        SolverConfig config;
        config.mu0 = mu0;
        Vector x = 2.0 * gaussian_vector(rng, 2);
        auto step = cgn::backtracking_step(prob, x, config);
        CHECK(step.backtracks == 0);
        CHECK(step.mu_accepted == mu0);
    }
}

TEST_CASE("critical points do not move") {
    auto prob = testsupport::abs_square();
    SolverConfig config;
    Vector zero = Vector::Zero(1);
    auto step = cgn::backtracking_step(prob, zero, config);
    CHECK(step.backtracks == 0);
    CHECK(std::abs(step.x_next[0]) <= 1e-10);
    CHECK(step.step_norm <= 1e-10);
}

TEST_CASE("ridge run follows the halving recursion") {
    // F = identity with the squared norm halves the iterate every step:
    // the candidate at weight 1 is x/2 and the decrease test accepts it.
    auto prob = testsupport::identity_ridge(2);
    SolverConfig config;
    Vector x0(2);
    x0 << 1, 1;
    auto out = cgn::run(prob, x0, config);
    CHECK(out.status == RunStatus::converged_critical);
    double expected = 1.0;
    for (const auto& rec : out.trace) {
        CHECK(rec.mu == 1.0);  // never backtracks
        CHECK(rec.backtracks == 0);
        CHECK(rec.x[0] == doctest::Approx(expected).epsilon(1e-8));
        CHECK(rec.objective == doctest::Approx(expected * expected).epsilon(1e-8));
        expected /= 2.0;
    }
    CHECK(out.final_x.norm() <= 1e-7);
}

TEST_CASE("rosenbrock run converges to the known optimum") {
    auto built = cgn::find_problem("rosenbrock-ls")->build({});
    auto out = cgn::run(built.problem, built.x0, cgn::SolverConfig{});
    CHECK(out.status == RunStatus::converged_critical);
    CHECK(out.trace.size() < 500);
    Vector opt(2);
    opt << 1, 1;
    CHECK((out.final_x - opt).norm() <= 1e-5);
    CHECK(out.final_objective <= 1e-12);
    CHECK(out.final_criticality <= 1e-6);
}

TEST_CASE("unbounded descent trips the divergence guard") {
    auto entry = cgn::find_problem("linear-unbounded");
    auto built = entry->build({});
    auto out = cgn::run(built.problem, built.x0, entry->default_config);
    CHECK(out.status == RunStatus::diverging_norm);
    CHECK(out.trace.size() <= 200);
    CHECK(out.final_x.norm() >= entry->default_config.divergence_norm_bound);
}

TEST_CASE("outer budget reports honestly") {
    auto built = cgn::find_problem("rosenbrock-ls")->build({});
    SolverConfig config;
    config.max_outer_iterations = 3;
    auto out = cgn::run(built.problem, built.x0, config);
    CHECK(out.status == RunStatus::outer_budget_exhausted);
    CHECK(out.trace.size() == 3);
}

TEST_CASE("backtracking budget surfaces as a status") {
    auto prob = testsupport::scalar_quartic();
    SolverConfig config;
    config.max_backtracks_per_iteration = 2;  // the quartic start needs 4
    Vector x0(1);
    x0 << 1;
    auto out = cgn::run(prob, x0, config);
    CHECK(out.status == RunStatus::backtrack_budget_exhausted);
    CHECK_THROWS_AS(cgn::backtracking_step(prob, x0, config), cgn::BacktrackBudgetError);
}

TEST_CASE("starved inner solver surfaces as a status") {
    auto built = cgn::find_problem("rosenbrock-ls")->build({});
    SolverConfig config;
    config.inner.tolerance = 1e-15;
    config.inner.max_inner_iterations = 5;
    auto out = cgn::run(built.problem, built.x0, config);
    CHECK(out.status == RunStatus::inner_failure);
}

TEST_CASE("accepted iterations chain the certified model values") {
    // Two-sided per-iteration bracket: the certified model value plus the
    // quadratic never exceeds the objective, and the next objective never
    // exceeds the certified model value.
    for (const char* name : {"rosenbrock-ls", "ball-constrained-ls", "minimax-quad"}) {
        CAPTURE(name);
        auto built = cgn::find_problem(name)->build({});
        auto out = cgn::run(built.problem, built.x0, cgn::SolverConfig{});
        REQUIRE(!out.trace.empty());
        for (size_t k = 0; k < out.trace.size(); ++k) {
            const auto& rec = out.trace[k];
            double quad = 0.5 * rec.mu * rec.step_norm * rec.step_norm;
            CHECK(rec.subproblem_value + quad <= rec.objective + 1e-7);
            double next_objective =
                k + 1 < out.trace.size() ? out.trace[k + 1].objective : out.final_objective;
            CHECK(next_objective <= rec.subproblem_value + 1e-7);
        }
    }
}

TEST_CASE("objective column never increases") {
    for (const auto& entry : cgn::problem_registry()) {
        auto built = entry.build({});
        auto out = cgn::run(built.problem, built.x0, entry.default_config);
        for (size_t k = 0; k + 1 < out.trace.size(); ++k)
            CHECK(out.trace[k + 1].objective <= out.trace[k].objective + 1e-9);
        if (!out.trace.empty()) CHECK(out.final_objective <= out.trace.back().objective + 1e-9);
    }
}

TEST_CASE("iterates stay feasible throughout") {
    for (const char* name : {"ball-constrained-ls", "l1-exp-fit", "box-quartic"}) {
        CAPTURE(name);
        auto built = cgn::find_problem(name)->build({});
        auto out = cgn::run(built.problem, built.x0, cgn::SolverConfig{});
        for (const auto& rec : out.trace)
            CHECK(built.problem.feasible_set().contains(rec.x, 1e-10));
        CHECK(built.problem.feasible_set().contains(out.final_x, 1e-10));
    }
}

TEST_CASE("accepted weights stabilize on converged runs") {
    for (const auto& entry : cgn::problem_registry()) {
        auto built = entry.build({});
        auto out = cgn::run(built.problem, built.x0, entry.default_config);
        if (out.status != RunStatus::converged_critical || out.trace.size() < 10) continue;
        CAPTURE(entry.name);
        double tail_mu = out.trace.back().mu;
        for (size_t k = out.trace.size() - 10; k < out.trace.size(); ++k)
            CHECK(out.trace[k].mu == tail_mu);
    }
}

TEST_CASE("step norms accumulate and taper off") {
    auto built = cgn::find_problem("rosenbrock-ls")->build({});
    auto out = cgn::run(built.problem, built.x0, cgn::SolverConfig{});
    REQUIRE(out.status == RunStatus::converged_critical);
    double sum = 0.0;
    for (const auto& rec : out.trace) {
        sum += rec.step_norm;
        CHECK(rec.cumulative_step == doctest::Approx(sum).epsilon(1e-12));
        CHECK(rec.criticality == rec.step_norm);  // same quantity by construction
    }
    // The tail half of a converging run travels less than the head half.
    size_t half = out.trace.size() / 2;
    double head = 0.0, tail = 0.0;
    for (size_t k = 0; k < out.trace.size(); ++k)
        (k < half ? head : tail) += out.trace[k].step_norm;
    CHECK(tail <= head);
}

TEST_CASE("infeasible starts are projected and flagged") {
    auto built = cgn::find_problem("ball-constrained-ls")->build({});
    Vector outside = Vector::Constant(built.problem.input_dim(), 50.0);
    auto out = cgn::run(built.problem, outside, cgn::SolverConfig{});
    CHECK(out.projected_x0);
    REQUIRE(!out.trace.empty());
    CHECK(built.problem.feasible_set().contains(out.trace.front().x, 1e-10));

    // The run must coincide with one started at the projected point.
    Vector projected = built.problem.feasible_set().project(outside);
    auto direct = cgn::run(built.problem, projected, cgn::SolverConfig{});
    CHECK(!direct.projected_x0);
    REQUIRE(direct.trace.size() == out.trace.size());
    CHECK((direct.final_x - out.final_x).norm() == 0.0);
}

TEST_CASE("stationary starts stop after one record") {
    auto prob = testsupport::abs_square();
    auto out = cgn::run(prob, Vector::Zero(1), cgn::SolverConfig{});
    CHECK(out.status == RunStatus::converged_critical);
    CHECK(out.trace.size() == 1);
    CHECK(out.final_criticality <= 1e-8);
}

TEST_CASE("keeping the previous weight skips ladder work") {
    // With the per-iteration reset disabled, later iterations start the
    // ladder one rung below the last accepted weight instead of at mu0.
    auto prob = testsupport::scalar_quartic();
    SolverConfig config;
    config.reset_mu_each_iteration = false;
    config.inner.tolerance = 1e-13;
    Vector x0(1);
    x0 << 1;
    auto out = cgn::run(prob, x0, config);
    REQUIRE(out.trace.size() >= 2);
    CHECK(out.trace[0].mu == 16.0);
    CHECK(out.trace[0].backtracks == 4);
    CHECK(out.trace[1].backtracks <= 1);  // resumes near 8 instead of at 1
    // Decrease holds at every iteration regardless of the schedule.
    for (size_t k = 0; k + 1 < out.trace.size(); ++k)
        CHECK(out.trace[k + 1].objective <= out.trace[k].objective + 1e-9);
}

TEST_CASE("configuration invariants are enforced") {
    auto prob = testsupport::identity_ridge(1);
    Vector x0 = Vector::Ones(1);
    SolverConfig config;

    config.mu0 = 0.0;
    CHECK_THROWS_AS(cgn::run(prob, x0, config), std::invalid_argument);
    config = SolverConfig{};
    config.tau = 1.0;
    CHECK_THROWS_AS(cgn::run(prob, x0, config), std::invalid_argument);
    config = SolverConfig{};
    config.step_tolerance = -1.0;
    CHECK_THROWS_AS(cgn::run(prob, x0, config), std::invalid_argument);
    config = SolverConfig{};
    CHECK_THROWS_AS(cgn::run(prob, Vector::Zero(4), config), std::invalid_argument);
}

TEST_CASE("status names match the trace vocabulary") {
    CHECK(std::strcmp(cgn::to_string(RunStatus::converged_critical), "converged-critical") == 0);
    CHECK(std::strcmp(cgn::to_string(RunStatus::diverging_norm), "diverging-norm") == 0);
    CHECK(std::strcmp(cgn::to_string(RunStatus::outer_budget_exhausted),
                      "outer-budget-exhausted") == 0);
    CHECK(std::strcmp(cgn::to_string(RunStatus::backtrack_budget_exhausted),
                      "backtrack-budget-exhausted") == 0);
    CHECK(std::strcmp(cgn::to_string(RunStatus::inner_failure), "inner-failure") == 0);
}
