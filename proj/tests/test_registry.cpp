#include <set>
#include <stdexcept>
#include <string>

#include "doctest.h"

#include "cgn/registry.hpp"
#include "cgn/rng.hpp"
#include "test_support.hpp"

using cgn::Vector;

TEST_CASE("registry carries the documented entries in listing order") {
    const auto& entries = cgn::problem_registry();
    REQUIRE(entries.size() == 6);
    CHECK(entries[0].name == "rosenbrock-ls");
    CHECK(entries[1].name == "l1-exp-fit");
    CHECK(entries[2].name == "minimax-quad");
    CHECK(entries[3].name == "box-quartic");
    CHECK(entries[4].name == "ball-constrained-ls");
    CHECK(entries[5].name == "linear-unbounded");
    for (const auto& e : entries) {
        CAPTURE(e.name);
        CHECK(!e.notes.empty());
        CHECK(static_cast<bool>(e.build));
    }
}

TEST_CASE("lookup by name") {
    CHECK(cgn::find_problem("rosenbrock-ls") != nullptr);
    CHECK(cgn::find_problem("nope") == nullptr);
    CHECK(cgn::find_problem("") == nullptr);
}

TEST_CASE("every entry builds a well-formed instance") {
    for (const auto& e : cgn::problem_registry()) {
        CAPTURE(e.name);
        auto built = e.build({});
        const auto& prob = built.problem;
        CHECK(built.x0.size() == prob.input_dim());
        CHECK(prob.feasible_set().contains(built.x0, 1e-10));
        CHECK(std::isfinite(prob.objective(built.x0)));
        // Jacobian shape and a finite-difference spot check on one column.
        auto J = prob.smooth_map().jacobian(built.x0);
        CHECK(J.rows() == prob.output_dim());
        CHECK(J.cols() == prob.input_dim());
        const double h = 1e-6 * (1.0 + built.x0.norm());
        Vector xp = built.x0, xm = built.x0;
        xp[0] += h;
        xm[0] -= h;
        Vector col = (prob.smooth_map().value(xp) - prob.smooth_map().value(xm)) / (2.0 * h);
        CHECK((col - J.col(0)).norm() / (1.0 + col.norm()) <= 1e-5);
    }
}

TEST_CASE("builders are deterministic") {
    // Synthetic datasets come from fixed seeds, so rebuilding must reproduce
    // identical oracles, bit for bit.
    for (const auto& e : cgn::problem_registry()) {
        CAPTURE(e.name);
        auto a = e.build({});
        auto b = e.build({});
        CHECK((a.x0 - b.x0).norm() == 0.0);
        CHECK(a.problem.objective(a.x0) == b.problem.objective(a.x0));
        auto Ja = a.problem.smooth_map().jacobian(a.x0);
        auto Jb = b.problem.smooth_map().jacobian(a.x0);
        CHECK((Ja - Jb).norm() == 0.0);
    }
}

TEST_CASE("unknown parameters fail loudly") {
    for (const auto& e : cgn::problem_registry()) {
        CAPTURE(e.name);
        CHECK_THROWS_AS(e.build({{"bogus", 1.0}}), std::invalid_argument);
    }
}

TEST_CASE("box-quartic honors its dimension parameter") {
    const auto* e = cgn::find_problem("box-quartic");
    REQUIRE(e != nullptr);
    CHECK(e->build({}).problem.input_dim() == 4);
    CHECK(e->build({{"n", 9.0}}).problem.input_dim() == 9);
    CHECK_THROWS_AS(e->build({{"n", 0.0}}), std::invalid_argument);
    CHECK_THROWS_AS(e->build({{"n", 2.5}}), std::invalid_argument);
    CHECK_THROWS_AS(e->build({{"n", 1000.0}}), std::invalid_argument);
}

TEST_CASE("known optima check out against the objective") {
    const auto* rb = cgn::find_problem("rosenbrock-ls");
    REQUIRE(rb->known_optimum.has_value());
    auto built = rb->build({});
    CHECK(rb->known_optimum->x[0] == 1.0);
    CHECK(rb->known_optimum->x[1] == 1.0);
    CHECK(built.problem.objective(rb->known_optimum->x) ==
          doctest::Approx(rb->known_optimum->value).epsilon(1e-12));

    for (const auto& e : cgn::problem_registry()) {
        if (!e.known_optimum.has_value()) continue;
        CAPTURE(e.name);
        auto b = e.build({});
        CHECK(b.problem.feasible_set().contains(e.known_optimum->x, 1e-10));
        CHECK(b.problem.objective(e.known_optimum->x) <=
              e.known_optimum->value + 1e-10);
    }
}

TEST_CASE("fixture-specific configuration is wired in") {
    const auto* unbounded = cgn::find_problem("linear-unbounded");
    CHECK(unbounded->default_config.divergence_norm_bound == 100.0);
    // Everything else runs at stock settings.
    const auto* rb = cgn::find_problem("rosenbrock-ls");
    cgn::SolverConfig stock;
    CHECK(rb->default_config.mu0 == stock.mu0);
    CHECK(rb->default_config.tau == stock.tau);
    CHECK(rb->default_config.step_tolerance == stock.step_tolerance);
}
