#pragma once

#include "cgn/problem.hpp"

namespace cgn {

/// Builtin outer convex functions. Every instance satisfies the OuterConvex
/// contract: convexity, one deterministic subgradient, exact prox.
/// Subgradient tie-breaks: sign(0) = 0 for separable norms; first attaining
/// index for max-type functions.
namespace outer {

/// g(z) = ||z||^2 / 2.
OuterConvex half_squared_l2(int m);

/// g(z) = sum_i |z_i|. Prox is coordinatewise soft-thresholding.
OuterConvex l1_norm(int m);

/// g(z) = ||z||_2. Prox is block soft-thresholding.
OuterConvex l2_norm(int m);

/// g(z) = max_i |z_i|. Prox via Moreau and projection onto the l1 ball.
OuterConvex linf_norm(int m);

/// g(z) = max_i z_i. Prox via Moreau and projection onto the unit simplex.
OuterConvex coordinate_max(int m);

/// g(z) = sum_i H_delta(z_i) with the Huber kernel, delta > 0 (default 1).
OuterConvex huber(int m, double delta = 1.0);

/// g(z) = <c, z>.
OuterConvex linear(Vector c);

}  // namespace outer

/// Builtin closed convex sets. Projections are exact closed forms except the
/// simplex, which uses the exact finite sorting algorithm. All projections
/// are bitwise idempotent: projecting an already-projected point returns it
/// unchanged.
namespace sets {

FeasibleSet whole_space(int n);

/// Box {lower <= x <= upper}; entries may be +-infinity, only finite sides
/// clamp.
FeasibleSet box(Vector lower, Vector upper);

FeasibleSet euclidean_ball(Vector center, double radius);

/// {x >= 0, sum_i x_i = radius}, radius > 0.
FeasibleSet simplex(int n, double radius = 1.0);

/// {x : <a, x> <= b}, a != 0.
FeasibleSet halfspace(Vector a, double b);

}  // namespace sets

/// Projection onto {w : ||w||_1 <= radius}. Exposed because it is the prox
/// engine for the linf norm and the conjugate-pair checks.
Vector project_l1_ball(const Vector& z, double radius);

/// Projection onto {w >= 0, sum w = radius} by the sorting algorithm; ties
/// broken by index.
Vector project_simplex(const Vector& z, double radius);

}  // namespace cgn
