#pragma once

// Shared fixtures for the test suite: deterministic random sampling, a few
// tiny hand-checkable problem instances, and a brute-force minimizer used as
// an independent oracle for the closed-form and subproblem tests.

#include <cmath>
#include <functional>
#include <limits>
#include <utility>

#include "cgn/convex.hpp"
#include "cgn/problem.hpp"
#include "cgn/rng.hpp"

namespace testsupport {

using cgn::Matrix;
using cgn::Vector;

inline Vector gaussian_vector(cgn::SplitMix64& rng, int n) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = cgn::gaussian(rng);
    return v;
}

/// min over D of F(x) = ||x||^2/2 with F = identity. The proximal map and
/// value function have one-line closed forms, which makes this the main
/// cross-check instance.
inline cgn::CompositeProblem identity_ridge(int n) {
    cgn::SmoothMap F;
    F.input_dim = n;
    F.output_dim = n;
    F.value = [](const Vector& x) { return x; };
    F.jacobian = [n](const Vector&) { return Matrix(Matrix::Identity(n, n)); };
    F.hessian_vec = [n](const Vector&, const Vector&, const Vector&) {
        return Vector(Vector::Zero(n));
    };
    return cgn::CompositeProblem(std::move(F), cgn::outer::half_squared_l2(n),
                                 cgn::sets::whole_space(n));
}

/// Scalar objective x^4 written as g(F(x)) with linear g. The backtracking
/// ladder on this instance can be enumerated by hand.
inline cgn::CompositeProblem scalar_quartic() {
    cgn::SmoothMap F;
    F.input_dim = 1;
    F.output_dim = 1;
    F.value = [](const Vector& x) {
        Vector r(1);
        r << x[0] * x[0] * x[0] * x[0];
        return r;
    };
    F.jacobian = [](const Vector& x) {
        Matrix J(1, 1);
        J << 4.0 * x[0] * x[0] * x[0];
        return J;
    };
    F.hessian_vec = [](const Vector& x, const Vector& v, const Vector& d) {
        Vector h(1);
        h << 12.0 * x[0] * x[0] * v[0] * d[0];
        return h;
    };
    return cgn::CompositeProblem(std::move(F), cgn::outer::linear(Vector::Ones(1)),
                                 cgn::sets::whole_space(1));
}

/// |x|-composite with a smooth inner square: F(x) = x^2, g = l1 on R^1.
/// x = 0 is a critical point (0 lies in the subdifferential chain).
inline cgn::CompositeProblem abs_square() {
    cgn::SmoothMap F;
    F.input_dim = 1;
    F.output_dim = 1;
    F.value = [](const Vector& x) {
        Vector r(1);
        r << x[0] * x[0];
        return r;
    };
    F.jacobian = [](const Vector& x) {
        Matrix J(1, 1);
        J << 2.0 * x[0];
        return J;
    };
    F.hessian_vec = [](const Vector&, const Vector& v, const Vector& d) {
        Vector h(1);
        h << 2.0 * v[0] * d[0];
        return h;
    };
    return cgn::CompositeProblem(std::move(F), cgn::outer::l1_norm(1),
                                 cgn::sets::whole_space(1));
}

/// Brute-force minimization oracle for convex objectives in one or two
/// variables, used as an independent cross-check of the subproblem solver.
///
/// The building block is one-dimensional: for a convex f on [lo, hi] the
/// best point of any mesh lies at most one cell from the true minimizer
/// (f is nonincreasing to its left and nondecreasing to its right), so
/// repeatedly re-meshing the two cells around the best probe provably never
/// loses the minimizer. No such guarantee exists for full-grid refinement in
/// two dimensions once the objective has kinks: the mesh best can sit many
/// cells away along a nonsmooth valley, and a fixed-ratio window shrink then
/// drops the true minimizer. Two-dimensional problems are therefore solved
/// by axis decomposition: the inner variable is minimized exactly over the
/// feasible slice at each fixed outer value, and the outer function
/// t -> min_s phi(t, s) is again convex (partial minimization of a convex
/// function over a convex set), so the one-dimensional argument applies to
/// it too.
struct GridMinimum {
    Vector arg;
    double value = std::numeric_limits<double>::infinity();
};

/// Closed interval; hi < lo encodes the empty slice.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool empty() const { return hi < lo; }
};

/// Minimizes a convex f over [lo, hi] by iterated 41-point scans, shrinking
/// to the two cells around each round's best probe. 14 rounds shrink the
/// cell by 20^13, far below double rounding; the returned point is the best
/// probe ever evaluated. Infinite values (from empty slices) are tolerated
/// as long as some probe is finite.
inline std::pair<double, double> refine_interval(const std::function<double(double)>& f,
                                                 double lo, double hi, int rounds = 14) {
    constexpr int kSteps = 40;
    double best_t = std::numeric_limits<double>::quiet_NaN();
    double best_v = std::numeric_limits<double>::infinity();
    if (hi < lo) return {best_t, best_v};
    for (int round = 0; round < rounds; ++round) {
        if (!(hi > lo)) {
            const double v = f(lo);
            if (v < best_v) {
                best_v = v;
                best_t = lo;
            }
            break;
        }
        const double cell = (hi - lo) / kSteps;
        // The window update keys off this round's own argmin: for a convex
        // f the true minimizer lies within one cell of it, so the shrunk
        // window keeps bracketing the minimizer no matter what earlier
        // rounds saw. (Gating the shrink on beating the global best is a
        // trap: when the carried winner misses the new mesh by an ulp, a
        // round near a flat minimum can fail to improve strictly and the
        // refinement would stall several digits short.) The global best
        // across all rounds is what gets returned.
        int round_i = 0;
        double round_v = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= kSteps; ++i) {
            const double t = lo + cell * i;
            const double v = f(t);
            if (v < round_v) {
                round_v = v;
                round_i = i;
                if (v < best_v) {
                    best_v = v;
                    best_t = t;
                }
            }
        }
        const double new_lo = lo + cell * std::max(0, round_i - 1);
        const double new_hi = lo + cell * std::min(kSteps, round_i + 1);
        lo = new_lo;
        hi = new_hi;
    }
    return {best_t, best_v};
}

/// One-variable convex minimization over an interval.
inline GridMinimum refine_line(const std::function<double(const Vector&)>& objective,
                               Interval domain, int rounds = 14) {
    const auto [t, v] = refine_interval(
        [&](double s) {
            Vector y(1);
            y << s;
            return objective(y);
        },
        domain.lo, domain.hi, rounds);
    GridMinimum out;
    out.arg = Vector(1);
    out.arg << t;
    out.value = v;
    return out;
}

/// Two-variable convex minimization over {(t, s) : t in outer, s in
/// section(t)}, where section(t) is the feasible second-coordinate slice
/// (convex sets have interval slices). Runs the one-dimensional refinement
/// on the inner variable at every outer probe, then on the outer variable.
inline GridMinimum refine_plane(const std::function<double(const Vector&)>& objective,
                                Interval outer,
                                const std::function<Interval(double)>& section,
                                int rounds = 14) {
    const auto inner = [&](double t) {
        const Interval s = section(t);
        return refine_interval(
            [&](double u) {
                Vector y(2);
                y << t, u;
                return objective(y);
            },
            s.lo, s.hi, rounds);
    };
    const auto [t_star, v_outer] =
        refine_interval([&](double t) { return inner(t).second; }, outer.lo, outer.hi, rounds);
    const auto [s_star, value] = inner(t_star);
    GridMinimum out;
    out.arg = Vector(2);
    out.arg << t_star, s_star;
    out.value = std::min(value, v_outer);
    return out;
}

}  // namespace testsupport
