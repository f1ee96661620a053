#include "cgn/convex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace cgn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive_dim(int m, const char* who) {
    if (m <= 0)
        throw std::invalid_argument(std::string(who) + ": dimension must be positive");
}

void require_positive_step(double t) {
    if (!(t > 0.0)) throw std::invalid_argument("prox: step must be positive");
}

// Sum in index order. The simplex projection pins its output so that exactly
// this sum reproduces the radius, which is what makes re-projection a no-op.
double ordered_sum(const Vector& v) {
    double s = 0.0;
    for (int i = 0; i < v.size(); ++i) s += v[i];
    return s;
}

}  // namespace

namespace outer {

OuterConvex half_squared_l2(int m) {
    require_positive_dim(m, "half_squared_l2");
    OuterConvex g;
    g.dim = m;
    g.value = [](const Vector& z) { return 0.5 * z.squaredNorm(); };
    g.subgradient = [](const Vector& z) { return z; };
    g.prox = [](const Vector& z, double t) -> Vector {
        require_positive_step(t);
        return z / (1.0 + t);
    };
    return g;
}

OuterConvex l1_norm(int m) {
    require_positive_dim(m, "l1_norm");
    OuterConvex g;
    g.dim = m;
    g.value = [](const Vector& z) { return z.lpNorm<1>(); };
    g.subgradient = [](const Vector& z) {
        Vector s(z.size());
        for (int i = 0; i < z.size(); ++i)
            s[i] = z[i] > 0.0 ? 1.0 : (z[i] < 0.0 ? -1.0 : 0.0);
        return s;
    };
    g.prox = [](const Vector& z, double t) {
        require_positive_step(t);
        Vector p(z.size());
        for (int i = 0; i < z.size(); ++i) {
            const double slack = std::abs(z[i]) - t;
            p[i] = slack > 0.0 ? (z[i] > 0.0 ? slack : -slack) : 0.0;
        }
        return p;
    };
    return g;
}

OuterConvex l2_norm(int m) {
    require_positive_dim(m, "l2_norm");
    OuterConvex g;
    g.dim = m;
    g.value = [](const Vector& z) { return z.norm(); };
    g.subgradient = [](const Vector& z) -> Vector {
        const double n = z.norm();
        if (n == 0.0) return Vector::Zero(z.size());
        return z / n;
    };
    g.prox = [](const Vector& z, double t) -> Vector {
        require_positive_step(t);
        const double n = z.norm();
        if (n <= t) return Vector::Zero(z.size());
        return z * (1.0 - t / n);
    };
    return g;
}

OuterConvex linf_norm(int m) {
    require_positive_dim(m, "linf_norm");
    OuterConvex g;
    g.dim = m;
    g.value = [](const Vector& z) { return z.lpNorm<Eigen::Infinity>(); };
    g.subgradient = [](const Vector& z) -> Vector {
        Vector s = Vector::Zero(z.size());
        double best = 0.0;
        int arg = -1;
        for (int i = 0; i < z.size(); ++i) {
            const double a = std::abs(z[i]);
            if (a > best) {
                best = a;
                arg = i;
            }
        }
        if (arg >= 0) s[arg] = z[arg] > 0.0 ? 1.0 : -1.0;
        return s;
    };
    // prox_{t||.||_inf}(z) = z - P_{t B_1}(z), the Moreau decomposition with
    // the dual-norm ball.
    g.prox = [](const Vector& z, double t) -> Vector {
        require_positive_step(t);
        return z - project_l1_ball(z, t);
    };
    return g;
}

OuterConvex coordinate_max(int m) {
    require_positive_dim(m, "coordinate_max");
    OuterConvex g;
    g.dim = m;
    g.value = [](const Vector& z) { return z.maxCoeff(); };
    g.subgradient = [](const Vector& z) {
        Vector s = Vector::Zero(z.size());
        int arg = 0;
        for (int i = 1; i < z.size(); ++i)
            if (z[i] > z[arg]) arg = i;
        s[arg] = 1.0;
        return s;
    };
    // Conjugate of coordinate max is the unit-simplex indicator, so
    // prox_{t max}(z) = z - t P_simplex(z / t).
    g.prox = [](const Vector& z, double t) -> Vector {
        require_positive_step(t);
        return z - t * project_simplex(z / t, 1.0);
    };
    return g;
}

OuterConvex huber(int m, double delta) {
    require_positive_dim(m, "huber");
    if (!(delta > 0.0) || !std::isfinite(delta))
        throw std::invalid_argument("huber: delta must be positive and finite");
    OuterConvex g;
    g.dim = m;
    g.value = [delta](const Vector& z) {
        double v = 0.0;
        for (int i = 0; i < z.size(); ++i) {
            const double a = std::abs(z[i]);
            v += a <= delta ? 0.5 * a * a : delta * (a - 0.5 * delta);
        }
        return v;
    };
    g.subgradient = [delta](const Vector& z) {
        Vector s(z.size());
        for (int i = 0; i < z.size(); ++i) s[i] = std::clamp(z[i], -delta, delta);
        return s;
    };
    g.prox = [delta](const Vector& z, double t) {
        require_positive_step(t);
        // Quadratic region shrinks by 1/(1+t); linear region translates by
        // t*delta toward zero. The two branches agree at |s| = delta*(1+t).
        Vector p(z.size());
        for (int i = 0; i < z.size(); ++i) {
            const double s = z[i];
            if (std::abs(s) <= delta * (1.0 + t))
                p[i] = s / (1.0 + t);
            else
                p[i] = s > 0.0 ? s - t * delta : s + t * delta;
        }
        return p;
    };
    return g;
}

OuterConvex linear(Vector c) {
    if (c.size() == 0) throw std::invalid_argument("linear: empty cost vector");
    OuterConvex g;
    g.dim = static_cast<int>(c.size());
    g.value = [c](const Vector& z) { return c.dot(z); };
    g.subgradient = [c](const Vector&) { return c; };
    g.prox = [c](const Vector& z, double t) -> Vector {
        require_positive_step(t);
        return z - t * c;
    };
    return g;
}

}  // namespace outer

namespace sets {

FeasibleSet whole_space(int n) {
    require_positive_dim(n, "whole_space");
    FeasibleSet D;
    D.dim = n;
    D.project = [](const Vector& x) { return x; };
    D.contains = [](const Vector&, double) { return true; };
    return D;
}

FeasibleSet box(Vector lower, Vector upper) {
    if (lower.size() == 0 || lower.size() != upper.size())
        throw std::invalid_argument("box: bound vectors must be nonempty and equal-sized");
    for (int i = 0; i < lower.size(); ++i) {
        if (std::isnan(lower[i]) || std::isnan(upper[i]) || lower[i] > upper[i])
            throw std::invalid_argument("box: requires lower <= upper at every index");
    }
    FeasibleSet D;
    D.dim = static_cast<int>(lower.size());
    D.project = [lower, upper](const Vector& x) {
        Vector p(x.size());
        for (int i = 0; i < x.size(); ++i)
            p[i] = std::min(std::max(x[i], lower[i]), upper[i]);
        return p;
    };
    D.contains = [lower, upper](const Vector& x, double tol) {
        for (int i = 0; i < x.size(); ++i)
            if (x[i] < lower[i] - tol || x[i] > upper[i] + tol) return false;
        return true;
    };
    return D;
}

FeasibleSet euclidean_ball(Vector center, double radius) {
    if (center.size() == 0) throw std::invalid_argument("euclidean_ball: empty center");
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw std::invalid_argument("euclidean_ball: radius must be positive and finite");
    FeasibleSet D;
    D.dim = static_cast<int>(center.size());
    D.project = [center, radius](const Vector& x) -> Vector {
        const Vector d = x - center;
        const double n = d.norm();
        if (n <= radius) return x;
        Vector y = center + d * (radius / n);
        // Rounding can leave y a hair outside; contract until the computed
        // distance test passes, so projecting y again takes the early return.
        for (double shrink = 1e-16; (y - center).norm() > radius; shrink *= 2.0)
            y = center + d * ((radius / n) * (1.0 - shrink));
        return y;
    };
    D.contains = [center, radius](const Vector& x, double tol) {
        return (x - center).norm() <= radius + tol;
    };
    return D;
}

FeasibleSet simplex(int n, double radius) {
    require_positive_dim(n, "simplex");
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw std::invalid_argument("simplex: radius must be positive and finite");
    FeasibleSet D;
    D.dim = n;
    D.project = [radius](const Vector& x) { return project_simplex(x, radius); };
    D.contains = [radius](const Vector& x, double tol) {
        for (int i = 0; i < x.size(); ++i)
            if (x[i] < -tol) return false;
        return std::abs(ordered_sum(x) - radius) <= tol;
    };
    return D;
}

FeasibleSet halfspace(Vector a, double b) {
    if (a.size() == 0 || a.norm() == 0.0)
        throw std::invalid_argument("halfspace: normal must be nonzero");
    if (!std::isfinite(b)) throw std::invalid_argument("halfspace: offset must be finite");
    FeasibleSet D;
    D.dim = static_cast<int>(a.size());
    const double a2 = a.squaredNorm();
    D.project = [a, b, a2](const Vector& x) -> Vector {
        const double s = a.dot(x);
        if (s <= b) return x;
        const double t = (s - b) / a2;
        Vector y = x - a * t;
        // Same contraction idea as the ball: enlarge the step until the
        // computed constraint value clears b and re-projection is exact.
        for (double bump = t * 1e-16; a.dot(y) > b; bump *= 2.0)
            y = x - a * (t + bump);
        return y;
    };
    D.contains = [a, b](const Vector& x, double tol) { return a.dot(x) <= b + tol; };
    return D;
}

}  // namespace sets

Vector project_l1_ball(const Vector& z, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("project_l1_ball: radius must be positive");
    double norm1 = 0.0;
    for (int i = 0; i < z.size(); ++i) norm1 += std::abs(z[i]);
    if (norm1 <= radius) return z;
    const Vector w = project_simplex(z.cwiseAbs(), radius);
    Vector p(z.size());
    for (int i = 0; i < z.size(); ++i) p[i] = z[i] >= 0.0 ? w[i] : -w[i];
    return p;
}

Vector project_simplex(const Vector& z, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("project_simplex: radius must be positive");
    const int n = static_cast<int>(z.size());
    if (n == 0) throw std::invalid_argument("project_simplex: empty input");

    // Fast path: points already on the simplex (computed sum reproduces the
    // radius exactly) pass through untouched.
    bool nonneg = true;
    for (int i = 0; i < n && nonneg; ++i) nonneg = z[i] >= 0.0;
    if (nonneg && ordered_sum(z) == radius) return z;

    // Sort descending (stable, so equal values keep index order), find the
    // largest support size whose water level stays positive.
    std::vector<double> u(z.data(), z.data() + n);
    std::stable_sort(u.begin(), u.end(), std::greater<double>());
    double cumulative = 0.0;
    double theta = 0.0;
    int support = 0;
    for (int j = 0; j < n; ++j) {
        cumulative += u[j];
        const double level = (cumulative - radius) / (j + 1);
        if (u[j] - level > 0.0) {
            support = j + 1;
            theta = level;
        }
    }
    if (support == 0) {
        // All mass on the first coordinate; happens only for degenerate
        // inputs (e.g. -inf entries).
        Vector p = Vector::Zero(n);
        p[0] = radius;
        return p;
    }

    Vector p(n);
    int arg = 0;
    for (int i = 0; i < n; ++i) {
        p[i] = std::max(z[i] - theta, 0.0);
        if (p[i] > p[arg]) arg = i;
    }

    // Pin the largest entry so the index-order sum returns the radius
    // exactly. Newton-style corrections first, then single-ulp steps; the
    // computed sum is monotone in p[arg] and every entry is <= radius, so
    // ulp steps cannot jump across the target.
    for (int round = 0; round < 4096; ++round) {
        const double s = ordered_sum(p);
        if (s == radius) return p;
        const double d = radius - s;
        if (round < 8 && std::isfinite(d))
            p[arg] += d;
        else
            p[arg] = std::nextafter(p[arg], d > 0.0 ? kInf : -kInf);
        if (p[arg] < 0.0) p[arg] = 0.0;
    }
    return p;
}

}  // namespace cgn
