#include "cgn/registry.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "cgn/convex.hpp"
#include "cgn/rng.hpp"

namespace cgn {

namespace {

void expect_keys(const ProblemParams& params, std::initializer_list<const char*> allowed,
                 const char* who) {
    for (const auto& [key, value] : params) {
        (void)value;
        bool known = false;
        for (const char* name : allowed)
            if (key == name) {
                known = true;
                break;
            }
        if (!known)
            throw std::invalid_argument(std::string(who) + ": unknown parameter '" + key + "'");
    }
}

BuiltProblem build_rosenbrock(const ProblemParams& params) {
    expect_keys(params, {}, "rosenbrock-ls");
    SmoothMap F;
    F.input_dim = 2;
    F.output_dim = 2;
    F.value = [](const Vector& x) {
        Vector r(2);
        r << 1.0 - x[0], 10.0 * (x[1] - x[0] * x[0]);
        return r;
    };
    F.jacobian = [](const Vector& x) {
        Matrix J(2, 2);
        J << -1.0, 0.0, -20.0 * x[0], 10.0;
        return J;
    };
    // Only the second residual is curved: its hessian is -20 on the (0,0)
    // entry and zero elsewhere.
    F.hessian_vec = [](const Vector&, const Vector& v, const Vector& d) {
        Vector h(2);
        h << -20.0 * v[1] * d[0], 0.0;
        return h;
    };
    Vector x0(2);
    x0 << -1.2, 1.0;
    return {CompositeProblem(std::move(F), outer::half_squared_l2(2), sets::whole_space(2)),
            std::move(x0)};
}

BuiltProblem build_l1_exp_fit(const ProblemParams& params) {
    expect_keys(params, {}, "l1-exp-fit");
    static constexpr int m = 25;
    Vector t(m), y(m);
    SplitMix64 rng(0x1f2e3d4cULL);
    for (int i = 0; i < m; ++i) {
        t[i] = 2.0 * i / (m - 1);
        y[i] = 2.0 * std::exp(-1.3 * t[i]) + 0.01 * gaussian(rng);
    }
    y[6] += 1.5;   // gross outliers the l1 loss should shrug off
    y[17] -= 2.0;

    SmoothMap F;
    F.input_dim = 2;
    F.output_dim = m;
    F.value = [t, y](const Vector& theta) {
        Vector r(m);
        for (int i = 0; i < m; ++i) r[i] = theta[0] * std::exp(theta[1] * t[i]) - y[i];
        return r;
    };
    F.jacobian = [t](const Vector& theta) {
        Matrix J(m, 2);
        for (int i = 0; i < m; ++i) {
            const double e = std::exp(theta[1] * t[i]);
            J(i, 0) = e;
            J(i, 1) = theta[0] * t[i] * e;
        }
        return J;
    };
    F.hessian_vec = [t](const Vector& theta, const Vector& v, const Vector& d) {
        Vector h = Vector::Zero(2);
        for (int i = 0; i < m; ++i) {
            const double e = std::exp(theta[1] * t[i]);
            h[0] += v[i] * e * t[i] * d[1];
            h[1] += v[i] * e * (t[i] * d[0] + theta[0] * t[i] * t[i] * d[1]);
        }
        return h;
    };

    Vector lower(2), upper(2), x0(2);
    lower << 0.0, -3.0;
    upper << 5.0, 1.0;
    x0 << 1.0, 0.0;
    return {CompositeProblem(std::move(F), outer::l1_norm(m),
                             sets::box(std::move(lower), std::move(upper))),
            std::move(x0)};
}

BuiltProblem build_minimax_quad(const ProblemParams& params) {
    expect_keys(params, {}, "minimax-quad");
    static constexpr int n = 3;
    static constexpr int m = 4;
    SplitMix64 rng(0x3a3a5c5cULL);
    std::vector<Matrix> A;
    std::vector<Vector> b;
    Vector c(m);
    for (int i = 0; i < m; ++i) {
        Matrix B(n, n);
        for (int r = 0; r < n; ++r)
            for (int s = 0; s < n; ++s) B(r, s) = rng.uniform(-1.0, 1.0);
        A.push_back(Matrix(B.transpose() * B / 3.0 + 0.3 * Matrix::Identity(n, n)));
        Vector bi(n);
        for (int r = 0; r < n; ++r) bi[r] = rng.uniform(-1.0, 1.0);
        b.push_back(std::move(bi));
        c[i] = rng.uniform(-1.0, 1.0);
    }

    SmoothMap F;
    F.input_dim = n;
    F.output_dim = m;
    F.value = [A, b, c](const Vector& x) {
        Vector z(m);
        for (int i = 0; i < m; ++i) z[i] = 0.5 * x.dot(A[i] * x) + b[i].dot(x) + c[i];
        return z;
    };
    F.jacobian = [A, b](const Vector& x) {
        Matrix J(m, n);
        for (int i = 0; i < m; ++i) J.row(i) = (A[i] * x + b[i]).transpose();
        return J;
    };
    F.hessian_vec = [A](const Vector&, const Vector& v, const Vector& d) {
        Vector h = Vector::Zero(n);
        for (int i = 0; i < m; ++i) h += v[i] * (A[i] * d);
        return h;
    };

    Vector x0(n);
    x0 << 1.0, 0.0, -1.0;
    return {CompositeProblem(std::move(F), outer::coordinate_max(m), sets::whole_space(n)),
            std::move(x0)};
}

BuiltProblem build_box_quartic(const ProblemParams& params) {
    expect_keys(params, {"n"}, "box-quartic");
    int n = 4;
    if (const auto it = params.find("n"); it != params.end()) {
        if (it->second < 1.0 || it->second > 64.0 || it->second != std::floor(it->second))
            throw std::invalid_argument("box-quartic: n must be an integer in [1, 64]");
        n = static_cast<int>(it->second);
    }

    SmoothMap F;
    F.input_dim = n;
    F.output_dim = n;
    F.value = [](const Vector& x) { return Vector(x.array().pow(4)); };
    F.jacobian = [n](const Vector& x) {
        Matrix J = Matrix::Zero(n, n);
        for (int i = 0; i < n; ++i) J(i, i) = 4.0 * x[i] * x[i] * x[i];
        return J;
    };
    F.hessian_vec = [n](const Vector& x, const Vector& v, const Vector& d) {
        Vector h(n);
        for (int i = 0; i < n; ++i) h[i] = 12.0 * v[i] * x[i] * x[i] * d[i];
        return h;
    };

    return {CompositeProblem(std::move(F), outer::linear(Vector::Ones(n)),
                             sets::box(Vector::Constant(n, -1.0), Vector::Constant(n, 2.0))),
            Vector(Vector::Constant(n, 1.5))};
}

BuiltProblem build_ball_ls(const ProblemParams& params) {
    expect_keys(params, {}, "ball-constrained-ls");
    static constexpr int rows = 5;
    static constexpr int cols = 3;
    SplitMix64 rng(0xba11ba11ULL);
    Matrix A(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int s = 0; s < cols; ++s) A(r, s) = rng.uniform(-1.0, 1.0);
    Vector pull(cols);
    pull << 1.2, -0.5, 0.8;  // outside the unit ball, so the constraint binds
    const Vector y = A * pull;

    SmoothMap F;
    F.input_dim = cols;
    F.output_dim = rows;
    F.value = [A, y](const Vector& x) { return Vector(A * x - y); };
    F.jacobian = [A](const Vector&) { return A; };
    F.hessian_vec = [](const Vector&, const Vector&, const Vector&) {
        return Vector(Vector::Zero(cols));
    };

    Vector x0(cols);
    x0 << 0.9, 0.0, 0.0;
    return {CompositeProblem(std::move(F), outer::half_squared_l2(rows),
                             sets::euclidean_ball(Vector::Zero(cols), 1.0)),
            std::move(x0)};
}

BuiltProblem build_linear_unbounded(const ProblemParams& params) {
    expect_keys(params, {}, "linear-unbounded");
    SmoothMap F;
    F.input_dim = 1;
    F.output_dim = 1;
    F.value = [](const Vector& x) { return x; };
    F.jacobian = [](const Vector&) { return Matrix(Matrix::Identity(1, 1)); };
    F.hessian_vec = [](const Vector&, const Vector&, const Vector&) {
        return Vector(Vector::Zero(1));
    };
    return {CompositeProblem(std::move(F), outer::linear(Vector::Ones(1)), sets::whole_space(1)),
            Vector(Vector::Zero(1))};
}

std::vector<RegistryEntry> make_registry() {
    std::vector<RegistryEntry> entries;

    {
        RegistryEntry e;
        e.name = "rosenbrock-ls";
        e.notes = "half-squared norm of the two Rosenbrock residuals, unconstrained; the "
                  "classic curved-valley test with optimum (1, 1) and value 0";
        e.build = build_rosenbrock;
        Vector opt(2);
        opt << 1.0, 1.0;
        e.known_optimum = KnownOptimum{std::move(opt), 0.0};
        entries.push_back(std::move(e));
    }
    {
        RegistryEntry e;
        e.name = "l1-exp-fit";
        e.notes = "robust l1 fit of a*exp(b*t) to 25 synthetic points on [0, 2] "
                  "(splitmix64 seed 0x1f2e3d4c, 1% gaussian noise, gross outliers at "
                  "indices 6 and 17), parameters boxed to [0,5]x[-3,1]";
        e.build = build_l1_exp_fit;
        entries.push_back(std::move(e));
    }
    {
        RegistryEntry e;
        e.name = "minimax-quad";
        e.notes = "pointwise maximum of four random convex quadratics on R^3 "
                  "(splitmix64 seed 0x3a3a5c5c); nonsmooth wherever two quadratics tie";
        e.build = build_minimax_quad;
        entries.push_back(std::move(e));
    }
    {
        RegistryEntry e;
        e.name = "box-quartic";
        e.notes = "sum of fourth powers over the box [-1,2]^n (parameter n, default 4); "
                  "the flat quartic bowl makes late steps shrink slowly";
        e.build = build_box_quartic;
        e.known_optimum = KnownOptimum{Vector::Zero(4), 0.0};
        entries.push_back(std::move(e));
    }
    {
        RegistryEntry e;
        e.name = "ball-constrained-ls";
        e.notes = "affine least squares with the unconstrained solution placed outside the "
                  "unit ball (splitmix64 seed 0xba11ba11), so the constraint is active at "
                  "the optimum";
        e.build = build_ball_ls;
        entries.push_back(std::move(e));
    }
    {
        RegistryEntry e;
        e.name = "linear-unbounded";
        e.notes = "scalar identity under a linear loss: unbounded below, iterates march to "
                  "-infinity; divergence fixture with the norm bound lowered to 100 so runs "
                  "finish quickly";
        e.build = build_linear_unbounded;
        e.default_config.divergence_norm_bound = 100.0;
        entries.push_back(std::move(e));
    }

    return entries;
}

}  // namespace

const std::vector<RegistryEntry>& problem_registry() {
    static const std::vector<RegistryEntry> registry = make_registry();
    return registry;
}

const RegistryEntry* find_problem(const std::string& name) {
    for (const RegistryEntry& entry : problem_registry())
        if (entry.name == name) return &entry;
    return nullptr;
}

}  // namespace cgn
