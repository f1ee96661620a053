// Command-line front end: `list` prints the registry, `solve` runs the outer
// loop and writes a trace, `check` runs the certification suite and writes a
// report. Exit codes: 0 success / converged, 1 usage or I/O error, 2
// divergence detected, 3 a budget ran out, 4 certification failed.

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cgn/diagnostics.hpp"
#include "cgn/registry.hpp"
#include "cgn/solver.hpp"
#include "cgn/trace.hpp"

namespace {

struct SolveOptions {
    std::string problem;
    cgn::ProblemParams params;
    std::optional<double> mu0;
    std::optional<double> tau;
    std::optional<double> tol;
    std::optional<int> max_iter;
    std::optional<double> inner_tolerance;
    std::optional<int> inner_max_iterations;
    std::optional<double> divergence_norm_bound;
    std::optional<int> max_backtracks;
    std::optional<bool> reset_mu;
    std::string trace_path;  // empty: stdout
    std::uint64_t seed = 0;
    bool no_timestamp = false;
};

bool load_spec_file(const std::string& path, SolveOptions& opt, std::string& error) {
    std::ifstream in(path);
    if (!in) {
        error = "cannot open spec file '" + path + "'";
        return false;
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        error = std::string("spec file is not valid JSON: ") + e.what();
        return false;
    }
    if (!j.is_object()) {
        error = "spec file must hold a JSON object";
        return false;
    }
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "problem") {
                opt.problem = value.get<std::string>();
            } else if (key == "params") {
                for (const auto& [name, v] : value.items())
                    opt.params[name] = v.get<double>();
            } else if (key == "mu0") {
                opt.mu0 = value.get<double>();
            } else if (key == "tau") {
                opt.tau = value.get<double>();
            } else if (key == "tol") {
                opt.tol = value.get<double>();
            } else if (key == "max_iter") {
                opt.max_iter = value.get<int>();
            } else if (key == "inner_tolerance") {
                opt.inner_tolerance = value.get<double>();
            } else if (key == "inner_max_iterations") {
                opt.inner_max_iterations = value.get<int>();
            } else if (key == "divergence_norm_bound") {
                opt.divergence_norm_bound = value.get<double>();
            } else if (key == "max_backtracks") {
                opt.max_backtracks = value.get<int>();
            } else if (key == "reset_mu") {
                opt.reset_mu = value.get<bool>();
            } else if (key == "trace") {
                opt.trace_path = value.get<std::string>();
            } else if (key == "seed") {
                opt.seed = value.get<std::uint64_t>();
            } else if (key == "no_timestamp") {
                opt.no_timestamp = value.get<bool>();
            } else {
                error = "unknown spec key '" + key + "'";
                return false;
            }
        } catch (const nlohmann::json::exception&) {
            error = "bad value for spec key '" + key + "'";
            return false;
        }
    }
    return true;
}

int status_exit_code(cgn::RunStatus status) {
    switch (status) {
        case cgn::RunStatus::converged_critical: return 0;
        case cgn::RunStatus::diverging_norm: return 2;
        default: return 3;  // some budget ran out
    }
}

template <typename WriteFn>
int write_to(const std::string& path, WriteFn&& write) {
    if (path.empty()) {
        write(std::cout);
        return 0;
    }
    std::ofstream os(path);
    if (!os) {
        std::cerr << "error: cannot open output file '" << path << "'\n";
        return 1;
    }
    write(os);
    os.flush();
    if (!os) {
        std::cerr << "error: failed writing '" << path << "'\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"backtracking composite Gauss-Newton solver and certification harness"};
    app.require_subcommand(1);

    CLI::App* list_cmd = app.add_subcommand("list", "print the built-in problem registry");

    CLI::App* solve_cmd =
        app.add_subcommand("solve", "run the solver on a registry problem and write a trace");
    std::string spec_path;
    std::string problem;
    std::string trace_path;
    std::vector<std::string> param_args;
    double mu0 = 0, tau = 0, tol = 0;
    int max_iter = 0;
    std::uint64_t seed = 0;
    bool no_timestamp = false;
    CLI::Option* spec_opt =
        solve_cmd->add_option("--spec", spec_path, "JSON run spec; flags override its fields");
    CLI::Option* problem_opt =
        solve_cmd->add_option("--problem", problem, "registry problem name");
    CLI::Option* mu0_opt = solve_cmd->add_option("--mu0", mu0, "initial proximal weight");
    CLI::Option* tau_opt = solve_cmd->add_option("--tau", tau, "backtracking multiplier (> 1)");
    CLI::Option* tol_opt = solve_cmd->add_option("--tol", tol, "step-norm stopping tolerance");
    CLI::Option* max_iter_opt =
        solve_cmd->add_option("--max-iter", max_iter, "outer iteration budget");
    CLI::Option* seed_opt =
        solve_cmd->add_option("--seed", seed, "seed recorded in the trace header");
    CLI::Option* trace_opt =
        solve_cmd->add_option("--trace", trace_path, "trace output path (default: stdout)");
    CLI::Option* no_ts_flag = solve_cmd->add_flag("--no-timestamp", no_timestamp,
                                                  "omit the generated= header field so output "
                                                  "is byte-for-byte reproducible");
    solve_cmd->add_option("--param", param_args,
                          "problem parameter as key=value (repeatable)");

    CLI::App* check_cmd =
        app.add_subcommand("check", "run the numerical certification suite on a problem");
    std::string check_problem;
    std::string report_path;
    std::uint64_t check_seed = 0;
    int samples = 100;
    double corrupt = 0.0;
    bool check_no_ts = false;
    check_cmd->add_option("--problem", check_problem, "registry problem name")->required();
    check_cmd->add_option("--seed", check_seed, "sampling seed");
    check_cmd->add_option("--samples", samples, "sample count per check");
    check_cmd->add_option("--report", report_path, "report output path (default: stdout)");
    check_cmd->add_flag("--no-timestamp", check_no_ts, "omit the generated= header field");
    check_cmd->add_option("--corrupt-jacobian", corrupt,
                          "scale the jacobian oracle by (1+r): a negative control that the "
                          "suite must catch");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // help/version exit clean, anything else is usage
    }

    if (*list_cmd) {
        for (const cgn::RegistryEntry& entry : cgn::problem_registry())
            std::cout << std::left << std::setw(22) << entry.name << ' ' << entry.notes << '\n';
        return 0;
    }

    if (*solve_cmd) {
        SolveOptions opt;
        if (spec_opt->count() > 0) {
            std::string error;
            if (!load_spec_file(spec_path, opt, error)) {
                std::cerr << "error: " << error << '\n';
                return 1;
            }
        }
        if (problem_opt->count() > 0) opt.problem = problem;
        if (mu0_opt->count() > 0) opt.mu0 = mu0;
        if (tau_opt->count() > 0) opt.tau = tau;
        if (tol_opt->count() > 0) opt.tol = tol;
        if (max_iter_opt->count() > 0) opt.max_iter = max_iter;
        if (seed_opt->count() > 0) opt.seed = seed;
        if (trace_opt->count() > 0) opt.trace_path = trace_path;
        if (no_ts_flag->count() > 0) opt.no_timestamp = true;
        for (const std::string& kv : param_args) {
            const std::size_t eq = kv.find('=');
            if (eq == std::string::npos || eq == 0) {
                std::cerr << "error: --param expects key=value, got '" << kv << "'\n";
                return 1;
            }
            try {
                std::size_t used = 0;
                const std::string text = kv.substr(eq + 1);
                opt.params[kv.substr(0, eq)] = std::stod(text, &used);
                if (used != text.size()) throw std::invalid_argument(text);
            } catch (const std::exception&) {
                std::cerr << "error: --param value must be numeric in '" << kv << "'\n";
                return 1;
            }
        }
        if (opt.problem.empty()) {
            std::cerr << "error: no problem selected (use --problem or a spec file)\n";
            return 1;
        }

        const cgn::RegistryEntry* entry = cgn::find_problem(opt.problem);
        if (entry == nullptr) {
            std::cerr << "error: unknown problem '" << opt.problem << "'\n";
            return 1;
        }

        cgn::SolverConfig config = entry->default_config;
        if (opt.mu0) config.mu0 = *opt.mu0;
        if (opt.tau) config.tau = *opt.tau;
        if (opt.tol) config.step_tolerance = *opt.tol;
        if (opt.max_iter) config.max_outer_iterations = *opt.max_iter;
        if (opt.inner_tolerance) config.inner.tolerance = *opt.inner_tolerance;
        if (opt.inner_max_iterations) config.inner.max_inner_iterations = *opt.inner_max_iterations;
        if (opt.divergence_norm_bound) config.divergence_norm_bound = *opt.divergence_norm_bound;
        if (opt.max_backtracks) config.max_backtracks_per_iteration = *opt.max_backtracks;
        if (opt.reset_mu) config.reset_mu_each_iteration = *opt.reset_mu;

        try {
            const cgn::BuiltProblem built = entry->build(opt.params);
            const cgn::RunOutcome outcome = cgn::run(built.problem, built.x0, config);
            cgn::TraceMetadata meta;
            meta.problem = opt.problem;
            meta.seed = opt.seed;
            meta.include_timestamp = !opt.no_timestamp;
            const int write_rc = write_to(opt.trace_path, [&](std::ostream& os) {
                cgn::write_trace(os, meta, outcome);
            });
            if (write_rc != 0) return write_rc;
            return status_exit_code(outcome.status);
        } catch (const std::invalid_argument& e) {
            std::cerr << "error: " << e.what() << '\n';
            return 1;
        }
    }

    // check
    const cgn::RegistryEntry* entry = cgn::find_problem(check_problem);
    if (entry == nullptr) {
        std::cerr << "error: unknown problem '" << check_problem << "'\n";
        return 1;
    }
    try {
        cgn::BuiltProblem built = entry->build({});
        std::optional<cgn::CompositeProblem> corrupted;
        if (corrupt != 0.0) {
            cgn::SmoothMap F = built.problem.smooth_map();
            const auto original = F.jacobian;
            const double factor = 1.0 + corrupt;
            F.jacobian = [original, factor](const cgn::Vector& x) {
                return cgn::Matrix(factor * original(x));
            };
            corrupted.emplace(std::move(F), built.problem.outer(), built.problem.feasible_set());
        }
        const cgn::CompositeProblem& target = corrupted ? *corrupted : built.problem;

        std::vector<cgn::CheckReport> reports;
        bool all_pass = false;
        try {
            reports = cgn::standard_check_suite(target, built.x0, samples, check_seed,
                                                entry->default_config.inner);
            all_pass = true;
            for (const cgn::CheckReport& r : reports) all_pass = all_pass && r.pass;
        } catch (const std::exception& e) {
            // A crash while certifying is itself a failed certification.
            std::cerr << "error: check suite aborted: " << e.what() << '\n';
            all_pass = false;
        }

        cgn::TraceMetadata meta;
        meta.problem = check_problem;
        meta.seed = check_seed;
        meta.include_timestamp = !check_no_ts;
        const int write_rc = write_to(report_path, [&](std::ostream& os) {
            cgn::write_reports(os, meta, reports);
        });
        if (write_rc != 0) return write_rc;
        return all_pass ? 0 : 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
