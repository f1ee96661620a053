#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cgn/problem.hpp"
#include "cgn/solver.hpp"

namespace cgn {

/// Numeric knobs a registry entry may honor (most entries take none; unknown
/// keys are rejected so typos fail loudly).
using ProblemParams = std::map<std::string, double>;

struct BuiltProblem {
    CompositeProblem problem;
    Vector x0;  ///< entry's default start point for the given parameters
};

struct KnownOptimum {
    Vector x;
    double value = 0.0;
};

struct RegistryEntry {
    std::string name;
    std::string notes;
    std::function<BuiltProblem(const ProblemParams&)> build;
    std::optional<KnownOptimum> known_optimum;  ///< at default parameters
    /// Per-entry starting configuration; identical to SolverConfig{} except
    /// where a fixture needs it (the unbounded fixture lowers the divergence
    /// bound so runs finish in a sensible number of iterations).
    SolverConfig default_config;
};

/// All built-in problems, in listing order. Datasets are synthesized from
/// fixed seeds recorded in the notes, so entries are reproducible without
/// shipping data files.
const std::vector<RegistryEntry>& problem_registry();

/// nullptr when no entry has that name.
const RegistryEntry* find_problem(const std::string& name);

}  // namespace cgn
