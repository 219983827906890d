#pragma once

#include <optional>

#include "topgrad/problem.hpp"

namespace topgrad {

struct NonConvergence : std::runtime_error {
    double last_residual;
    NonConvergence(const std::string& msg, double residual)
        : std::runtime_error(msg), last_residual(residual) {}
};

struct InfeasibleControl : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Solution of the inner convex problem for a fixed support set A:
/// control, state, cell-averaged adjoint, objective value J(A).
struct SubproblemSolution {
    FieldP0 u;  // zero outside A
    FieldP1 y;
    FieldP0 p;
    double value = 0.0;
    double kkt_residual = 0.0;
    int iterations = 0;
    int cg_iterations = 0;  // accumulated over active-set steps
};

struct SubproblemOptions {
    double tol = 1e-10;      // sup-norm KKT residual target
    int max_iters = 100;     // active-set iterations
    double cg_tol = 1e-12;   // relative tolerance of the condensed solve
};

/// Primal-dual active-set solve of min_u J(u, A) for the quadratic-box law.
SubproblemSolution solve_subproblem(const ProblemSpec& spec, const DiscreteOperators& ops,
                                    const CellSet& A,
                                    const std::optional<FieldP0>& warm_start = std::nullopt,
                                    const SubproblemOptions& opts = {});

/// Binary law: u = chi_A, no inner optimization.
SubproblemSolution solve_binary(const ProblemSpec& spec, const DiscreteOperators& ops,
                                const CellSet& A);

/// Law dispatch used by the descent loop and oracles.
SubproblemSolution solve_inner(const ProblemSpec& spec, const DiscreteOperators& ops,
                               const CellSet& A,
                               const std::optional<FieldP0>& warm_start = std::nullopt,
                               const SubproblemOptions& opts = {});

/// Exact discrete objective J(u, A); u is masked by chi_A but must be
/// inside the box on A.
double evaluate_J(const ProblemSpec& spec, const DiscreteOperators& ops, const CellSet& A,
                  const FieldP0& u);

}  // namespace topgrad
