#pragma once

#include "topgrad/subproblem.hpp"

namespace topgrad {

/// Topological derivative of the value function at a set A, its negative
/// part rho (the optimality residual) and the certified suboptimality
/// bound delta_A = ||rho||_{L1}.
struct TopoField {
    FieldP0 dj;
    FieldP0 rho;  // min(dj, 0)
    int support_cells = 0;
    double rho_l1 = 0.0;
    double rho_inf = 0.0;
    double delta_A = 0.0;
    double rho_zero_tol = 1e-14;
};

TopoField topological_derivative(const ProblemSpec& spec, const CellSet& A,
                                 const SubproblemSolution& sol, double rho_zero_tol = 1e-14);

/// J(A) - inf J <= delta_A
double error_bound(const TopoField& tf);

/// Ground-truth one-cell topological quotient:
/// (J(A symdiff {cell}) - J(A)) / |cell|, via two full inner solves.
double flip_oracle(const ProblemSpec& spec, const DiscreteOperators& ops, const CellSet& A,
                   int cell);

struct ExpansionProbe {
    double lhs = 0.0;         // |J(A) - J(B) - first-order term at B|
    double rhs_linear = 0.0;  // first-order term sum
    double dist = 0.0;        // ||chi_A - chi_B||_{L1}
};

/// Data point for the remainder-order fit of the value-function expansion.
ExpansionProbe expansion_probe(const ProblemSpec& spec, const DiscreteOperators& ops,
                               const CellSet& A, const CellSet& B);

}  // namespace topgrad
