#pragma once

#include <variant>

#include "topgrad/select.hpp"

namespace topgrad {

enum class StopReason { delta_tol, rho_inf, support_min, linesearch_failed, max_iters };

const char* to_string(StopReason r);

struct InitialSet {
    enum class Kind { full, empty, explicit_set };
    Kind kind = Kind::full;
    std::optional<CellSet> set;  // for explicit_set

    static InitialSet full() { return {Kind::full, std::nullopt}; }
    static InitialSet empty() { return {Kind::empty, std::nullopt}; }
    static InitialSet explicit_set(CellSet s) { return {Kind::explicit_set, std::move(s)}; }
};

struct DescentConfig {
    double tau = 0.5;           // backtracking factor
    double sigma_armijo = 0.1;  // sufficient-decrease factor
    double delta_tol = 0.0;
    double rho_inf_tol = 1e-12;
    int support_min = 3;  // stop when rho support has <= this many cells
    int max_iters = 100;
    double t_min = 1e-8;
    bool warm_start = true;
    InitialSet initial_set;
    SubproblemOptions sub;

    void validate() const;
};

struct IterationRecord {
    int k = 0;
    double J = 0.0;
    double set_measure = 0.0;
    double rho_l1 = 0.0;
    int rho_support = 0;
    double t_accepted = 0.0;
    int ls_trials = 0;
    int sub_iters = 0;
    double kkt_residual = 0.0;
    double step_mass = 0.0;  // captured residual mass of the accepted D
    std::optional<StopReason> stop_reason;
};

struct DescentResult {
    CellSet final_set;
    SubproblemSolution final_solution;
    std::vector<IterationRecord> history;
    StopReason stop_reason = StopReason::max_iters;
};

/// sigma * (negative captured mass): right-hand side increment of the
/// Armijo test J(A_trial) <= J(A) + armijo_rhs
double armijo_rhs(const TopoField& tf, const SelectionResult& d, double sigma_armijo);

/// Outer topological gradient descent loop with Armijo line-search.
DescentResult run_descent(const ProblemSpec& spec, const DiscreteOperators& ops,
                          const DescentConfig& cfg);

/// Post-hoc sanity of a completed run: strict descent, summability bound
/// and (for clean stops) residual below tolerance.
bool minimizing_sequence_check(const std::vector<IterationRecord>& history, double sigma_armijo,
                               double delta_tol);

}  // namespace topgrad
