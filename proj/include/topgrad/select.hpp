#pragma once

#include "topgrad/topo.hpp"

namespace topgrad {

struct EmptyResidual : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnsupportedSize : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Budgeted variation set: subset of the residual support maximizing the
/// captured residual mass under the measure budget t * |R_k|.
struct SelectionResult {
    CellSet d_set;
    double mass = 0.0;         // sum over D of area * |rho|
    double budget_used = 0.0;  // measure(D)
    double effective_t = 0.0;  // budget_used / measure(R_k)
};

/// Greedy top-density selection; exact under uniform cell areas.
/// Budget in cells: m = max(1, round(t * |R_k cells|)); ties broken by
/// ascending cell index.
SelectionResult select_d(const TopoField& tf, std::shared_ptr<const Mesh> mesh, double t);

/// Exhaustive oracle over all subsets of the support (<= 20 support cells).
SelectionResult select_d_bruteforce(const TopoField& tf, std::shared_ptr<const Mesh> mesh,
                                    double t);

}  // namespace topgrad
