#include "topgrad/topo.hpp"

#include <cmath>

namespace topgrad {

TopoField topological_derivative(const ProblemSpec& spec, const CellSet& A,
                                 const SubproblemSolution& sol, double rho_zero_tol) {
    const Mesh& mesh = *A.mesh();
    const int nc = mesh.num_cells();
    const double area = mesh.cell_area();

    TopoField tf;
    tf.rho_zero_tol = rho_zero_tol;
    tf.dj.values.resize(nc);
    tf.rho.values.resize(nc);

    for (int c = 0; c < nc; ++c) {
        const double p = sol.p.values[c];
        if (!std::isfinite(p)) {
            throw std::invalid_argument("topological_derivative: non-finite adjoint");
        }
        const double sigma = A.contains(c) ? -1.0 : 1.0;
        const double dj = sigma * (spec.beta_at(c) + hbar(spec.law, p));
        tf.dj.values[c] = dj;
        const double rho = std::min(dj, 0.0);
        tf.rho.values[c] = rho;
        if (std::abs(rho) > rho_zero_tol) ++tf.support_cells;
        tf.rho_l1 += area * std::abs(rho);
        tf.rho_inf = std::max(tf.rho_inf, std::abs(rho));
    }
    tf.delta_A = tf.rho_l1;
    return tf;
}

double error_bound(const TopoField& tf) { return tf.delta_A; }

double flip_oracle(const ProblemSpec& spec, const DiscreteOperators& ops, const CellSet& A,
                   int cell) {
    if (cell < 0 || cell >= A.mesh()->num_cells()) {
        throw std::invalid_argument("flip_oracle: bad cell index");
    }
    CellSet flipped = A;
    flipped.flip(cell);
    const double ja = solve_inner(spec, ops, A).value;
    const double jb = solve_inner(spec, ops, flipped).value;
    return (jb - ja) / A.mesh()->cell_area();
}

ExpansionProbe expansion_probe(const ProblemSpec& spec, const DiscreteOperators& ops,
                               const CellSet& A, const CellSet& B) {
    require_same_mesh(A, B);
    const Mesh& mesh = *A.mesh();
    const double area = mesh.cell_area();

    SubproblemSolution sol_a = solve_inner(spec, ops, A);
    SubproblemSolution sol_b = solve_inner(spec, ops, B);

    double linear = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const double chi_diff = (A.contains(c) ? 1.0 : 0.0) - (B.contains(c) ? 1.0 : 0.0);
        if (chi_diff != 0.0) {
            linear += area * chi_diff * (spec.beta_at(c) + hbar(spec.law, sol_b.p.values[c]));
        }
    }

    ExpansionProbe probe;
    probe.rhs_linear = linear;
    probe.lhs = std::abs(sol_a.value - sol_b.value - linear);
    probe.dist = set_distance_l1(A, B);
    return probe;
}

}  // namespace topgrad
