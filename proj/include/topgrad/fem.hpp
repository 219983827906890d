#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <functional>
#include <memory>
#include <vector>

#include "topgrad/mesh.hpp"

namespace topgrad {

enum class PdeKind {
    dirichlet_laplace,   // -lap y = u,  y = 0 on boundary
    neumann_helmholtz,   // -lap y + y = u,  dy/dn = 0
};

/// Continuous piecewise linear field: one value per node.
struct FieldP1 {
    std::vector<double> values;
};

/// Piecewise constant field: one value per cell.
struct FieldP0 {
    std::vector<double> values;
};

struct NumericalBreakdown : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Discrete state/adjoint machinery for one mesh + PDE kind. Holds the
/// (boundary-reduced) system matrix with its Cholesky factorization, the
/// consistent P1 mass matrix and the P0->P1 load coupling. Immutable after
/// assembly; concurrent solves against the shared factorization are fine.
class DiscreteOperators {
public:
    DiscreteOperators(std::shared_ptr<const Mesh> mesh, PdeKind kind);

    const std::shared_ptr<const Mesh>& mesh() const { return mesh_; }
    PdeKind kind() const { return kind_; }
    int num_dofs() const { return ndof_; }

    const Eigen::SparseMatrix<double>& system_matrix() const { return A_; }
    const Eigen::SparseMatrix<double>& stiffness_full() const { return K_full_; }
    const Eigen::SparseMatrix<double>& mass_full() const { return M_full_; }
    const Eigen::SparseMatrix<double>& load_coupling() const { return B_; }

    /// y solving the PDE with right-hand side chi_support * u
    FieldP1 solve_state(const FieldP0& u, const CellSet& support) const;

    /// cell averages of the P1 adjoint solve with source y - yd
    FieldP0 solve_adjoint(const FieldP1& y, const FieldP1& yd) const;

    /// 0.5 * sum_i m_i (y_i - yd_i)^2 over the free nodes, with m_i the
    /// row sums of the P1 mass matrix (lumped quadrature of the tracking
    /// term; nodes eliminated by essential boundary conditions carry no
    /// weight). The adjoint uses the same quadrature, so solve_adjoint is
    /// the exact gradient of this value.
    double tracking_value(const FieldP1& y, const FieldP1& yd) const;

    /// lumped mass weights m_i (zero on eliminated boundary nodes)
    const Eigen::VectorXd& lumped_mass() const { return ml_; }

    /// nodal interpolation of a closed-form function onto P1
    FieldP1 interpolate_p1(const std::function<double(double, double)>& f) const;

    /// interpolation into the state space: like interpolate_p1, but nodes
    /// eliminated by essential boundary conditions are set to zero, so the
    /// target is represented in the same space as the reachable states
    FieldP1 interpolate_target(const std::function<double(double, double)>& f) const;

    /// P1 adjoint solve with an arbitrary nodal source, before P0 restriction
    FieldP1 solve_adjoint_p1(const FieldP1& source) const;

    FieldP0 cell_average(const FieldP1& y) const;

private:
    Eigen::VectorXd restrict_to_dofs(const Eigen::VectorXd& full) const;
    Eigen::VectorXd expand_to_nodes(const Eigen::VectorXd& reduced) const;

    std::shared_ptr<const Mesh> mesh_;
    PdeKind kind_;
    int ndof_;
    std::vector<int> dof_of_node_;  // -1 for eliminated boundary nodes
    std::vector<int> node_of_dof_;
    Eigen::SparseMatrix<double> K_full_;  // pure stiffness, all nodes
    Eigen::SparseMatrix<double> M_full_;
    Eigen::VectorXd ml_;  // lumped mass, zero on eliminated nodes
    Eigen::SparseMatrix<double> B_;  // nodes x cells
    Eigen::SparseMatrix<double> A_;  // reduced system matrix
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
};

std::shared_ptr<const DiscreteOperators> assemble(std::shared_ptr<const Mesh> mesh, PdeKind kind);

}  // namespace topgrad
