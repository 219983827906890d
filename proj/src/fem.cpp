#include "topgrad/fem.hpp"

#include <cmath>
#include <stdexcept>

namespace topgrad {

namespace {

void require_node_field(const Mesh& mesh, const FieldP1& f, const char* what) {
    if (static_cast<int>(f.values.size()) != mesh.num_nodes()) {
        throw std::invalid_argument(std::string(what) + ": nodal field size mismatch");
    }
}

void require_cell_field(const Mesh& mesh, const FieldP0& f, const char* what) {
    if (static_cast<int>(f.values.size()) != mesh.num_cells()) {
        throw std::invalid_argument(std::string(what) + ": cell field size mismatch");
    }
}

}  // namespace

DiscreteOperators::DiscreteOperators(std::shared_ptr<const Mesh> mesh, PdeKind kind)
    : mesh_(std::move(mesh)), kind_(kind) {
    const Mesh& m = *mesh_;
    const int nn = m.num_nodes();
    const int nc = m.num_cells();
    const double area = m.cell_area();

    std::vector<Eigen::Triplet<double>> kt, mt, bt;
    kt.reserve(static_cast<size_t>(nc) * 9);
    mt.reserve(static_cast<size_t>(nc) * 9);
    bt.reserve(static_cast<size_t>(nc) * 3);

    for (int c = 0; c < nc; ++c) {
        const auto& tri = m.cell(c);
        const auto& p0 = m.node(tri[0]);
        const auto& p1 = m.node(tri[1]);
        const auto& p2 = m.node(tri[2]);
        // gradients of the P1 basis: grad phi_i = (b_i, c_i) / (2 area)
        const double b[3] = {p1[1] - p2[1], p2[1] - p0[1], p0[1] - p1[1]};
        const double cc[3] = {p2[0] - p1[0], p0[0] - p2[0], p1[0] - p0[0]};
        for (int i = 0; i < 3; ++i) {
            bt.emplace_back(tri[i], c, area / 3.0);
            for (int j = 0; j < 3; ++j) {
                kt.emplace_back(tri[i], tri[j], (b[i] * b[j] + cc[i] * cc[j]) / (4.0 * area));
                mt.emplace_back(tri[i], tri[j], area / 12.0 * (i == j ? 2.0 : 1.0));
            }
        }
    }

    K_full_.resize(nn, nn);
    K_full_.setFromTriplets(kt.begin(), kt.end());
    M_full_.resize(nn, nn);
    M_full_.setFromTriplets(mt.begin(), mt.end());
    B_.resize(nn, nc);
    B_.setFromTriplets(bt.begin(), bt.end());

    ml_ = M_full_ * Eigen::VectorXd::Ones(nn);

    dof_of_node_.assign(nn, -1);
    for (int n = 0; n < nn; ++n) {
        if (kind_ == PdeKind::dirichlet_laplace && m.is_boundary_node(n)) continue;
        dof_of_node_[n] = static_cast<int>(node_of_dof_.size());
        node_of_dof_.push_back(n);
    }
    ndof_ = static_cast<int>(node_of_dof_.size());
    for (int n = 0; n < nn; ++n) {
        if (dof_of_node_[n] < 0) ml_[n] = 0.0;
    }

    Eigen::SparseMatrix<double> full =
        (kind_ == PdeKind::neumann_helmholtz) ? Eigen::SparseMatrix<double>(K_full_ + M_full_)
                                              : K_full_;
    std::vector<Eigen::Triplet<double>> at;
    for (int col = 0; col < full.outerSize(); ++col) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(full, col); it; ++it) {
            const int rd = dof_of_node_[it.row()];
            const int cd = dof_of_node_[it.col()];
            if (rd >= 0 && cd >= 0) at.emplace_back(rd, cd, it.value());
        }
    }
    A_.resize(ndof_, ndof_);
    A_.setFromTriplets(at.begin(), at.end());

    solver_.compute(A_);
    if (solver_.info() != Eigen::Success) {
        throw NumericalBreakdown("assemble: factorization of the system matrix failed");
    }
}

Eigen::VectorXd DiscreteOperators::restrict_to_dofs(const Eigen::VectorXd& full) const {
    Eigen::VectorXd out(ndof_);
    for (int d = 0; d < ndof_; ++d) out[d] = full[node_of_dof_[d]];
    return out;
}

Eigen::VectorXd DiscreteOperators::expand_to_nodes(const Eigen::VectorXd& reduced) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh_->num_nodes());
    for (int d = 0; d < ndof_; ++d) out[node_of_dof_[d]] = reduced[d];
    return out;
}

FieldP1 DiscreteOperators::solve_state(const FieldP0& u, const CellSet& support) const {
    require_cell_field(*mesh_, u, "solve_state");
    if (support.mesh() != mesh_) {
        throw std::invalid_argument("solve_state: support set on a different mesh");
    }
    Eigen::VectorXd masked(mesh_->num_cells());
    for (int c = 0; c < mesh_->num_cells(); ++c) {
        const double v = support.contains(c) ? u.values[c] : 0.0;
        if (!std::isfinite(v)) throw std::invalid_argument("solve_state: non-finite control");
        masked[c] = v;
    }
    Eigen::VectorXd rhs = restrict_to_dofs(B_ * masked);
    Eigen::VectorXd sol = solver_.solve(rhs);
    if (solver_.info() != Eigen::Success) {
        throw NumericalBreakdown("solve_state: linear solve failed");
    }
    Eigen::VectorXd full = expand_to_nodes(sol);
    return FieldP1{std::vector<double>(full.data(), full.data() + full.size())};
}

FieldP1 DiscreteOperators::solve_adjoint_p1(const FieldP1& source) const {
    require_node_field(*mesh_, source, "solve_adjoint");
    Eigen::Map<const Eigen::VectorXd> src(source.values.data(), source.values.size());
    Eigen::VectorXd rhs = restrict_to_dofs(ml_.cwiseProduct(src));
    Eigen::VectorXd sol = solver_.solve(rhs);
    if (solver_.info() != Eigen::Success) {
        throw NumericalBreakdown("solve_adjoint: linear solve failed");
    }
    Eigen::VectorXd full = expand_to_nodes(sol);
    return FieldP1{std::vector<double>(full.data(), full.data() + full.size())};
}

FieldP0 DiscreteOperators::cell_average(const FieldP1& y) const {
    require_node_field(*mesh_, y, "cell_average");
    FieldP0 out;
    out.values.resize(mesh_->num_cells());
    for (int c = 0; c < mesh_->num_cells(); ++c) {
        const auto& tri = mesh_->cell(c);
        out.values[c] = (y.values[tri[0]] + y.values[tri[1]] + y.values[tri[2]]) / 3.0;
    }
    return out;
}

FieldP0 DiscreteOperators::solve_adjoint(const FieldP1& y, const FieldP1& yd) const {
    require_node_field(*mesh_, y, "solve_adjoint");
    require_node_field(*mesh_, yd, "solve_adjoint");
    FieldP1 diff;
    diff.values.resize(y.values.size());
    for (size_t i = 0; i < y.values.size(); ++i) diff.values[i] = y.values[i] - yd.values[i];
    return cell_average(solve_adjoint_p1(diff));
}

double DiscreteOperators::tracking_value(const FieldP1& y, const FieldP1& yd) const {
    require_node_field(*mesh_, y, "tracking_value");
    require_node_field(*mesh_, yd, "tracking_value");
    Eigen::VectorXd d(mesh_->num_nodes());
    for (int i = 0; i < mesh_->num_nodes(); ++i) d[i] = y.values[i] - yd.values[i];
    return 0.5 * d.dot(ml_.cwiseProduct(d));
}

FieldP1 DiscreteOperators::interpolate_p1(const std::function<double(double, double)>& f) const {
    FieldP1 out;
    out.values.resize(mesh_->num_nodes());
    for (int n = 0; n < mesh_->num_nodes(); ++n) {
        const auto& p = mesh_->node(n);
        out.values[n] = f(p[0], p[1]);
    }
    return out;
}

FieldP1 DiscreteOperators::interpolate_target(
    const std::function<double(double, double)>& f) const {
    FieldP1 out = interpolate_p1(f);
    for (int n = 0; n < mesh_->num_nodes(); ++n) {
        if (dof_of_node_[n] < 0) out.values[n] = 0.0;
    }
    return out;
}

std::shared_ptr<const DiscreteOperators> assemble(std::shared_ptr<const Mesh> mesh, PdeKind kind) {
    return std::make_shared<DiscreteOperators>(std::move(mesh), kind);
}

}  // namespace topgrad
