#include "topgrad/mesh.hpp"

#include <cmath>
#include <stdexcept>

namespace topgrad {

Mesh::Mesh(Rectangle domain, int nx, int ny) : domain_(domain), nx_(nx), ny_(ny) {
    if (nx < 1 || ny < 1) {
        throw std::invalid_argument("build_mesh: nx and ny must be >= 1");
    }
    if (!(domain.lx > 0.0) || !(domain.ly > 0.0)) {
        throw std::invalid_argument("build_mesh: domain side lengths must be positive");
    }
    const double hx = domain.lx / nx;
    const double hy = domain.ly / ny;
    cell_area_ = 0.5 * hx * hy;
    h_ = std::sqrt(hx * hx + hy * hy);

    nodes_.reserve(static_cast<size_t>(nx + 1) * (ny + 1));
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            nodes_.push_back({i * hx, j * hy});
        }
    }

    cells_.reserve(static_cast<size_t>(2) * nx * ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int n00 = node_index(i, j);
            const int n10 = node_index(i + 1, j);
            const int n01 = node_index(i, j + 1);
            const int n11 = node_index(i + 1, j + 1);
            // both counter-clockwise
            cells_.push_back({n00, n10, n11});
            cells_.push_back({n00, n11, n01});
        }
    }
}

std::array<double, 2> Mesh::cell_barycenter(int c) const {
    const auto& tri = cells_[c];
    return {(nodes_[tri[0]][0] + nodes_[tri[1]][0] + nodes_[tri[2]][0]) / 3.0,
            (nodes_[tri[0]][1] + nodes_[tri[1]][1] + nodes_[tri[2]][1]) / 3.0};
}

bool Mesh::is_boundary_node(int n) const {
    const int i = n % (nx_ + 1);
    const int j = n / (nx_ + 1);
    return i == 0 || i == nx_ || j == 0 || j == ny_;
}

std::shared_ptr<const Mesh> build_mesh(Rectangle domain, int nx, int ny) {
    return std::make_shared<Mesh>(domain, nx, ny);
}

CellSet::CellSet(std::shared_ptr<const Mesh> mesh)
    : mesh_(std::move(mesh)), bits_(mesh_->num_cells(), false) {}

CellSet CellSet::empty(std::shared_ptr<const Mesh> mesh) { return CellSet(std::move(mesh)); }

CellSet CellSet::full(std::shared_ptr<const Mesh> mesh) {
    CellSet s(std::move(mesh));
    for (int c = 0; c < s.mesh_->num_cells(); ++c) s.insert(c);
    return s;
}

void CellSet::insert(int cell) {
    if (!bits_[cell]) {
        bits_[cell] = true;
        ++count_;
        measure_ += mesh_->cell_area();
    }
}

void CellSet::erase(int cell) {
    if (bits_[cell]) {
        bits_[cell] = false;
        --count_;
        measure_ -= mesh_->cell_area();
    }
}

void CellSet::flip(int cell) {
    if (bits_[cell]) {
        erase(cell);
    } else {
        insert(cell);
    }
}

double CellSet::measure_recomputed() const { return count_ * mesh_->cell_area(); }

bool CellSet::operator==(const CellSet& other) const {
    return mesh_ == other.mesh_ && bits_ == other.bits_;
}

std::vector<int> CellSet::cells() const {
    std::vector<int> out;
    out.reserve(count_);
    for (int c = 0; c < static_cast<int>(bits_.size()); ++c) {
        if (bits_[c]) out.push_back(c);
    }
    return out;
}

void require_same_mesh(const CellSet& a, const CellSet& b) {
    if (a.mesh() != b.mesh()) {
        throw std::invalid_argument("cell sets live on different meshes");
    }
}

CellSet symmetric_difference(const CellSet& a, const CellSet& b) {
    require_same_mesh(a, b);
    CellSet out(a.mesh());
    for (int c = 0; c < a.mesh()->num_cells(); ++c) {
        if (a.contains(c) != b.contains(c)) out.insert(c);
    }
    return out;
}

CellSet set_intersection(const CellSet& a, const CellSet& b) {
    require_same_mesh(a, b);
    CellSet out(a.mesh());
    for (int c = 0; c < a.mesh()->num_cells(); ++c) {
        if (a.contains(c) && b.contains(c)) out.insert(c);
    }
    return out;
}

double set_distance_l1(const CellSet& a, const CellSet& b) {
    require_same_mesh(a, b);
    int diff = 0;
    for (int c = 0; c < a.mesh()->num_cells(); ++c) {
        if (a.contains(c) != b.contains(c)) ++diff;
    }
    return diff * a.mesh()->cell_area();
}

}  // namespace topgrad
