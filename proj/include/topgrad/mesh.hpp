#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

namespace topgrad {

struct Rectangle {
    double lx = 1.0;
    double ly = 1.0;
};

/// Uniform triangulation of [0,Lx]x[0,Ly]: nx*ny grid squares, each split
/// into two triangles along the lower-left to upper-right diagonal.
/// Immutable after construction.
class Mesh {
public:
    Mesh(Rectangle domain, int nx, int ny);

    const Rectangle& domain() const { return domain_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int num_nodes() const { return static_cast<int>(nodes_.size()); }
    int num_cells() const { return static_cast<int>(cells_.size()); }
    double cell_area() const { return cell_area_; }
    double h() const { return h_; }

    const std::array<double, 2>& node(int i) const { return nodes_[i]; }
    const std::array<int, 3>& cell(int c) const { return cells_[c]; }

    std::array<double, 2> cell_barycenter(int c) const;

    int node_index(int i, int j) const { return j * (nx_ + 1) + i; }
    bool is_boundary_node(int n) const;

    /// cell index of triangle k (0 = lower, 1 = upper) in grid square (i,j)
    int cell_index(int i, int j, int k) const { return 2 * (j * nx_ + i) + k; }

private:
    Rectangle domain_;
    int nx_, ny_;
    std::vector<std::array<double, 2>> nodes_;
    std::vector<std::array<int, 3>> cells_;
    double cell_area_;
    double h_;
};

std::shared_ptr<const Mesh> build_mesh(Rectangle domain, int nx, int ny);

/// Subset of mesh cells (the optimization variable): one bit per cell,
/// with the total measure kept in sync incrementally.
class CellSet {
public:
    CellSet() = default;
    explicit CellSet(std::shared_ptr<const Mesh> mesh);

    static CellSet empty(std::shared_ptr<const Mesh> mesh);
    static CellSet full(std::shared_ptr<const Mesh> mesh);

    const std::shared_ptr<const Mesh>& mesh() const { return mesh_; }
    bool contains(int cell) const { return bits_[cell]; }
    void insert(int cell);
    void erase(int cell);
    void flip(int cell);

    int count() const { return count_; }
    double measure() const { return measure_; }
    double measure_recomputed() const;

    bool operator==(const CellSet& other) const;

    std::vector<int> cells() const;

private:
    std::shared_ptr<const Mesh> mesh_;
    std::vector<bool> bits_;
    int count_ = 0;
    double measure_ = 0.0;
};

CellSet symmetric_difference(const CellSet& a, const CellSet& b);
CellSet set_intersection(const CellSet& a, const CellSet& b);

/// ||chi_A - chi_B||_{L1} = measure(A symdiff B)
double set_distance_l1(const CellSet& a, const CellSet& b);

void require_same_mesh(const CellSet& a, const CellSet& b);

}  // namespace topgrad
