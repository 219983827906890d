#include "topgrad/select.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>

namespace topgrad {

namespace {

std::vector<int> support_cells(const TopoField& tf) {
    std::vector<int> out;
    for (int c = 0; c < static_cast<int>(tf.rho.values.size()); ++c) {
        if (std::abs(tf.rho.values[c]) > tf.rho_zero_tol) out.push_back(c);
    }
    return out;
}

int cell_budget(double t, size_t support_size) {
    if (!(t > 0.0 && t <= 1.0)) throw std::invalid_argument("select_d: t must be in (0, 1]");
    const int m = static_cast<int>(std::llround(t * static_cast<double>(support_size)));
    return std::max(1, std::min<int>(m, static_cast<int>(support_size)));
}

SelectionResult make_result(const TopoField& tf, std::shared_ptr<const Mesh> mesh,
                            const std::vector<int>& chosen, size_t support_size) {
    const double area = mesh->cell_area();
    SelectionResult res;
    res.d_set = CellSet(std::move(mesh));
    for (int c : chosen) {
        res.d_set.insert(c);
        res.mass += area * std::abs(tf.rho.values[c]);
    }
    res.budget_used = res.d_set.measure();
    res.effective_t = res.budget_used / (static_cast<double>(support_size) * area);
    return res;
}

}  // namespace

SelectionResult select_d(const TopoField& tf, std::shared_ptr<const Mesh> mesh, double t) {
    std::vector<int> support = support_cells(tf);
    if (support.empty()) {
        throw EmptyResidual("select_d: residual is identically zero");
    }
    const int m = cell_budget(t, support.size());

    // |rho| descending, ties by ascending cell index (support is sorted)
    std::stable_sort(support.begin(), support.end(), [&](int a, int b) {
        return std::abs(tf.rho.values[a]) > std::abs(tf.rho.values[b]);
    });
    std::vector<int> chosen(support.begin(), support.begin() + m);
    std::sort(chosen.begin(), chosen.end());
    return make_result(tf, std::move(mesh), chosen, support.size());
}

SelectionResult select_d_bruteforce(const TopoField& tf, std::shared_ptr<const Mesh> mesh,
                                    double t) {
    std::vector<int> support = support_cells(tf);
    if (support.empty()) {
        throw EmptyResidual("select_d_bruteforce: residual is identically zero");
    }
    if (support.size() > 20) {
        throw UnsupportedSize("select_d_bruteforce: support too large for enumeration");
    }
    const int m = cell_budget(t, support.size());
    const int n = static_cast<int>(support.size());

    double best_mass = -1.0;
    std::vector<int> best;
    for (uint32_t bitmask = 1; bitmask < (1u << n); ++bitmask) {
        if (std::popcount(bitmask) > m) continue;
        double mass = 0.0;
        std::vector<int> cells;
        for (int k = 0; k < n; ++k) {
            if (bitmask & (1u << k)) {
                mass += std::abs(tf.rho.values[support[k]]);
                cells.push_back(support[k]);
            }
        }
        if (mass > best_mass + 1e-15 ||
            (std::abs(mass - best_mass) <= 1e-15 && cells < best)) {
            best_mass = mass;
            best = cells;
        }
    }
    return make_result(tf, std::move(mesh), best, support.size());
}

}  // namespace topgrad
