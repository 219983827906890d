#include "topgrad/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace topgrad {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    return out;
}

}  // namespace

void write_cellset_pgm(const std::filesystem::path& path, const CellSet& set) {
    const Mesh& mesh = *set.mesh();
    auto out = open_out(path);
    out << "P2\n" << mesh.nx() << " " << mesh.ny() << "\n255\n";
    for (int j = mesh.ny() - 1; j >= 0; --j) {
        for (int i = 0; i < mesh.nx(); ++i) {
            const int members = (set.contains(mesh.cell_index(i, j, 0)) ? 1 : 0) +
                                (set.contains(mesh.cell_index(i, j, 1)) ? 1 : 0);
            out << (members == 0 ? 0 : members == 1 ? 128 : 255)
                << (i + 1 == mesh.nx() ? '\n' : ' ');
        }
    }
}

void write_cellset_csv(const std::filesystem::path& path, const CellSet& set) {
    auto out = open_out(path);
    out << "cell_index,flag\n";
    for (int c = 0; c < set.mesh()->num_cells(); ++c) {
        out << c << ',' << (set.contains(c) ? 1 : 0) << '\n';
    }
}

void write_field_p0_csv(const std::filesystem::path& path, const FieldP0& f) {
    auto out = open_out(path);
    out << "index,value\n" << std::setprecision(17);
    for (size_t i = 0; i < f.values.size(); ++i) out << i << ',' << f.values[i] << '\n';
}

void write_field_p1_csv(const std::filesystem::path& path, const FieldP1& f) {
    auto out = open_out(path);
    out << "index,value\n" << std::setprecision(17);
    for (size_t i = 0; i < f.values.size(); ++i) out << i << ',' << f.values[i] << '\n';
}

void write_field_p0_pgm(const std::filesystem::path& path, const Mesh& mesh, const FieldP0& f) {
    const auto [mn_it, mx_it] = std::minmax_element(f.values.begin(), f.values.end());
    const double lo = *mn_it, hi = *mx_it;
    const double span = (hi > lo) ? hi - lo : 1.0;

    auto out = open_out(path);
    out << "P2\n" << mesh.nx() << " " << mesh.ny() << "\n255\n";
    for (int j = mesh.ny() - 1; j >= 0; --j) {
        for (int i = 0; i < mesh.nx(); ++i) {
            const double v = 0.5 * (f.values[mesh.cell_index(i, j, 0)] +
                                    f.values[mesh.cell_index(i, j, 1)]);
            const int g = static_cast<int>(std::lround(255.0 * (v - lo) / span));
            out << std::clamp(g, 0, 255) << (i + 1 == mesh.nx() ? '\n' : ' ');
        }
    }

    auto sidecar = open_out(path.string() + ".txt");
    sidecar << std::setprecision(17) << "min=" << lo << "\nmax=" << hi << "\n";
}

void write_topofield_csv(const std::filesystem::path& path, const TopoField& tf) {
    auto out = open_out(path);
    out << "cell,dj,rho\n" << std::setprecision(17);
    for (size_t c = 0; c < tf.dj.values.size(); ++c) {
        out << c << ',' << tf.dj.values[c] << ',' << tf.rho.values[c] << '\n';
    }
}

void write_history_csv(std::ostream& out, const std::vector<IterationRecord>& history) {
    out << "k,J,set_measure,rho_l1,rho_support,t,ls_trials,sub_iters,kkt_residual\n"
        << std::setprecision(17);
    for (const auto& r : history) {
        out << r.k << ',' << r.J << ',' << r.set_measure << ',' << r.rho_l1 << ','
            << r.rho_support << ',' << r.t_accepted << ',' << r.ls_trials << ','
            << r.sub_iters << ',' << r.kkt_residual << '\n';
    }
}

void write_history_csv(const std::filesystem::path& path,
                       const std::vector<IterationRecord>& history) {
    auto out = open_out(path);
    write_history_csv(out, history);
}

}  // namespace topgrad
