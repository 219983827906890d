#pragma once

#include <filesystem>
#include <iosfwd>

#include "topgrad/descent.hpp"

namespace topgrad {

/// One pixel per grid square: 0 / 128 / 255 for no / one / both member
/// triangles (P2 ASCII portable graymap).
void write_cellset_pgm(const std::filesystem::path& path, const CellSet& set);

/// `cell_index,flag` rows
void write_cellset_csv(const std::filesystem::path& path, const CellSet& set);

/// `index,value` rows
void write_field_p0_csv(const std::filesystem::path& path, const FieldP0& f);
void write_field_p1_csv(const std::filesystem::path& path, const FieldP1& f);

/// Linear gray map of a P0 field (min -> 0, max -> 255); one pixel per
/// grid square averaging its two triangles. The min/max used go into a
/// sidecar header `path.txt`.
void write_field_p0_pgm(const std::filesystem::path& path, const Mesh& mesh, const FieldP0& f);

/// `cell,dj,rho` rows
void write_topofield_csv(const std::filesystem::path& path, const TopoField& tf);

/// `k,J,set_measure,rho_l1,rho_support,t,ls_trials,sub_iters,kkt_residual`
void write_history_csv(const std::filesystem::path& path,
                       const std::vector<IterationRecord>& history);
void write_history_csv(std::ostream& out, const std::vector<IterationRecord>& history);

}  // namespace topgrad
