#pragma once

#include <string>
#include <vector>

#include "cset/conflict.hpp"
#include "cset/propagation.hpp"

namespace cset {

// CSV is the authoritative numeric artifact: decimal cells with 17 significant
// digits, LF line endings, deterministic row order. SVG/OBJ are derived views.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

// [OP] export_csv / the matching reader (comment lines starting '#' are
// skipped on read).
void export_csv(const CsvTable& table, const std::string& path);
std::string csv_to_string(const CsvTable& table);
CsvTable read_csv_file(const std::string& path);
CsvTable read_csv_string(const std::string& text);

// Conflict traces <-> CSV. Columns: branch, slice, t, x1..xn, s blocks,
// margin, germ.
CsvTable conflict_traces_to_csv(const std::vector<ConflictTrace>& traces,
                                const Scene& scene, int footpoint_count);
std::vector<ConflictTrace> conflict_traces_from_csv(const CsvTable& table,
                                                    const Scene& scene,
                                                    int footpoint_count);

CsvTable front_to_csv(const std::vector<FrontSample>& samples);

// Generic polyline tables (center set, kite, ...).
CsvTable polylines_to_csv(const std::vector<std::vector<Vec>>& polylines,
                          const std::vector<std::string>& coord_names);

// [OP] export_svg: one path element per branch, viewBox = padded box (n = 2).
void export_svg(const std::vector<std::vector<Vec>>& branches, const Box& box,
                const std::string& path);

// [OP] export_obj: wireframe (line elements) or point cloud (n = 3).
void export_obj(const std::vector<std::vector<Vec>>& branches,
                const std::string& path, bool points_only = false);

std::vector<std::vector<Vec>> trace_positions(const std::vector<ConflictTrace>& traces);

}  // namespace cset
