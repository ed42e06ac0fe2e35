#pragma once

#include <string>

#include "wlr/grid.hpp"

namespace wlr {

enum class GridFormat { pgm16, csv };

// "pgm16" / "csv", or inferred from the path extension (.pgm, .csv).
GridFormat grid_format_from_name(const std::string& name);
GridFormat grid_format_from_path(const std::string& path);

// CSV: ASCII comma-separated non-negative integers, one row per line, no
// header. PGM: binary P5; written with maxval 65535 and big-endian 2-byte
// samples, read with any maxval up to 65535 (1-byte samples below 256).
LabelGrid load_label_grid(const std::string& path, GridFormat format);
void save_label_grid(const std::string& path, const LabelGrid& grid, GridFormat format);

SegmentMap load_segment_map(const std::string& path, GridFormat format);

}  // namespace wlr
