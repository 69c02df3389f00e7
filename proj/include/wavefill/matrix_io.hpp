#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "wavefill/grid.hpp"

namespace wavefill {

/// One CSV line per matrix row, comma separated, 6 decimals, "nan" where
/// the cell carries no value.
std::string state_matrix_csv(const StateMatrix& m);

/// Sidecar: grid, shape, and run-length encoded mask and counts, both in
/// row-major order as [value, run] pairs.
std::string state_matrix_sidecar(const StateMatrix& m);

StateMatrix parse_state_matrix(const std::string& csv, const std::string& sidecar);

/// Writes `<stem>.csv` and `<stem>.json` atomically.
void save_state_matrix(const std::filesystem::path& stem, const StateMatrix& m);
StateMatrix load_state_matrix(const std::filesystem::path& stem);

/// Binary 8-bit PGM (P5). Width is the column count and height the row
/// count, with the last matrix row (largest s) at the top. Grey level is
/// round(255 * v / v_max) clamped to [0,255]; cells without a value are 0.
std::string heatmap_pgm(const StateMatrix& m, double v_max_kmh);
void save_heatmap(const std::filesystem::path& path, const StateMatrix& m, double v_max_kmh);

}  // namespace wavefill
