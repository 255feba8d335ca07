#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fastlim/fast_solver.hpp"
#include "fastlim/limit_solver.hpp"

namespace fastlim {

// Formats a double with 17 significant digits (lossless decimal round-trip).
std::string fmt17(double v);

// Writes content to path via a temporary file + rename, so readers never see
// a truncated file.
void atomic_write_file(const std::string& path, const std::string& content);

// FNV-1a over the canonical decimal rendering of every model parameter.
std::uint64_t parameter_hash(const Parameters& prm);

struct SnapshotHeader {
  double t = 0;
  Grid grid;
  std::uint64_t param_hash = 0;
  std::vector<std::string> field_names;
};

// Snapshot files are plain-text CSV: a fixed header block (t, grid metadata,
// parameter hash, field list) followed by one row per cell in row-major
// order. All floats carry 17 significant digits.
void write_fast_snapshot(const std::string& path, const Grid& g,
                         const FastState& st, const Parameters& prm);
void write_limit_snapshot(const std::string& path, const Grid& g,
                          const LimitState& st, const Parameters& prm);

FastState read_fast_snapshot(const std::string& path, SnapshotHeader* header = nullptr);
LimitState read_limit_snapshot(const std::string& path, SnapshotHeader* header = nullptr);

} // namespace fastlim
