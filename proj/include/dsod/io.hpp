// Result emission: CSV tables with '#'-prefixed metadata lines, and flat
// binary field snapshots.
//
// Snapshot layout (bit-exact so other implementations interoperate):
//   bytes  0..3   magic "DSOD"
//   bytes  4..7   format version, little-endian u32, currently 1
//   bytes  8..11  dimension d, little-endian u32
//   bytes 12..15  side length n, little-endian u32
//   bytes 16..23  value count n^d, little-endian u64
//   bytes 24..31  reserved, zero
//   then count IEEE-754 doubles, little-endian, row-major (last axis fastest).

#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "dsod/torus.hpp"

namespace dsod {

// Shortest decimal form that round-trips a double exactly.
std::string format_double(double x);

struct Table {
  std::vector<std::pair<std::string, std::string>> meta;  // emitted in order
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  bool truncated = false;  // emits a trailing "# TRUNCATED" line when set

  void add_meta(const std::string& key, const std::string& value);
  void add_meta(const std::string& key, double value);
  void add_meta(const std::string& key, long long value);
};

void write_table(std::ostream& os, const Table& table);

// Relative paths land under OUTPUT_DIR when that variable is set; absolute
// paths pass through unchanged.
std::filesystem::path resolve_output_path(const std::string& out);

void write_snapshot(const std::filesystem::path& path, const GridFunction& f);
GridFunction read_snapshot(const std::filesystem::path& path);

}  // namespace dsod
