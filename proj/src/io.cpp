#include "dsod/io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>

#include "dsod/common.hpp"

namespace dsod {

namespace {

void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

void Table::add_meta(const std::string& key, const std::string& value) {
  meta.emplace_back(key, value);
}

void Table::add_meta(const std::string& key, double value) {
  meta.emplace_back(key, format_double(value));
}

void Table::add_meta(const std::string& key, long long value) {
  meta.emplace_back(key, std::to_string(value));
}

void write_table(std::ostream& os, const Table& table) {
  for (const auto& [k, v] : table.meta) os << "# " << k << " = " << v << "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) os << ',';
    os << table.columns[i];
  }
  os << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      os << row[i];
    }
    os << "\n";
  }
  if (table.truncated) os << "# TRUNCATED\n";
}

std::filesystem::path resolve_output_path(const std::string& out) {
  std::filesystem::path p(out);
  if (p.is_absolute()) return p;
  const char* dir = std::getenv("OUTPUT_DIR");
  if (dir != nullptr && *dir != '\0') return std::filesystem::path(dir) / p;
  return p;
}

void write_snapshot(const std::filesystem::path& path, const GridFunction& f) {
  std::string buf;
  buf.reserve(32 + 8 * f.v.size());
  buf += "DSOD";
  put_u32(buf, 1u);
  put_u32(buf, static_cast<std::uint32_t>(f.lat.d));
  put_u32(buf, static_cast<std::uint32_t>(f.lat.n));
  put_u64(buf, static_cast<std::uint64_t>(f.v.size()));
  put_u64(buf, 0u);
  for (double x : f.v) put_u64(buf, std::bit_cast<std::uint64_t>(x));
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw UsageError("cannot open for writing: " + path.string());
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!os) throw UsageError("short write: " + path.string());
}

GridFunction read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw UsageError("cannot open for reading: " + path.string());
  std::string buf((std::istreambuf_iterator<char>(is)),
                  std::istreambuf_iterator<char>());
  if (buf.size() < 32 || buf.compare(0, 4, "DSOD") != 0)
    throw UsageError("not a field snapshot: " + path.string());
  const auto* p = reinterpret_cast<const unsigned char*>(buf.data());
  const std::uint32_t version = get_u32(p + 4);
  const std::uint32_t d = get_u32(p + 8);
  const std::uint32_t n = get_u32(p + 12);
  const std::uint64_t count = get_u64(p + 16);
  if (version != 1)
    throw UsageError("unsupported snapshot version " + std::to_string(version));
  const TorusLattice lat = TorusLattice::make(static_cast<int>(d),
                                              static_cast<int>(n));
  if (count != lat.size || buf.size() != 32 + 8 * count)
    throw UsageError("snapshot size mismatch: " + path.string());
  GridFunction f(lat);
  for (std::size_t i = 0; i < f.v.size(); ++i)
    f.v[i] = std::bit_cast<double>(get_u64(p + 32 + 8 * i));
  return f;
}

}  // namespace dsod
