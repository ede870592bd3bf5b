#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "hessianlab/grid_function.hpp"
#include "hessianlab/version.hpp"

namespace hessianlab {

// ---------------------------------------------------------------------------
// Grid snapshots: flat binary, native endianness.
//
// Layout: magic "HGF1"; int32 n; int32 domain kind (0 box, 1 ball);
// float64 domain radius; int32 cells per axis; float64 spacing;
// uint64 node count; uint64 cut count; node values as float64 in flat node
// order (NaN at undefined nodes); cut values as float64 in cut id order.
// ---------------------------------------------------------------------------

namespace detail {

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T take(std::istream& in) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("grid snapshot: truncated file");
  return v;
}

}  // namespace detail

inline void write_grid_function(const std::string& path, const GridFunction& u) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("grid snapshot: cannot open " + path + " for writing");
  const Grid& g = u.grid();
  out.write("HGF1", 4);
  detail::put<std::int32_t>(out, g.dim());
  detail::put<std::int32_t>(out, g.domain().kind == DomainKind::kBall ? 1 : 0);
  detail::put<double>(out, g.domain().radius);
  detail::put<std::int32_t>(out, static_cast<std::int32_t>(std::llround(
                                     2.0 * g.domain().radius / g.spacing())));
  detail::put<double>(out, g.spacing());
  detail::put<std::uint64_t>(out, g.node_count());
  detail::put<std::uint64_t>(out, g.cut_count());
  for (std::size_t f = 0; f < g.node_count(); ++f)
    detail::put<double>(out, u.defined(f) ? u.value(f) : std::numeric_limits<double>::quiet_NaN());
  for (std::size_t id = 0; id < g.cut_count(); ++id) detail::put<double>(out, u.cut_value(id));
  if (!out) throw std::runtime_error("grid snapshot: write failed for " + path);
}

inline GridFunction read_grid_function(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("grid snapshot: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "HGF1", 4) != 0)
    throw std::runtime_error("grid snapshot: bad magic in " + path);
  const auto n = detail::take<std::int32_t>(in);
  const auto kind = detail::take<std::int32_t>(in);
  const auto radius = detail::take<double>(in);
  const auto cells = detail::take<std::int32_t>(in);
  const auto spacing = detail::take<double>(in);
  const auto nodes = detail::take<std::uint64_t>(in);
  const auto cuts = detail::take<std::uint64_t>(in);

  const GridPtr g = std::make_shared<const Grid>(
      n, Domain{kind == 1 ? DomainKind::kBall : DomainKind::kBox, radius}, cells);
  if (std::abs(g->spacing() - spacing) > 1e-12 * (1.0 + std::abs(spacing)) ||
      g->node_count() != nodes || g->cut_count() != cuts)
    throw std::runtime_error("grid snapshot: header does not describe its grid in " + path);

  GridFunction u(g);
  for (std::size_t f = 0; f < nodes; ++f) {
    const double v = detail::take<double>(in);
    if (!std::isnan(v)) u.set(f, v);
  }
  for (std::size_t id = 0; id < cuts; ++id) u.set_cut_value(id, detail::take<double>(in));
  return u;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

/// FNV-1a hash of the canonical (sorted-key) config serialization.
inline std::string config_hash(const nlohmann::json& config) {
  const std::string text = config.dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Common report envelope: toolkit identity plus the config fingerprint.
/// Reports deliberately carry no wall-clock data so identical configs
/// serialize byte-identically.
inline nlohmann::json report_envelope(const std::string& command, const nlohmann::json& config) {
  nlohmann::json rep;
  rep["toolkit"] = kToolkitName;
  rep["version"] = kVersion;
  rep["command"] = command;
  rep["config_hash"] = config_hash(config);
  return rep;
}

inline void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("report: cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("report: write failed for " + path);
}

/// Fixed-column CSV writer; numeric cells serialize with full round-trip
/// precision so reruns diff clean.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add_row(const std::vector<double>& cells) {
    if (cells.size() != columns_.size())
      throw std::invalid_argument("csv: row width does not match the header");
    rows_.push_back(cells);
  }

  void write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("csv: cannot open " + path + " for writing");
    for (std::size_t c = 0; c < columns_.size(); ++c)
      out << (c ? "," : "") << columns_[c];
    out << '\n';
    char buf[32];
    for (const auto& row : rows_) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        std::snprintf(buf, sizeof buf, "%.17g", row[c]);
        out << (c ? "," : "") << buf;
      }
      out << '\n';
    }
    if (!out) throw std::runtime_error("csv: write failed for " + path);
  }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

}  // namespace hessianlab
