#include "wgflow/csv.hpp"

#include <cstdio>
#include <fstream>

namespace wgflow {

std::string format_double(double v) {
  char buf[40];
  // round-trippable and stable across runs
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  for (size_t i = 0; i < header.size(); ++i) {
    if (i) out << ',';
    out << header[i];
  }
  out << '\n';
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << format_double(row[i]);
    }
    out << '\n';
  }
}

void write_grid_csv(const std::string& path, const GridDensity& grid) {
  const Matrix nodes = grid.nodes();
  std::vector<std::string> header;
  for (Index a = 0; a < grid.dim(); ++a) header.push_back("x" + std::to_string(a));
  header.push_back("value");
  std::vector<std::vector<double>> rows(nodes.rows());
  for (Index i = 0; i < nodes.rows(); ++i) {
    rows[i].reserve(grid.dim() + 1);
    for (Index a = 0; a < grid.dim(); ++a) rows[i].push_back(nodes(i, a));
    rows[i].push_back(grid.values()[i]);
  }
  write_csv(path, header, rows);
}

}  // namespace wgflow
