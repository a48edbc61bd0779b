#pragma once

#include <string>
#include <vector>

#include "wgflow/density.hpp"

namespace wgflow {

/// Shortest round-trippable decimal representation.
std::string format_double(double v);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// One row per node: coordinates then value.
void write_grid_csv(const std::string& path, const GridDensity& grid);

}  // namespace wgflow
