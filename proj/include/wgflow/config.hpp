#pragma once

#include <json.hpp>
#include <string>

#include "wgflow/filtering.hpp"
#include "wgflow/flow.hpp"

namespace wgflow {

using Json = nlohmann::ordered_json;

Json to_json(const Domain& d);
Domain domain_from_json(const Json& j);

Json to_json(const KernelSpec& k);
KernelSpec kernel_from_json(const Json& j);

Json to_json(const PotentialSpec& p);
PotentialSpec potential_from_json(const Json& j);

Json to_json(const FlowConfig& c);
/// Missing keys keep the supplied defaults.
FlowConfig flow_config_from_json(const Json& j, FlowConfig defaults = {});

Json to_json(const GridSolverConfig& c);
GridSolverConfig grid_config_from_json(const Json& j, GridSolverConfig defaults = {});

Json to_json(const FilterConfig& c);
FilterConfig filter_config_from_json(const Json& j, FilterConfig defaults = {});

Json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

}  // namespace wgflow
