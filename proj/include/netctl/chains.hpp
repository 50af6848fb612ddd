#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include <json.hpp>

#include "netctl/graph.hpp"

namespace netctl {

inline constexpr std::size_t kUnreachable = std::numeric_limits<std::size_t>::max();

/// Longest control chains measured from a driver set. Lengths count nodes,
/// so a driver has depth 1.
struct ChainProfile {
  std::size_t d_c = 0;
  std::size_t m = 0;
  std::vector<NodeId> end_nodes;
  /// One shortest driver-to-end path per end node, same order as end_nodes.
  std::vector<std::vector<NodeId>> lcc_paths;
  /// Number of distinct shortest driver-to-end paths, saturating at 2^63.
  double lcc_count = 0;
  /// kUnreachable for nodes no driver reaches.
  std::vector<std::size_t> per_node_depth;
  std::vector<NodeId> unreachable;
};

ChainProfile control_profile(const DirectedNetwork& net,
                             std::span<const NodeId> drivers);

/// Largest finite shortest-path distance in edges, 0 for edgeless graphs.
std::size_t topological_diameter(const DirectedNetwork& net);

nlohmann::json to_json(const ChainProfile& profile);

}  // namespace netctl
