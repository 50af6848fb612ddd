#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "netctl/graph.hpp"

namespace netctl {

inline constexpr std::size_t kUnmatched = static_cast<std::size_t>(-1);

/// Maximum matching of the out-copy/in-copy bipartite graph together with the
/// driver set and the decomposition of all nodes into control-signal paths.
struct MatchingResult {
  std::size_t n = 0;
  /// Matched edges sorted by source.
  std::vector<Edge> matched_edges;
  /// match_out[u] = v for matched u->v, kUnmatched otherwise.
  std::vector<NodeId> match_out;
  /// match_in[v] = u for matched u->v, kUnmatched otherwise.
  std::vector<NodeId> match_in;
  /// Ascending. Nodes with an unmatched in-copy, plus one node per matched
  /// cycle that no other path reaches.
  std::vector<NodeId> drivers;
  /// Each path starts at a driver. A path is a stem of matched edges followed
  /// by zero or more matched cycles entered through a non-path edge.
  std::vector<std::vector<NodeId>> csps;
  /// Offsets into each csp where a segment (stem or cycle) begins; first is 0.
  std::vector<std::vector<std::size_t>> csp_segments;
  std::vector<Edge> non_path_edges;

  /// max(n - |matching|, 1), the structural driver count.
  std::size_t structural_driver_count() const;
  double driver_density() const {
    return static_cast<double>(structural_driver_count()) /
           static_cast<double>(n);
  }
};

/// Hopcroft-Karp with neighbours scanned in ascending node order.
MatchingResult maximum_matching(const DirectedNetwork& net);

/// Validates the partition invariants and returns the paths.
/// Throws InternalError on any violation.
const std::vector<std::vector<NodeId>>& control_signal_paths(
    const MatchingResult& result);

nlohmann::json to_json(const MatchingResult& result);

struct InputColumn {
  NodeId node;
  double gain = 1.0;
};

/// Input matrix B described column by column; column k feeds `gain` into
/// `node`.
struct ControlMatrix {
  std::size_t n = 0;
  std::vector<InputColumn> columns;

  std::size_t input_count() const { return columns.size(); }
  std::vector<NodeId> input_nodes() const;
  bool has_duplicate_nodes() const;
  Eigen::MatrixXd dense() const;

  static ControlMatrix from_nodes(std::size_t n, std::span<const NodeId> nodes);
};

/// Drivers first, then extras, each ascending. Extras overlapping drivers are
/// rejected.
ControlMatrix control_matrix(const MatchingResult& result,
                             std::span<const NodeId> extra_inputs = {});

}  // namespace netctl
