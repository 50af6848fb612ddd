#include "netctl/chains.hpp"

#include <algorithm>
#include <string>

#include "netctl/errors.hpp"

namespace netctl {

ChainProfile control_profile(const DirectedNetwork& net,
                             std::span<const NodeId> drivers) {
  if (drivers.empty()) throw ParameterError("driver set is empty");
  const std::size_t n = net.node_count();
  ChainProfile p;
  p.per_node_depth.assign(n, kUnreachable);
  std::vector<NodeId> parent(n, n);
  std::vector<double> paths(n, 0.0);
  std::vector<NodeId> frontier;
  for (NodeId d : drivers) {
    if (d >= n) throw ParameterError("driver " + std::to_string(d) + " out of range");
    if (p.per_node_depth[d] == 1) continue;
    p.per_node_depth[d] = 1;
    paths[d] = 1.0;
    frontier.push_back(d);
  }
  std::sort(frontier.begin(), frontier.end());

  std::size_t depth = 1;
  while (!frontier.empty()) {
    std::vector<NodeId> next;
    for (NodeId u : frontier) {
      for (NodeId v : net.successors(u)) {
        if (p.per_node_depth[v] == kUnreachable) {
          p.per_node_depth[v] = depth + 1;
          parent[v] = u;
          next.push_back(v);
        }
        if (p.per_node_depth[v] == depth + 1) paths[v] += paths[u];
      }
    }
    if (!next.empty()) ++depth;
    std::sort(next.begin(), next.end());
    frontier = std::move(next);
  }

  p.d_c = depth;
  for (NodeId v = 0; v < n; ++v) {
    if (p.per_node_depth[v] == kUnreachable) {
      p.unreachable.push_back(v);
    } else if (p.per_node_depth[v] == depth) {
      p.end_nodes.push_back(v);
      p.lcc_count += paths[v];
      std::vector<NodeId> path;
      for (NodeId w = v; w != n; w = parent[w]) path.push_back(w);
      std::reverse(path.begin(), path.end());
      p.lcc_paths.push_back(std::move(path));
    }
  }
  p.m = p.end_nodes.size();
  return p;
}

std::size_t topological_diameter(const DirectedNetwork& net) {
  const std::size_t n = net.node_count();
  std::size_t best = 0;
  std::vector<std::size_t> dist(n);
  std::vector<NodeId> queue(n);
  for (NodeId s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), kUnreachable);
    dist[s] = 0;
    std::size_t head = 0, tail = 0;
    queue[tail++] = s;
    while (head < tail) {
      const NodeId u = queue[head++];
      for (NodeId v : net.successors(u)) {
        if (dist[v] == kUnreachable) {
          dist[v] = dist[u] + 1;
          best = std::max(best, dist[v]);
          queue[tail++] = v;
        }
      }
    }
  }
  return best;
}

nlohmann::json to_json(const ChainProfile& p) {
  nlohmann::json depths = nlohmann::json::array();
  for (std::size_t d : p.per_node_depth) {
    if (d == kUnreachable) depths.push_back(nullptr);
    else depths.push_back(d);
  }
  return {{"dc", p.d_c},
          {"m", p.m},
          {"end_nodes", p.end_nodes},
          {"lcc_count", p.lcc_count},
          {"lcc_paths", p.lcc_paths},
          {"unreachable", p.unreachable},
          {"depths", std::move(depths)}};
}

}  // namespace netctl
