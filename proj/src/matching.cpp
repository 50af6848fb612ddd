#include "netctl/matching.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <set>
#include <string>

#include "netctl/errors.hpp"

namespace netctl {

namespace {

constexpr std::size_t kInfinity = std::numeric_limits<std::size_t>::max();

class HopcroftKarp {
 public:
  explicit HopcroftKarp(const DirectedNetwork& net)
      : net_(net),
        n_(net.node_count()),
        match_out_(n_, kUnmatched),
        match_in_(n_, kUnmatched),
        layer_(n_, kInfinity),
        next_edge_(n_, 0) {}

  void run() {
    while (build_layers()) {
      std::fill(next_edge_.begin(), next_edge_.end(), 0);
      for (NodeId u = 0; u < n_; ++u) {
        if (match_out_[u] == kUnmatched) augment(u);
      }
    }
  }

  std::vector<NodeId>& match_out() { return match_out_; }
  std::vector<NodeId>& match_in() { return match_in_; }

 private:
  // Layers free left vertices at 0; returns whether a free right vertex is
  // reachable by an alternating path.
  bool build_layers() {
    std::deque<NodeId> queue;
    for (NodeId u = 0; u < n_; ++u) {
      if (match_out_[u] == kUnmatched) {
        layer_[u] = 0;
        queue.push_back(u);
      } else {
        layer_[u] = kInfinity;
      }
    }
    bool found = false;
    while (!queue.empty()) {
      const NodeId u = queue.front();
      queue.pop_front();
      for (NodeId v : net_.successors(u)) {
        const NodeId w = match_in_[v];
        if (w == kUnmatched) {
          found = true;
        } else if (layer_[w] == kInfinity) {
          layer_[w] = layer_[u] + 1;
          queue.push_back(w);
        }
      }
    }
    return found;
  }

  // Iterative DFS along the layered graph.
  bool augment(NodeId root) {
    std::vector<NodeId> stack{root};
    while (!stack.empty()) {
      const NodeId u = stack.back();
      const auto succ = net_.successors(u);
      bool advanced = false;
      while (next_edge_[u] < succ.size()) {
        const NodeId v = succ[next_edge_[u]];
        const NodeId w = match_in_[v];
        if (w == kUnmatched) {
          // Flip the path root .. u -> v.
          NodeId target = v;
          for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
            const NodeId left = *it;
            const NodeId previous = match_out_[left];
            match_out_[left] = target;
            match_in_[target] = left;
            target = previous;
          }
          return true;
        }
        if (layer_[w] == layer_[u] + 1) {
          stack.push_back(w);
          advanced = true;
          break;
        }
        ++next_edge_[u];
      }
      if (!advanced) {
        layer_[u] = kInfinity;
        stack.pop_back();
        if (!stack.empty()) ++next_edge_[stack.back()];
      }
    }
    return false;
  }

  const DirectedNetwork& net_;
  std::size_t n_;
  std::vector<NodeId> match_out_, match_in_;
  std::vector<std::size_t> layer_;
  std::vector<std::size_t> next_edge_;
};

}  // namespace

std::size_t MatchingResult::structural_driver_count() const {
  return std::max<std::size_t>(n - matched_edges.size(), 1);
}

MatchingResult maximum_matching(const DirectedNetwork& net) {
  const std::size_t n = net.node_count();
  if (n == 0) throw ParameterError("network has no nodes");
  HopcroftKarp hk(net);
  hk.run();

  MatchingResult r;
  r.n = n;
  r.match_out = std::move(hk.match_out());
  r.match_in = std::move(hk.match_in());
  for (NodeId u = 0; u < n; ++u) {
    if (r.match_out[u] != kUnmatched) r.matched_edges.push_back({u, r.match_out[u]});
  }
  for (const Edge& e : net.edges()) {
    if (r.match_out[e.src] != e.dst) r.non_path_edges.push_back(e);
  }

  std::vector<std::size_t> owner(n, kUnmatched);
  std::deque<NodeId> queue;
  auto claim = [&](NodeId v, std::size_t path) {
    owner[v] = path;
    r.csps[path].push_back(v);
    queue.push_back(v);
  };

  // Stems from every unmatched in-copy.
  for (NodeId d = 0; d < n; ++d) {
    if (r.match_in[d] != kUnmatched) continue;
    r.drivers.push_back(d);
    r.csps.emplace_back();
    r.csp_segments.push_back({0});
    for (NodeId v = d; v != kUnmatched; v = r.match_out[v]) {
      claim(v, r.csps.size() - 1);
    }
  }

  // Remaining nodes all sit on matched cycles. A cycle joins the path of the
  // first node that reaches it; unreached cycles get their own driver.
  auto attach_cycle = [&](NodeId entry, std::size_t path) {
    r.csp_segments[path].push_back(r.csps[path].size());
    NodeId v = entry;
    do {
      claim(v, path);
      v = r.match_out[v];
    } while (v != entry);
  };
  NodeId scan = 0;
  while (true) {
    while (!queue.empty()) {
      const NodeId u = queue.front();
      queue.pop_front();
      for (NodeId w : net.successors(u)) {
        if (owner[w] == kUnmatched) attach_cycle(w, owner[u]);
      }
    }
    while (scan < n && owner[scan] != kUnmatched) ++scan;
    if (scan == n) break;
    r.drivers.push_back(scan);
    r.csps.emplace_back();
    r.csp_segments.emplace_back();
    attach_cycle(scan, r.csps.size() - 1);
  }
  std::sort(r.drivers.begin(), r.drivers.end());
  return r;
}

const std::vector<std::vector<NodeId>>& control_signal_paths(
    const MatchingResult& r) {
  auto fail = [](const std::string& what) {
    throw InternalError("control-signal path invariant violated: " + what);
  };
  if (r.match_out.size() != r.n || r.match_in.size() != r.n) fail("sizes");
  if (r.csps.size() != r.csp_segments.size()) fail("segment table size");
  for (const Edge& e : r.matched_edges) {
    if (r.match_out[e.src] != e.dst || r.match_in[e.dst] != e.src) {
      fail("matched edge tables disagree");
    }
  }
  std::vector<bool> seen(r.n, false);
  std::set<NodeId> drivers(r.drivers.begin(), r.drivers.end());
  std::set<NodeId> heads;
  for (std::size_t p = 0; p < r.csps.size(); ++p) {
    const auto& path = r.csps[p];
    const auto& segs = r.csp_segments[p];
    if (path.empty() || segs.empty() || segs.front() != 0) fail("empty path");
    if (!drivers.contains(path.front())) fail("path head is not a driver");
    heads.insert(path.front());
    for (NodeId v : path) {
      if (v >= r.n || seen[v]) fail("nodes not partitioned");
      seen[v] = true;
    }
    for (std::size_t s = 0; s < segs.size(); ++s) {
      const std::size_t begin = segs[s];
      const std::size_t end = s + 1 < segs.size() ? segs[s + 1] : path.size();
      if (begin >= end || end > path.size()) fail("bad segment bounds");
      for (std::size_t i = begin; i + 1 < end; ++i) {
        if (r.match_out[path[i]] != path[i + 1]) fail("unmatched step");
      }
      const bool closes = r.match_out[path[end - 1]] == path[begin];
      const bool is_stem = s == 0 && r.match_in[path[0]] == kUnmatched;
      if (is_stem) {
        if (r.match_out[path[end - 1]] != kUnmatched) fail("stem cut short");
      } else if (!closes) {
        fail("cycle segment does not close");
      }
    }
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    fail("nodes not covered");
  }
  if (heads != drivers) fail("driver without a path");
  if (r.drivers.size() < r.structural_driver_count()) fail("too few drivers");
  return r.csps;
}

nlohmann::json to_json(const MatchingResult& r) {
  nlohmann::json matched = nlohmann::json::array();
  for (const Edge& e : r.matched_edges) matched.push_back({e.src, e.dst});
  return {{"drivers", r.drivers},
          {"csps", r.csps},
          {"matched", std::move(matched)},
          {"n", r.n},
          {"n_d", r.driver_density()}};
}

std::vector<NodeId> ControlMatrix::input_nodes() const {
  std::vector<NodeId> nodes;
  nodes.reserve(columns.size());
  for (const auto& c : columns) nodes.push_back(c.node);
  return nodes;
}

bool ControlMatrix::has_duplicate_nodes() const {
  auto nodes = input_nodes();
  std::sort(nodes.begin(), nodes.end());
  return std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end();
}

Eigen::MatrixXd ControlMatrix::dense() const {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                            static_cast<Eigen::Index>(columns.size()));
  for (std::size_t k = 0; k < columns.size(); ++k) {
    b(static_cast<Eigen::Index>(columns[k].node), static_cast<Eigen::Index>(k)) =
        columns[k].gain;
  }
  return b;
}

ControlMatrix ControlMatrix::from_nodes(std::size_t n,
                                        std::span<const NodeId> nodes) {
  ControlMatrix b{n, {}};
  for (NodeId v : nodes) {
    if (v >= n) throw ParameterError("input node " + std::to_string(v) +
                                     " outside state dimension");
    b.columns.push_back({v, 1.0});
  }
  if (b.columns.empty() || b.columns.size() > n) {
    throw ParameterError("control matrix needs between 1 and n columns");
  }
  if (b.has_duplicate_nodes()) throw ParameterError("duplicate input node");
  return b;
}

ControlMatrix control_matrix(const MatchingResult& result,
                             std::span<const NodeId> extra_inputs) {
  std::vector<NodeId> extras(extra_inputs.begin(), extra_inputs.end());
  std::sort(extras.begin(), extras.end());
  for (NodeId v : extras) {
    if (std::binary_search(result.drivers.begin(), result.drivers.end(), v)) {
      throw ParameterError("extra input " + std::to_string(v) +
                           " is already a driver");
    }
  }
  std::vector<NodeId> nodes = result.drivers;
  nodes.insert(nodes.end(), extras.begin(), extras.end());
  return ControlMatrix::from_nodes(result.n, nodes);
}

}  // namespace netctl
