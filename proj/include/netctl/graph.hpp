#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace netctl {

using NodeId = std::size_t;

struct Edge {
  NodeId src;
  NodeId dst;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct NetworkMeta {
  std::string generator = "none";
  double avg_k = std::numeric_limits<double>::quiet_NaN();
  double p_b = std::numeric_limits<double>::quiet_NaN();
  double gamma = std::numeric_limits<double>::quiet_NaN();
  std::optional<std::uint64_t> seed;
};

/// Immutable directed network. Edge j->i with weight w contributes w to
/// entry (i, j) of the system matrix.
class DirectedNetwork {
 public:
  /// Validates node range and uniqueness. Weights default to 1.0.
  DirectedNetwork(std::size_t n, std::vector<Edge> edges,
                  std::vector<double> weights = {}, NetworkMeta meta = {});

  std::size_t node_count() const { return n_; }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<double>& weights() const { return weights_; }
  const NetworkMeta& meta() const { return meta_; }

  /// Out-neighbours of u in ascending order.
  std::span<const NodeId> successors(NodeId u) const;
  /// In-neighbours of v in ascending order.
  std::span<const NodeId> predecessors(NodeId v) const;

  bool has_edge(NodeId src, NodeId dst) const;
  bool has_self_loops() const;

  Eigen::MatrixXd system_matrix() const;

 private:
  std::size_t n_;
  std::vector<Edge> edges_;
  std::vector<double> weights_;
  NetworkMeta meta_;
  std::vector<std::size_t> out_offsets_, in_offsets_;
  std::vector<NodeId> out_targets_, in_sources_;
};

/// G(n, p) with p = avg_k/(n-1), oriented by the degree-bias rule: with
/// probability p_b an edge points from the higher- to the lower-degree end,
/// otherwise the reverse. Ties are oriented uniformly at random.
DirectedNetwork generate_er(std::size_t n, double avg_k, double p_b,
                            std::uint64_t seed);

/// Preferential attachment seeded by a clique on m_attach+1 nodes, then
/// oriented like generate_er.
DirectedNetwork generate_ba(std::size_t n, std::size_t m_attach, double p_b,
                            std::uint64_t seed);

struct EdgeListLoad {
  DirectedNetwork network;
  std::size_t duplicates_dropped = 0;
  std::size_t self_loops_dropped = 0;
};

EdgeListLoad load_edge_list(std::istream& in, bool drop_self_loops);

std::string to_edge_list(const DirectedNetwork& net);

nlohmann::json to_json(const DirectedNetwork& net);
DirectedNetwork network_from_json(const nlohmann::json& j);

// Degree distributions of a degree-biased orientation of an undirected
// network with P(k) = C k^-gamma on [k_min, k_max].

enum class DegreeSide { In, Out };

struct DegreeModel {
  double gamma;
  double lambda;
  double k_min;
  double k_max;
  double c_norm;

  /// Fills c_norm from the continuous normalisation. k_max may be infinite.
  static DegreeModel power_law(double gamma, double lambda, double k_min,
                               double k_max =
                                   std::numeric_limits<double>::infinity());

  double mean_degree() const;
  /// Prefactor of the larger-degree neighbour count k_L = A k^(3-gamma).
  double larger_neighbour_scale() const;
  /// Expected directed degree of a node with undirected degree k.
  double directed_degree(double k, DegreeSide side) const;
  double undirected_pdf(double k) const;
};

/// Density of k_in or k_out. Closed forms are used for lambda in {0, 0.5, 1}
/// and gamma = 3; every other case goes through numerical inversion.
double analytic_degree_pdf(const DegreeModel& model, double k,
                           DegreeSide side);

/// Change-of-variables route only, no closed forms.
double numeric_degree_pdf(const DegreeModel& model, double k, DegreeSide side);

}  // namespace netctl
