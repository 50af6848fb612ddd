#include "netctl/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "netctl/errors.hpp"
#include "netctl/rng.hpp"

namespace netctl {

namespace {

void build_csr(std::size_t n, const std::vector<Edge>& edges, bool outgoing,
               std::vector<std::size_t>& offsets, std::vector<NodeId>& items) {
  offsets.assign(n + 1, 0);
  for (const Edge& e : edges) ++offsets[(outgoing ? e.src : e.dst) + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  items.resize(edges.size());
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  for (const Edge& e : edges) {
    const NodeId key = outgoing ? e.src : e.dst;
    items[cursor[key]++] = outgoing ? e.dst : e.src;
  }
  for (std::size_t v = 0; v < n; ++v) {
    std::sort(items.begin() + static_cast<std::ptrdiff_t>(offsets[v]),
              items.begin() + static_cast<std::ptrdiff_t>(offsets[v + 1]));
  }
}

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ParameterError(std::string(name) + " must lie in [0, 1]");
  }
}

// Orients undirected pairs using degrees fixed before any edge is oriented.
std::vector<Edge> orient_by_degree(std::size_t n,
                                   const std::vector<Edge>& undirected,
                                   double p_b, Rng& rng) {
  std::vector<std::size_t> degree(n, 0);
  for (const Edge& e : undirected) {
    ++degree[e.src];
    ++degree[e.dst];
  }
  std::vector<Edge> directed;
  directed.reserve(undirected.size());
  for (const Edge& e : undirected) {
    const double draw = rng.uniform();
    if (degree[e.src] == degree[e.dst]) {
      directed.push_back(draw < 0.5 ? Edge{e.src, e.dst} : Edge{e.dst, e.src});
      continue;
    }
    const bool src_low = degree[e.src] < degree[e.dst];
    const NodeId low = src_low ? e.src : e.dst;
    const NodeId high = src_low ? e.dst : e.src;
    directed.push_back(draw < p_b ? Edge{high, low} : Edge{low, high});
  }
  return directed;
}

}  // namespace

DirectedNetwork::DirectedNetwork(std::size_t n, std::vector<Edge> edges,
                                 std::vector<double> weights, NetworkMeta meta)
    : n_(n),
      edges_(std::move(edges)),
      weights_(std::move(weights)),
      meta_(std::move(meta)) {
  if (weights_.empty()) weights_.assign(edges_.size(), 1.0);
  if (weights_.size() != edges_.size()) {
    throw ParameterError("weights must match edges in length");
  }
  for (const Edge& e : edges_) {
    if (e.src >= n_ || e.dst >= n_) {
      throw ParameterError("edge (" + std::to_string(e.src) + "," +
                           std::to_string(e.dst) + ") outside node range " +
                           std::to_string(n_));
    }
  }
  std::vector<Edge> sorted = edges_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ParameterError("duplicate edge");
  }
  build_csr(n_, edges_, true, out_offsets_, out_targets_);
  build_csr(n_, edges_, false, in_offsets_, in_sources_);
}

std::span<const NodeId> DirectedNetwork::successors(NodeId u) const {
  return {out_targets_.data() + out_offsets_[u],
          out_offsets_[u + 1] - out_offsets_[u]};
}

std::span<const NodeId> DirectedNetwork::predecessors(NodeId v) const {
  return {in_sources_.data() + in_offsets_[v],
          in_offsets_[v + 1] - in_offsets_[v]};
}

bool DirectedNetwork::has_edge(NodeId src, NodeId dst) const {
  if (src >= n_ || dst >= n_) return false;
  const auto succ = successors(src);
  return std::binary_search(succ.begin(), succ.end(), dst);
}

bool DirectedNetwork::has_self_loops() const {
  return std::any_of(edges_.begin(), edges_.end(),
                     [](const Edge& e) { return e.src == e.dst; });
}

Eigen::MatrixXd DirectedNetwork::system_matrix() const {
  const auto n = static_cast<Eigen::Index>(n_);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    a(static_cast<Eigen::Index>(edges_[k].dst),
      static_cast<Eigen::Index>(edges_[k].src)) = weights_[k];
  }
  return a;
}

DirectedNetwork generate_er(std::size_t n, double avg_k, double p_b,
                            std::uint64_t seed) {
  if (n < 2) throw ParameterError("ER generator needs n >= 2");
  if (!(avg_k > 0.0 && avg_k < static_cast<double>(n - 1))) {
    throw ParameterError("ER average degree must lie in (0, n-1)");
  }
  check_probability(p_b, "p_b");
  Rng rng(seed);
  const double p = avg_k / static_cast<double>(n - 1);
  std::vector<Edge> undirected;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      if (rng.bernoulli(p)) undirected.push_back({i, j});
    }
  }
  NetworkMeta meta{"er", avg_k, p_b, std::numeric_limits<double>::quiet_NaN(),
                   seed};
  return DirectedNetwork(n, orient_by_degree(n, undirected, p_b, rng), {},
                         std::move(meta));
}

DirectedNetwork generate_ba(std::size_t n, std::size_t m_attach, double p_b,
                            std::uint64_t seed) {
  if (m_attach < 1 || m_attach + 1 >= n) {
    throw ParameterError("BA generator needs n > m_attach + 1 and m_attach >= 1");
  }
  check_probability(p_b, "p_b");
  Rng rng(seed);
  std::vector<Edge> undirected;
  // Each endpoint appears once per incident edge, so a uniform pick from this
  // list is a degree-proportional pick.
  std::vector<NodeId> endpoints;
  const std::size_t core = m_attach + 1;
  for (NodeId i = 0; i < core; ++i) {
    for (NodeId j = i + 1; j < core; ++j) {
      undirected.push_back({i, j});
      endpoints.push_back(i);
      endpoints.push_back(j);
    }
  }
  std::vector<NodeId> targets;
  for (NodeId v = core; v < n; ++v) {
    targets.clear();
    while (targets.size() < m_attach) {
      const NodeId t = endpoints[rng.below(endpoints.size())];
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) {
        targets.push_back(t);
      }
    }
    for (NodeId t : targets) {
      undirected.push_back({t, v});
      endpoints.push_back(t);
      endpoints.push_back(v);
    }
  }
  NetworkMeta meta{"ba", 2.0 * static_cast<double>(m_attach), p_b, 3.0, seed};
  return DirectedNetwork(n, orient_by_degree(n, undirected, p_b, rng), {},
                         std::move(meta));
}

EdgeListLoad load_edge_list(std::istream& in, bool drop_self_loops) {
  std::vector<Edge> edges;
  std::size_t line_no = 0;
  std::size_t self_loops = 0;
  NodeId max_id = 0;
  std::string line;
  auto parse_id = [&](const std::string& token) -> NodeId {
    if (token.empty() || token[0] == '-') {
      throw ParseError("negative or empty node id '" + token + "'", line_no);
    }
    if (!std::all_of(token.begin(), token.end(),
                     [](char c) { return c >= '0' && c <= '9'; })) {
      throw ParseError("non-integer token '" + token + "'", line_no);
    }
    try {
      return static_cast<NodeId>(std::stoull(token));
    } catch (const std::out_of_range&) {
      throw ParseError("node id out of range '" + token + "'", line_no);
    }
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream tokens(line);
    std::string a, b, extra;
    tokens >> a >> b;
    if (b.empty()) throw ParseError("expected 'src dst'", line_no);
    if (tokens >> extra) {
      throw ParseError("unexpected token '" + extra + "'", line_no);
    }
    const Edge e{parse_id(a), parse_id(b)};
    max_id = std::max({max_id, e.src, e.dst});
    if (e.src == e.dst && drop_self_loops) {
      ++self_loops;
      continue;
    }
    edges.push_back(e);
  }
  if (edges.empty() && self_loops == 0) {
    throw ParseError("empty edge list", line_no);
  }
  // Keep first occurrence order, drop later repeats.
  std::vector<Edge> unique;
  unique.reserve(edges.size());
  std::vector<Edge> seen = edges;
  std::sort(seen.begin(), seen.end());
  seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
  std::vector<bool> taken(seen.size(), false);
  for (const Edge& e : edges) {
    const auto idx = static_cast<std::size_t>(
        std::lower_bound(seen.begin(), seen.end(), e) - seen.begin());
    if (!taken[idx]) {
      taken[idx] = true;
      unique.push_back(e);
    }
  }
  const std::size_t duplicates = edges.size() - unique.size();
  NetworkMeta meta;
  meta.generator = "edge-list";
  return {DirectedNetwork(max_id + 1, std::move(unique), {}, std::move(meta)),
          duplicates, self_loops};
}

std::string to_edge_list(const DirectedNetwork& net) {
  std::ostringstream out;
  for (const Edge& e : net.edges()) out << e.src << ' ' << e.dst << '\n';
  return out.str();
}

nlohmann::json to_json(const DirectedNetwork& net) {
  nlohmann::json edges = nlohmann::json::array();
  for (const Edge& e : net.edges()) edges.push_back({e.src, e.dst});
  nlohmann::json j;
  j["n"] = net.node_count();
  j["edges"] = std::move(edges);
  const auto& w = net.weights();
  if (std::any_of(w.begin(), w.end(), [](double x) { return x != 1.0; })) {
    j["weights"] = w;
  }
  nlohmann::json meta;
  const NetworkMeta& m = net.meta();
  meta["generator"] = m.generator;
  if (!std::isnan(m.avg_k)) meta["avg_k"] = m.avg_k;
  if (!std::isnan(m.p_b)) meta["p_b"] = m.p_b;
  if (!std::isnan(m.gamma)) meta["gamma"] = m.gamma;
  if (m.seed) meta["seed"] = *m.seed;
  j["meta"] = std::move(meta);
  return j;
}

DirectedNetwork network_from_json(const nlohmann::json& j) {
  try {
    const auto n = j.at("n").get<std::size_t>();
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) {
        throw ParameterError("edge entries must be [src, dst]");
      }
      edges.push_back({e[0].get<NodeId>(), e[1].get<NodeId>()});
    }
    std::vector<double> weights;
    if (j.contains("weights")) weights = j["weights"].get<std::vector<double>>();
    NetworkMeta meta;
    if (j.contains("meta")) {
      const auto& m = j["meta"];
      meta.generator = m.value("generator", std::string("none"));
      if (m.contains("avg_k")) meta.avg_k = m["avg_k"].get<double>();
      if (m.contains("p_b")) meta.p_b = m["p_b"].get<double>();
      if (m.contains("gamma")) meta.gamma = m["gamma"].get<double>();
      if (m.contains("seed")) meta.seed = m["seed"].get<std::uint64_t>();
    }
    return DirectedNetwork(n, std::move(edges), std::move(weights),
                           std::move(meta));
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("malformed graph JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Degree distributions

DegreeModel DegreeModel::power_law(double gamma, double lambda, double k_min,
                                   double k_max) {
  if (!(gamma > 2.0)) {
    throw DomainError("degree exponent must exceed 2");
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ParameterError("orientation bias must lie in [0, 1]");
  }
  if (!(k_min >= 1.0) || !(k_max > k_min)) {
    throw ParameterError("degree cutoffs need 1 <= k_min < k_max");
  }
  const double tail = std::isinf(k_max) ? 0.0 : std::pow(k_max, 1.0 - gamma);
  const double c = (gamma - 1.0) / (std::pow(k_min, 1.0 - gamma) - tail);
  return {gamma, lambda, k_min, k_max, c};
}

double DegreeModel::mean_degree() const {
  const double tail = std::isinf(k_max) ? 0.0 : std::pow(k_max, 2.0 - gamma);
  return c_norm * (std::pow(k_min, 2.0 - gamma) - tail) / (gamma - 2.0);
}

double DegreeModel::larger_neighbour_scale() const {
  return c_norm / (mean_degree() * (gamma - 2.0));
}

double DegreeModel::directed_degree(double k, DegreeSide side) const {
  const double k_large = larger_neighbour_scale() * std::pow(k, 3.0 - gamma);
  // Zero weights are skipped so that k = inf does not produce 0 * inf.
  auto term = [](double w, double x) { return w == 0.0 ? 0.0 : w * x; };
  if (side == DegreeSide::Out) {
    return term(1.0 - 2.0 * lambda, k_large) + term(lambda, k);
  }
  return term(1.0 - lambda, k) + term(2.0 * lambda - 1.0, k_large);
}

double DegreeModel::undirected_pdf(double k) const {
  if (k < k_min || k > k_max) return 0.0;
  return c_norm * std::pow(k, -gamma);
}

namespace {

double directed_degree_slope(const DegreeModel& m, double k, DegreeSide side) {
  const double a = m.larger_neighbour_scale();
  const double d_large = a * (3.0 - m.gamma) * std::pow(k, 2.0 - m.gamma);
  if (side == DegreeSide::Out) {
    return (1.0 - 2.0 * m.lambda) * d_large + m.lambda;
  }
  return (1.0 - m.lambda) + (2.0 * m.lambda - 1.0) * d_large;
}

// Root of f(k) = target on [lo, hi] where f is monotone and brackets it.
double invert_monotone(const DegreeModel& m, DegreeSide side, double target,
                       double lo, double hi) {
  const bool rising = m.directed_degree(hi, side) > m.directed_degree(lo, side);
  for (int it = 0; it < 400 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if ((m.directed_degree(mid, side) < target) == rising) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Stand-in for an unbounded degree cutoff; the density there is negligible.
constexpr double kDegreeCap = 1e15;

}  // namespace

double numeric_degree_pdf(const DegreeModel& model, double k,
                          DegreeSide side) {
  if (!(model.gamma > 2.0)) throw DomainError("degree exponent must exceed 2");
  // f' = alpha k^(2-gamma) + beta changes sign at most once, so split the
  // support into monotone pieces and sum P(k)/|f'| over all preimages.
  std::vector<double> cuts{model.k_min};
  const double a = model.larger_neighbour_scale();
  const double coeff = (side == DegreeSide::Out ? 1.0 - 2.0 * model.lambda
                                                : 2.0 * model.lambda - 1.0) *
                       a * (3.0 - model.gamma);
  const double beta = side == DegreeSide::Out ? model.lambda
                                              : 1.0 - model.lambda;
  if (coeff != 0.0 && beta != 0.0 && -beta / coeff > 0.0) {
    const double turn = std::pow(-beta / coeff, 1.0 / (2.0 - model.gamma));
    if (turn > model.k_min && turn < std::min(model.k_max, kDegreeCap)) {
      cuts.push_back(turn);
    }
  }
  cuts.push_back(std::min(model.k_max, kDegreeCap));
  double density = 0.0;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double lo = cuts[s];
    const double hi = cuts[s + 1];
    const double f_lo = model.directed_degree(lo, side);
    const double f_hi = model.directed_degree(hi, side);
    if (f_lo == f_hi) continue;
    if (k < std::min(f_lo, f_hi) || k > std::max(f_lo, f_hi)) continue;
    const double root = invert_monotone(model, side, k, lo, hi);
    const double slope = std::abs(directed_degree_slope(model, root, side));
    if (slope == 0.0) continue;
    density += model.undirected_pdf(root) / slope;
  }
  return density;
}

double analytic_degree_pdf(const DegreeModel& model, double k,
                           DegreeSide side) {
  if (!(model.gamma > 2.0)) throw DomainError("degree exponent must exceed 2");
  const double gamma = model.gamma;
  const double lambda = model.lambda;
  const double c = model.c_norm;

  if (lambda == 0.5) {
    if (k < model.k_min / 2.0 || k > model.k_max / 2.0) return 0.0;
    return std::pow(2.0, 1.0 - gamma) * c * std::pow(k, -gamma);
  }
  if (gamma == 3.0) {
    const double a = model.larger_neighbour_scale();
    const double share = side == DegreeSide::Out ? lambda : 1.0 - lambda;
    if (share == 0.0) {
      throw DomainError("directed degree is constant for this model");
    }
    const double lo = model.directed_degree(model.k_min, side);
    const double hi = model.directed_degree(model.k_max, side);
    if (k < lo || k > hi) return 0.0;
    const double shift = side == DegreeSide::Out ? (2.0 * lambda - 1.0) * a
                                                 : (1.0 - 2.0 * lambda) * a;
    return c * std::pow(share, gamma - 1.0) * std::pow(k + shift, -gamma);
  }
  const bool pure_large = (lambda == 0.0 && side == DegreeSide::Out) ||
                          (lambda == 1.0 && side == DegreeSide::In);
  if (pure_large) {
    // Directed degree is A k^(3-gamma) alone.
    const double a = model.larger_neighbour_scale();
    const double e1 = model.directed_degree(model.k_min, side);
    const double e2 = model.directed_degree(model.k_max, side);
    if (k < std::min(e1, e2) || k > std::max(e1, e2)) return 0.0;
    const double three = 3.0 - gamma;
    return c / std::abs(three) * std::pow(a, (gamma - 1.0) / three) *
           std::pow(k, 2.0 / (gamma - 3.0));
  }
  return numeric_degree_pdf(model, k, side);
}

}  // namespace netctl
