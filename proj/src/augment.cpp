#include "netctl/augment.hpp"

#include <algorithm>
#include <cmath>

#include "netctl/errors.hpp"
#include "netctl/rng.hpp"

namespace netctl {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

nlohmann::json finite_or_null(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

struct EnergyResult {
  double energy = kNaN;
  double c_w = std::numeric_limits<double>::infinity();
  bool singular = false;
};

EnergyResult energy_with_inputs(const MatrixXd& a, std::span<const NodeId> inputs, double t_f,
                                const VectorXd& x0, const VectorXd& xf) {
  ControlProblem p;
  p.a = a;
  p.b = ControlMatrix::from_nodes(static_cast<std::size_t>(a.rows()), inputs);
  p.x0 = x0;
  p.xf = xf;
  p.t_f = t_f;
  EnergyResult r;
  try {
    const ControlOutcome out = minimum_energy(p, {kDefaultConditionThreshold, 2});
    r.energy = out.energy;
    r.c_w = out.c_w;
  } catch (const UncontrollableError&) {
    r.singular = true;
  }
  return r;
}

std::vector<NodeId> merged(std::span<const NodeId> a, std::span<const NodeId> b) {
  std::vector<NodeId> out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

nlohmann::json AugmentationReport::to_json() const {
  nlohmann::json history = nlohmann::json::array();
  for (double c : c_w_history) history.push_back(finite_or_null(c));
  return {{"strategy", strategy},
          {"base_drivers", base_drivers},
          {"m_star", m_star},
          {"augmented_drivers", augmented_drivers},
          {"extra_inputs", extra_inputs},
          {"e_before", finite_or_null(e_before)},
          {"e_after", finite_or_null(e_after)},
          {"ratio", finite_or_null(ratio)},
          {"c_w_before", finite_or_null(c_w_before)},
          {"c_w_after", finite_or_null(c_w_after)},
          {"before_uncontrollable", before_uncontrollable},
          {"practically_controllable", practically_controllable},
          {"c_w_history", std::move(history)}};
}

AugmentationReport augment_uncontrollable(const DirectedNetwork& net,
                                          std::span<const NodeId> base_drivers, double t_f,
                                          const AugmentOptions& options) {
  const std::size_t n = net.node_count();
  if (base_drivers.empty()) throw ParameterError("base driver set is empty");
  AugmentationReport rep;
  rep.strategy = "mstar";
  rep.base_drivers.assign(base_drivers.begin(), base_drivers.end());
  std::sort(rep.base_drivers.begin(), rep.base_drivers.end());
  std::vector<NodeId> inputs = rep.base_drivers;
  std::vector<bool> is_input(n, false);
  for (NodeId d : inputs) {
    if (d >= n) throw ParameterError("driver out of range");
    is_input[d] = true;
  }

  const MatrixXd a = net.system_matrix();
  for (std::size_t step = 0; step <= n; ++step) {
    const MatrixXd w = gramian(a, ControlMatrix::from_nodes(n, inputs), t_f);
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(w);
    const double lo = eig.eigenvalues()(0);
    const double hi = eig.eigenvalues()(eig.eigenvalues().size() - 1);
    const double c_w = condition_number(w);
    rep.c_w_history.push_back(c_w);
    const bool rank_deficient = !(lo / hi >= options.rank_tolerance);
    if (!rank_deficient || c_w < options.cw_threshold || inputs.size() == n) break;

    const VectorXd v = eig.eigenvectors().col(0).cwiseAbs();
    NodeId pick = n;
    for (NodeId i = 0; i < n; ++i) {
      if (!is_input[i] && (pick == n || v(static_cast<Eigen::Index>(i)) > v(static_cast<Eigen::Index>(pick)))) {
        pick = i;
      }
    }
    is_input[pick] = true;
    inputs.insert(std::upper_bound(inputs.begin(), inputs.end(), pick), pick);
    rep.extra_inputs.push_back(pick);
  }
  rep.m_star = rep.extra_inputs.size();
  rep.augmented_drivers = inputs;
  rep.c_w_before = rep.c_w_history.front();
  rep.c_w_after = rep.c_w_history.back();
  rep.practically_controllable = rep.c_w_after < options.cw_threshold;
  rep.before_uncontrollable = !(rep.c_w_before < options.cw_threshold);

  Rng rng(options.seed);
  const VectorXd x0 = random_unit_vector(n, rng);
  const VectorXd xf = random_unit_vector(n, rng);
  if (!rep.before_uncontrollable) {
    rep.e_before = energy_with_inputs(a, rep.base_drivers, t_f, x0, xf).energy;
  }
  if (rep.practically_controllable) {
    rep.e_after = energy_with_inputs(a, inputs, t_f, x0, xf).energy;
    rep.ratio = rep.e_after / rep.e_before;
  }
  return rep;
}

AugmentationReport augment_uncontrollable(const DirectedNetwork& net,
                                          const MatchingResult& matching, double t_f,
                                          const AugmentOptions& options) {
  return augment_uncontrollable(net, matching.drivers, t_f, options);
}

Placement parse_placement(const std::string& name) {
  if (name == "mid") return Placement::Mid;
  if (name == "end") return Placement::End;
  if (name == "random") return Placement::Random;
  throw ParameterError("unknown placement strategy '" + name + "'");
}

const char* placement_name(Placement p) {
  switch (p) {
    case Placement::Mid: return "mid";
    case Placement::End: return "end";
    case Placement::Random: return "random";
  }
  return "mid";
}

std::vector<NodeId> place_redundant(const DirectedNetwork& net,
                                    std::span<const NodeId> drivers,
                                    const ChainProfile& profile, Placement strategy,
                                    std::size_t count_for_random, std::uint64_t seed) {
  const std::size_t n = net.node_count();
  std::vector<bool> is_driver(n, false);
  for (NodeId d : drivers) {
    if (d >= n) throw ParameterError("driver out of range");
    is_driver[d] = true;
  }
  if (profile.per_node_depth.size() != n) throw ParameterError("profile does not match the network");
  std::vector<NodeId> out;
  switch (strategy) {
    case Placement::Mid: {
      // 1-based position ceil(d_c/2), but never the driver itself.
      const std::size_t pos = std::max<std::size_t>(2, (profile.d_c + 1) / 2);
      for (const auto& path : profile.lcc_paths) {
        if (path.size() >= pos && !is_driver[path[pos - 1]]) out.push_back(path[pos - 1]);
      }
      break;
    }
    case Placement::End:
      for (NodeId v : profile.end_nodes) {
        if (!is_driver[v]) out.push_back(v);
      }
      break;
    case Placement::Random: {
      std::vector<NodeId> pool;
      for (NodeId v = 0; v < n; ++v) {
        if (!is_driver[v]) pool.push_back(v);
      }
      if (count_for_random > pool.size()) {
        throw ParameterError("random placement asks for more nodes than non-drivers");
      }
      Rng rng(seed);
      for (std::size_t idx : rng.sample_without_replacement(pool.size(), count_for_random)) {
        out.push_back(pool[idx]);
      }
      break;
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

AugmentationReport reduction_report(const DirectedNetwork& net,
                                    std::span<const NodeId> drivers,
                                    std::span<const NodeId> extras, double t_f,
                                    const VectorXd& x0, const VectorXd& xf,
                                    double cw_threshold) {
  for (NodeId e : extras) {
    if (std::find(drivers.begin(), drivers.end(), e) != drivers.end()) {
      throw ParameterError("extra input " + std::to_string(e) + " is already a driver");
    }
  }
  const MatrixXd a = net.system_matrix();
  AugmentationReport rep;
  rep.strategy = "custom";
  rep.base_drivers.assign(drivers.begin(), drivers.end());
  std::sort(rep.base_drivers.begin(), rep.base_drivers.end());
  rep.extra_inputs.assign(extras.begin(), extras.end());
  std::sort(rep.extra_inputs.begin(), rep.extra_inputs.end());
  rep.augmented_drivers = merged(rep.base_drivers, rep.extra_inputs);

  const EnergyResult before = energy_with_inputs(a, rep.base_drivers, t_f, x0, xf);
  rep.e_before = before.energy;
  rep.c_w_before = before.c_w;
  rep.before_uncontrollable = before.singular;
  const EnergyResult after = extras.empty()
                                 ? before
                                 : energy_with_inputs(a, rep.augmented_drivers, t_f, x0, xf);
  rep.e_after = after.energy;
  rep.c_w_after = after.c_w;
  rep.c_w_history = {rep.c_w_before, rep.c_w_after};
  rep.practically_controllable = rep.c_w_after < cw_threshold;
  rep.ratio = rep.e_after / rep.e_before;
  rep.monotonicity_violated = rep.ratio > 1.0 + 1e-9;
  return rep;
}

StrategyComparison compare_strategies(const DirectedNetwork& net,
                                      std::span<const NodeId> drivers, double t_f,
                                      const VectorXd& x0, const VectorXd& xf,
                                      std::uint64_t seed, std::size_t random_repeats) {
  const ChainProfile profile = control_profile(net, drivers);
  StrategyComparison c;
  c.d_c = profile.d_c;
  const MatrixXd a = net.system_matrix();
  const EnergyResult base = energy_with_inputs(a, drivers, t_f, x0, xf);
  c.energy = base.energy;
  if (base.singular) return c;

  auto ratio_for = [&](std::span<const NodeId> extras) {
    return energy_with_inputs(a, merged(drivers, extras), t_f, x0, xf).energy / base.energy;
  };
  auto random_mean = [&](std::size_t count, std::uint64_t stream) {
    if (count == 0) return 1.0;
    double sum = 0;
    for (std::size_t r = 0; r < random_repeats; ++r) {
      const auto extras = place_redundant(net, drivers, profile, Placement::Random, count,
                                          derive_seed(stream, r));
      sum += ratio_for(extras);
    }
    return sum / static_cast<double>(random_repeats);
  };
  const auto mid = place_redundant(net, drivers, profile, Placement::Mid);
  const auto end = place_redundant(net, drivers, profile, Placement::End);
  c.mid_count = mid.size();
  c.end_count = end.size();
  c.mid_ratio = ratio_for(mid);
  c.end_ratio = ratio_for(end);
  c.random_mid_ratio = random_mean(mid.size(), mix64(seed));
  c.random_end_ratio = random_mean(end.size(), mix64(seed + 1));
  return c;
}

nlohmann::json table_row(const std::string& name, const DirectedNetwork& net, double t_f,
                         const AugmentOptions& options) {
  const std::size_t n = net.node_count();
  const MatchingResult matching = maximum_matching(net);
  const AugmentationReport mstar = augment_uncontrollable(net, matching, t_f, options);
  const auto& drivers = mstar.augmented_drivers;
  const ChainProfile profile = control_profile(net, drivers);

  Rng rng(options.seed);
  const VectorXd x0 = random_unit_vector(n, rng);
  const VectorXd xf = random_unit_vector(n, rng);
  const auto mid = place_redundant(net, drivers, profile, Placement::Mid);
  const auto end = place_redundant(net, drivers, profile, Placement::End);
  double e_mid = kNaN, e_end = kNaN;
  if (mstar.practically_controllable) {
    e_mid = reduction_report(net, drivers, mid, t_f, x0, xf).e_after;
    e_end = reduction_report(net, drivers, end, t_f, x0, xf).e_after;
  }
  const double nd = static_cast<double>(matching.drivers.size());
  return {{"name", name},
          {"N", n},
          {"ND", matching.drivers.size()},
          {"Mstar", mstar.m_star},
          {"nD", nd / static_cast<double>(n)},
          {"nDstar", static_cast<double>(drivers.size()) / static_cast<double>(n)},
          {"Estar", finite_or_null(mstar.e_after)},
          {"Mmid", mid.size()},
          {"Emid", finite_or_null(e_mid)},
          {"Mend", end.size()},
          {"Eend", finite_or_null(e_end)},
          {"DC", profile.d_c}};
}

}  // namespace netctl
