#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "netctl/chains.hpp"
#include "netctl/graph.hpp"
#include "netctl/linctrl.hpp"
#include "netctl/matching.hpp"

namespace netctl {

struct AugmentationReport {
  std::string strategy;
  std::vector<NodeId> base_drivers;
  std::size_t m_star = 0;
  std::vector<NodeId> augmented_drivers;
  std::vector<NodeId> extra_inputs;
  double e_before = std::numeric_limits<double>::quiet_NaN();
  double e_after = std::numeric_limits<double>::quiet_NaN();
  double ratio = std::numeric_limits<double>::quiet_NaN();
  double c_w_before = std::numeric_limits<double>::infinity();
  double c_w_after = std::numeric_limits<double>::infinity();
  bool before_uncontrollable = false;
  bool practically_controllable = false;
  /// Condition number after each greedy step, starting with the base set.
  std::vector<double> c_w_history;
  /// Set when e_after exceeds e_before beyond round-off.
  bool monotonicity_violated = false;

  nlohmann::json to_json() const;
};

struct AugmentOptions {
  double cw_threshold = kDefaultConditionThreshold;
  /// Numerical rank cut on lambda_min / lambda_max.
  double rank_tolerance = 1e-13;
  /// Seed for the random x0, xf used to report energies.
  std::uint64_t seed = 1;
};

/// Greedy null-direction augmentation of the base driver set.
AugmentationReport augment_uncontrollable(const DirectedNetwork& net,
                                          std::span<const NodeId> base_drivers,
                                          double t_f, const AugmentOptions& options = {});
AugmentationReport augment_uncontrollable(const DirectedNetwork& net,
                                          const MatchingResult& matching, double t_f,
                                          const AugmentOptions& options = {});

enum class Placement { Mid, End, Random };

Placement parse_placement(const std::string& name);
const char* placement_name(Placement p);

/// Redundant input nodes, ascending, never overlapping the drivers.
std::vector<NodeId> place_redundant(const DirectedNetwork& net,
                                    std::span<const NodeId> drivers,
                                    const ChainProfile& profile, Placement strategy,
                                    std::size_t count_for_random = 0,
                                    std::uint64_t seed = 0);

/// Energy with B(drivers) against B(drivers + extras) for the same transfer.
AugmentationReport reduction_report(const DirectedNetwork& net,
                                    std::span<const NodeId> drivers,
                                    std::span<const NodeId> extras, double t_f,
                                    const Eigen::VectorXd& x0, const Eigen::VectorXd& xf,
                                    double cw_threshold = kDefaultConditionThreshold);

struct StrategyComparison {
  std::size_t d_c = 0;
  double energy = std::numeric_limits<double>::quiet_NaN();
  std::size_t mid_count = 0, end_count = 0;
  double mid_ratio = std::numeric_limits<double>::quiet_NaN();
  double end_ratio = std::numeric_limits<double>::quiet_NaN();
  /// Mean ratio over the random placements with the same input count.
  double random_mid_ratio = std::numeric_limits<double>::quiet_NaN();
  double random_end_ratio = std::numeric_limits<double>::quiet_NaN();
};

StrategyComparison compare_strategies(const DirectedNetwork& net,
                                      std::span<const NodeId> drivers, double t_f,
                                      const Eigen::VectorXd& x0, const Eigen::VectorXd& xf,
                                      std::uint64_t seed, std::size_t random_repeats = 10);

/// One row of the per-network summary table: {name, N, ND, Mstar, nD, nDstar, Estar, Mmid, Emid,
/// Mend, Eend, DC}.
nlohmann::json table_row(const std::string& name, const DirectedNetwork& net, double t_f,
                         const AugmentOptions& options = {});

}  // namespace netctl
