#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "netctl/matching.hpp"

namespace netctl {

/// Cascade of l parallel R-C stages fed by a voltage source at stage 1.
struct RcLadder {
  std::size_t l = 1;
  double r = 1.0;
  double c = 1.0;
  /// 1-based stages that receive an extra current source.
  std::vector<std::size_t> injections;
};

struct CircuitSystem {
  Eigen::MatrixXd a;
  ControlMatrix b;
};

CircuitSystem build_circuit(std::size_t l, double r, double c);

/// Voltage-source column followed by a (1/c) column for every injection in
/// the ladder and then one for `node`.
ControlMatrix inject_current(const RcLadder& ladder, std::size_t node);

/// Input matrix of the ladder with all of its injections.
ControlMatrix circuit_inputs(const RcLadder& ladder);

/// int U (U - u_1) / R dt by Simpson. source holds U(t) on a uniform grid of
/// spacing h; states holds one column per grid time.
double dissipated_energy(const RcLadder& ladder, const Eigen::VectorXd& source,
                         const Eigen::MatrixXd& states, double h);

struct CircuitReport {
  RcLadder ladder;
  double t_f = 1.0;
  std::uint64_t seed = 0;
  double e_control = 0;
  double e_real = 0;
  double e_chain_equiv = 0;
  /// Control energy with one extra current source at each listed stage,
  /// divided by e_control.
  std::vector<std::size_t> injections;
  std::vector<double> ratios;
  bool duplicate_columns = false;

  nlohmann::json to_json() const;
};

/// Drives the ladder from rest to a random unit state, and compares with the
/// unidirectional chain of equal length on the same transfer.
CircuitReport circuit_report(const RcLadder& ladder, double t_f, std::uint64_t seed,
                             std::size_t steps = 1000);

}  // namespace netctl
