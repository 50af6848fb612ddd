#include "netctl/circuit.hpp"

#include <cmath>
#include <string>

#include "netctl/errors.hpp"
#include "netctl/linctrl.hpp"
#include "netctl/quadrature.hpp"
#include "netctl/rng.hpp"

namespace netctl {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

void check_ladder(std::size_t l, double r, double c) {
  if (l < 1) throw ParameterError("ladder needs at least one stage");
  if (!(r > 0) || !(c > 0)) throw ParameterError("R and C must be positive");
}

}  // namespace

CircuitSystem build_circuit(std::size_t l, double r, double c) {
  check_ladder(l, r, c);
  const double k = 1.0 / (r * c);
  const Index n = static_cast<Index>(l);
  MatrixXd a = MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    a(i, i) = i + 1 < n ? -2.0 * k : -k;
    if (i + 1 < n) {
      a(i, i + 1) = k;
      a(i + 1, i) = k;
    }
  }
  return {a, ControlMatrix{l, {{0, k}}}};
}

ControlMatrix circuit_inputs(const RcLadder& ladder) {
  ControlMatrix b = build_circuit(ladder.l, ladder.r, ladder.c).b;
  for (std::size_t node : ladder.injections) {
    if (node < 1 || node > ladder.l) {
      throw ParameterError("injection stage " + std::to_string(node) + " outside 1.." +
                           std::to_string(ladder.l));
    }
    b.columns.push_back({node - 1, 1.0 / ladder.c});
  }
  return b;
}

ControlMatrix inject_current(const RcLadder& ladder, std::size_t node) {
  RcLadder extended = ladder;
  extended.injections.push_back(node);
  return circuit_inputs(extended);
}

double dissipated_energy(const RcLadder& ladder, const VectorXd& source,
                         const MatrixXd& states, double h) {
  check_ladder(ladder.l, ladder.r, ladder.c);
  if (states.cols() != source.size()) throw DimensionError("source and state grids differ");
  if (states.rows() != static_cast<Index>(ladder.l)) throw DimensionError("state rows differ from stage count");
  std::vector<double> power(static_cast<std::size_t>(source.size()));
  for (Index k = 0; k < source.size(); ++k) {
    power[static_cast<std::size_t>(k)] = source(k) * (source(k) - states(0, k)) / ladder.r;
  }
  return simpson(power, h);
}

nlohmann::json CircuitReport::to_json() const {
  return {{"L", ladder.l},
          {"R", ladder.r},
          {"C", ladder.c},
          {"tf", t_f},
          {"seed", seed},
          {"E_control", e_control},
          {"E_real", e_real},
          {"E_chain_equiv", e_chain_equiv},
          {"injections", injections},
          {"ratios", ratios},
          {"duplicate_columns", duplicate_columns}};
}

CircuitReport circuit_report(const RcLadder& ladder, double t_f, std::uint64_t seed,
                             std::size_t steps) {
  const CircuitSystem sys = build_circuit(ladder.l, ladder.r, ladder.c);
  CircuitReport rep;
  rep.ladder = ladder;
  rep.t_f = t_f;
  rep.seed = seed;
  Rng rng(seed);
  ControlProblem p;
  p.a = sys.a;
  p.b = sys.b;
  p.x0 = VectorXd::Zero(static_cast<Index>(ladder.l));
  p.xf = random_unit_vector(ladder.l, rng);
  p.t_f = t_f;

  const ControlOutcome sim = simulate_control(p, minimum_energy(p, {kDefaultConditionThreshold, steps}), steps);
  rep.e_control = sim.energy;
  // The source voltage U is the control input itself.
  rep.e_real = dissipated_energy(ladder, sim.u_samples.row(0).transpose(), sim.x_samples,
                                 t_f / static_cast<double>(steps));

  ControlProblem chain = p;
  chain.a = chain_matrix(ladder.l, ChainDirection::Unidirectional);
  chain.b = ControlMatrix::from_nodes(ladder.l, std::vector<NodeId>{0});
  rep.e_chain_equiv = minimum_energy(chain, {kDefaultConditionThreshold, 2}).energy;

  for (std::size_t node : ladder.injections) {
    ControlProblem q = p;
    RcLadder base = ladder;
    base.injections.clear();
    q.b = inject_current(base, node);
    rep.duplicate_columns = rep.duplicate_columns || q.b.has_duplicate_nodes();
    rep.injections.push_back(node);
    rep.ratios.push_back(minimum_energy(q, {kDefaultConditionThreshold, 2}).energy / rep.e_control);
  }
  return rep;
}

}  // namespace netctl
