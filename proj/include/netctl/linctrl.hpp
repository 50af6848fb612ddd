#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "netctl/matching.hpp"
#include "netctl/rng.hpp"

namespace netctl {

inline constexpr double kDefaultConditionThreshold = 1e12;
inline constexpr double kDefaultStateErrorThreshold = 1e-4;
inline constexpr std::size_t kDefaultGridIntervals = 1000;

/// Pade-13 scaling and squaring.
Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& m);

enum class GramianMethod { BlockExponential, Quadrature };

/// W = int_0^tf e^{At} B B^T e^{A^T t} dt.
Eigen::MatrixXd gramian(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                        double t_f,
                        GramianMethod method = GramianMethod::BlockExponential);
Eigen::MatrixXd gramian(const Eigen::MatrixXd& a, const ControlMatrix& b,
                        double t_f,
                        GramianMethod method = GramianMethod::BlockExponential);

/// Largest entrywise gap |W1_ij - W2_ij| / sqrt(W_ii W_jj), with the diagonal
/// taken from w1.
double gramian_discrepancy(const Eigen::MatrixXd& w1, const Eigen::MatrixXd& w2);

/// lambda_max / lambda_min, +inf when lambda_min <= 1e-300.
double condition_number(const Eigen::MatrixXd& w);

struct ControlProblem {
  Eigen::MatrixXd a;
  ControlMatrix b;
  Eigen::VectorXd x0;
  Eigen::VectorXd xf;
  double t_f = 1.0;

  void validate() const;
};

struct ControlOutcome {
  Eigen::MatrixXd w;
  double c_w = std::numeric_limits<double>::infinity();
  double energy = std::numeric_limits<double>::quiet_NaN();
  /// Simpson estimate of int u^T u dt from u_samples.
  double energy_quadrature = std::numeric_limits<double>::quiet_NaN();
  double e_x = std::numeric_limits<double>::quiet_NaN();
  bool controllable = false;
  bool used_pseudo_inverse = false;
  /// Solution of W z = v; u(t) = B^T e^{A^T (tf - t)} z.
  Eigen::VectorXd z;
  std::vector<double> times;
  /// One column per grid time, one row per input.
  Eigen::MatrixXd u_samples;
  /// Filled by simulate_control, one column per grid time.
  Eigen::MatrixXd x_samples;
  Eigen::VectorXd x_final;
};

struct ControlOptions {
  double cw_threshold = kDefaultConditionThreshold;
  std::size_t grid_intervals = kDefaultGridIntervals;
};

/// Throws UncontrollableError when W is singular.
ControlOutcome minimum_energy(const ControlProblem& p,
                              const ControlOptions& options = {});

enum class Integrator {
  /// Propagates state and costate together with the exact flow of the
  /// Hamiltonian system, so the only error left is round-off.
  Costate,
  /// Exact discretisation with the input held at the mean of the two
  /// endpoint samples of each interval.
  ZeroOrderHold,
};

ControlOutcome simulate_control(const ControlProblem& p, ControlOutcome outcome,
                                std::size_t steps = kDefaultGridIntervals,
                                Integrator integrator = Integrator::Costate);

struct OracleEnergy {
  double energy = 0;
  bool rank_deficient = false;
};

/// Least-norm piecewise-constant input on k_steps intervals.
OracleEnergy oracle_energy(const ControlProblem& p, std::size_t k_steps);

enum class ChainDirection { Unidirectional, Bidirectional };

/// Adjacency of a chain of l nodes driven at node 0. The unidirectional chain
/// points 0 -> 1 -> ... -> l-1.
Eigen::MatrixXd chain_matrix(std::size_t l, ChainDirection direction);

struct ChainAnalytics {
  std::size_t l = 0;
  double t_f = 1.0;
  ChainDirection direction = ChainDirection::Unidirectional;
  double e_l = 0;
  double lambda_h_min = 0;
  double c_w = 0;
  /// (l+1) (l!)^2 / t_f^{2l}
  double bound = 0;
  /// 2 cos(pi i / (l+1)), i = 1..l, descending.
  std::vector<double> eigenvalues;
  /// eigenvectors(j-1, i-1) = sqrt(2/(l+1)) sin(pi i j / (l+1)).
  Eigen::MatrixXd eigenvectors;
};

/// Energy to steer the far end e_{l} of the chain to the origin from a
/// single input at the head.
ChainAnalytics chain_energy(std::size_t l, double t_f, ChainDirection direction);

/// Smallest eigenvalue of H = e^{-A tf} W e^{-A^T tf}.
double h_matrix_min_eigenvalue(const Eigen::MatrixXd& a, const Eigen::MatrixXd& w,
                               double t_f);

/// Unit-norm vector with i.i.d. standard normal direction.
Eigen::VectorXd random_unit_vector(std::size_t n, Rng& rng);

nlohmann::json to_json(const ControlOutcome& outcome);
nlohmann::json to_json(const ChainAnalytics& chain);

}  // namespace netctl
