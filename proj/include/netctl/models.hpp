#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "netctl/graph.hpp"
#include "netctl/linctrl.hpp"

namespace netctl {

enum class GeneratorKind { ER, BA };

enum class TrialDepth {
  /// Matching only.
  Structure,
  /// Adds the Gramian and its condition number.
  Condition,
  /// Adds energy, simulated final-state error and chain statistics.
  Full,
};

struct EnsembleConfig {
  GeneratorKind model = GeneratorKind::ER;
  std::size_t n = 100;
  /// ER mean degree; BA uses m_attach = round(avg_k / 2).
  double avg_k = 6.0;
  double p_b = 0.1;
  double t_f = 1.0;
  std::size_t trials = 10000;
  std::uint64_t master_seed = 1;
  double cw_threshold = kDefaultConditionThreshold;
  TrialDepth depth = TrialDepth::Full;
  bool simulate = true;
  std::size_t grid_intervals = kDefaultGridIntervals;
  unsigned threads = 1;

  nlohmann::json to_json() const;
};

struct TrialRecord {
  std::uint64_t seed = 0;
  std::size_t n = 0;
  double avg_k = 0;
  double p_b = 0;
  double n_d = 0;
  std::size_t d_c = 0;
  std::size_t m = 0;
  double c_w = std::numeric_limits<double>::infinity();
  bool controllable = false;
  double energy = std::numeric_limits<double>::quiet_NaN();
  double e_x = std::numeric_limits<double>::quiet_NaN();
  std::size_t topo_diameter = 0;
};

DirectedNetwork generate_network(const EnsembleConfig& config, std::uint64_t seed);

TrialRecord run_trial(const EnsembleConfig& config, std::uint64_t seed);

/// Records come back in trial order whatever the thread count.
std::vector<TrialRecord> run_ensemble(const EnsembleConfig& config);

/// Fraction of records with c_w below the threshold.
double practical_fraction(std::span<const TrialRecord> records, double threshold);
double mean_driver_density(std::span<const TrialRecord> records);
/// Energies of records with c_w below the threshold.
std::vector<double> controllable_energies(std::span<const TrialRecord> records,
                                          double threshold);

inline constexpr const char* kTrialCsvHeader =
    "seed,n,avg_k,p_b,n_d,d_c,m,c_w,controllable,energy,e_x,topo_diameter";

void write_trials_csv(std::ostream& out, std::span<const TrialRecord> records);
std::vector<TrialRecord> read_trials_csv(std::istream& in);

enum class FitModel { PowerLaw, Exponential };

struct FitResult {
  FitModel model = FitModel::PowerLaw;
  /// Power law: exponent alpha. Exponential: y = prefactor * exp(-rate * x)
  /// for decays, or exp(+rate * x) for growth fits.
  double alpha = std::numeric_limits<double>::quiet_NaN();
  double prefactor = std::numeric_limits<double>::quiet_NaN();
  double rate = std::numeric_limits<double>::quiet_NaN();
  double x_min = std::numeric_limits<double>::quiet_NaN();
  double x_max = std::numeric_limits<double>::quiet_NaN();
  /// KS distance for power laws, R^2 for exponential fits.
  double goodness = std::numeric_limits<double>::quiet_NaN();
  std::size_t n_samples = 0;
  std::size_t n_tail = 0;
  bool valid = false;

  nlohmann::json to_json() const;
};

/// Continuous MLE with x_min chosen by KS minimisation; needs 30 tail samples.
FitResult fit_power_law(std::span<const double> samples,
                        std::size_t min_tail = 30);

/// Least-squares fit of ln P(v) against v from the mode upward.
FitResult fit_exponential(std::span<const std::size_t> samples);

/// E_L = A exp(B L) fitted to unidirectional chain energies on [l_min, l_max].
FitResult fit_chain_energy_growth(std::size_t l_min, std::size_t l_max, double t_f);

struct SkeletonPoint {
  double energy;
  /// dF_E/dE with an m-fit, otherwise the LCC-only density P_L(E).
  double tail_pdf;
  /// Lower incomplete gamma of (b/B, g E).
  double h_gamma;
  /// Cumulative F_E by quadrature; NaN without an m-fit.
  double cdf;
};

struct SkeletonPrediction {
  double exponent = 0;
  double prefactor = std::numeric_limits<double>::quiet_NaN();
  std::vector<SkeletonPoint> curve;
};

/// fit_dc: P(D_C) = a e^{-b D_C}; fit_el: E_L = A e^{B D_C}; fit_m optional
/// P(m) = c e^{-g m}.
SkeletonPrediction skeleton_prediction(const FitResult& fit_dc,
                                       const FitResult& fit_el,
                                       const std::optional<FitResult>& fit_m,
                                       std::span<const double> energies);

struct DoubleChainConfig {
  std::size_t len_min = 3;
  std::size_t len_max = 6;
  double p = 0.2;
  double p12 = 0.5;
  std::size_t trials = 10000;
  std::uint64_t master_seed = 1;
  double t_f = 1.0;
  double cw_threshold = kDefaultConditionThreshold;
};

struct DoubleChainTrial {
  std::size_t len1 = 0, len2 = 0;
  std::size_t cross_links = 0;
  double c_w = std::numeric_limits<double>::infinity();
  bool controllable = false;
  double energy = std::numeric_limits<double>::quiet_NaN();
};

struct DoubleChainResult {
  std::vector<DoubleChainTrial> trials;
  /// Energies of the controllable trials, in trial order.
  std::vector<double> energies;
};

/// Two chains 0..len1-1 and len1..len1+len2-1 driven at their heads.
DirectedNetwork double_chain_network(std::size_t len1, std::size_t len2, double p,
                                     double p12, Rng& rng);

DoubleChainResult double_chain_ensemble(const DoubleChainConfig& config);

double pearson(std::span<const double> x, std::span<const double> y);
double spearman(std::span<const double> x, std::span<const double> y);

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double r_squared = 0;
};
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

struct HistogramBin {
  double lo, hi;
  std::size_t count;
  /// count / (total * width)
  double density;
};
/// Logarithmic bins aligned to powers of ten; only bins that hold samples.
std::vector<HistogramBin> log_histogram(std::span<const double> samples,
                                        int bins_per_decade = 20);

}  // namespace netctl
