#include "netctl/models.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "netctl/chains.hpp"
#include "netctl/errors.hpp"
#include "netctl/matching.hpp"
#include "netctl/rng.hpp"

namespace netctl {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

nlohmann::json finite_or_null(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

const char* generator_name(GeneratorKind kind) {
  return kind == GeneratorKind::ER ? "er" : "ba";
}

const char* depth_name(TrialDepth depth) {
  switch (depth) {
    case TrialDepth::Structure: return "structure";
    case TrialDepth::Condition: return "condition";
    case TrialDepth::Full: return "full";
  }
  return "full";
}

}  // namespace

nlohmann::json EnsembleConfig::to_json() const {
  return {{"model", generator_name(model)},
          {"n", n},
          {"avg_k", avg_k},
          {"p_b", p_b},
          {"t_f", t_f},
          {"trials", trials},
          {"master_seed", master_seed},
          {"cw_threshold", cw_threshold},
          {"depth", depth_name(depth)},
          {"simulate", simulate},
          {"grid_intervals", grid_intervals}};
}

DirectedNetwork generate_network(const EnsembleConfig& config, std::uint64_t seed) {
  if (config.model == GeneratorKind::ER) {
    return generate_er(config.n, config.avg_k, config.p_b, seed);
  }
  const auto m_attach = static_cast<std::size_t>(std::lround(config.avg_k / 2.0));
  return generate_ba(config.n, m_attach, config.p_b, seed);
}

TrialRecord run_trial(const EnsembleConfig& config, std::uint64_t seed) {
  const DirectedNetwork net = generate_network(config, seed);
  const MatchingResult matching = maximum_matching(net);

  TrialRecord rec;
  rec.seed = seed;
  rec.n = config.n;
  rec.avg_k = config.avg_k;
  rec.p_b = config.p_b;
  rec.n_d = matching.driver_density();
  if (config.depth == TrialDepth::Structure) return rec;

  ControlProblem p;
  p.a = net.system_matrix();
  p.b = control_matrix(matching);
  p.t_f = config.t_f;
  Rng rng(mix64(seed));
  p.x0 = random_unit_vector(config.n, rng);
  p.xf = random_unit_vector(config.n, rng);

  if (config.depth == TrialDepth::Condition) {
    rec.c_w = condition_number(gramian(p.a, p.b, p.t_f));
    rec.controllable = rec.c_w < config.cw_threshold;
    return rec;
  }

  const ChainProfile profile = control_profile(net, matching.drivers);
  rec.d_c = profile.d_c;
  rec.m = profile.m;
  rec.topo_diameter = topological_diameter(net);
  try {
    ControlOutcome out = minimum_energy(p, {config.cw_threshold, config.grid_intervals});
    rec.c_w = out.c_w;
    rec.controllable = out.controllable;
    if (rec.controllable) {
      rec.energy = out.energy;
      if (config.simulate) {
        rec.e_x = simulate_control(p, std::move(out), config.grid_intervals).e_x;
      }
    }
  } catch (const UncontrollableError&) {
    rec.c_w = std::numeric_limits<double>::infinity();
  }
  return rec;
}

std::vector<TrialRecord> run_ensemble(const EnsembleConfig& config) {
  if (config.trials < 1) throw ParameterError("ensemble needs at least one trial");
  const std::size_t trials = config.trials;
  std::vector<TrialRecord> records(trials);
  std::vector<std::exception_ptr> errors(trials);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < trials; i = next++) {
      try {
        records[i] = run_trial(config, derive_seed(config.master_seed, i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(config.threads, static_cast<unsigned>(trials)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (std::size_t i = 0; i < trials; ++i) {
    if (!errors[i]) continue;
    const std::string where = "trial " + std::to_string(i) + ": ";
    try {
      std::rethrow_exception(errors[i]);
    } catch (const ParameterError& e) {
      throw ParameterError(where + e.what());
    } catch (const NumericError& e) {
      throw NumericError(where + e.what());
    }
  }
  return records;
}

double practical_fraction(std::span<const TrialRecord> records, double threshold) {
  if (records.empty()) return kNaN;
  std::size_t hits = 0;
  for (const auto& r : records) hits += r.c_w < threshold;
  return static_cast<double>(hits) / static_cast<double>(records.size());
}

double mean_driver_density(std::span<const TrialRecord> records) {
  if (records.empty()) return kNaN;
  double s = 0;
  for (const auto& r : records) s += r.n_d;
  return s / static_cast<double>(records.size());
}

std::vector<double> controllable_energies(std::span<const TrialRecord> records,
                                          double threshold) {
  std::vector<double> out;
  for (const auto& r : records) {
    if (r.c_w < threshold && std::isfinite(r.energy)) out.push_back(r.energy);
  }
  return out;
}

void write_trials_csv(std::ostream& out, std::span<const TrialRecord> records) {
  out << kTrialCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.seed << ',' << r.n << ',' << format_double(r.avg_k) << ','
        << format_double(r.p_b) << ',' << format_double(r.n_d) << ',' << r.d_c
        << ',' << r.m << ',' << format_double(r.c_w) << ',' << (r.controllable ? 1 : 0)
        << ',' << format_double(r.energy) << ',' << format_double(r.e_x) << ','
        << r.topo_diameter << '\n';
  }
}

std::vector<TrialRecord> read_trials_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  // Lines starting with '#' carry run metadata.
  while (std::getline(in, line) && !line.empty() && line[0] == '#') ++line_no;
  if (line != kTrialCsvHeader) throw ParseError("unexpected trial CSV header", line_no);
  std::vector<TrialRecord> records;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 12) throw ParseError("expected 12 fields", line_no);
    auto real = [&](const std::string& s) {
      char* end = nullptr;
      const double v = std::strtod(s.c_str(), &end);
      if (s.empty() || *end != '\0') throw ParseError("bad number '" + s + "'", line_no);
      return v;
    };
    auto count = [&](const std::string& s) {
      char* end = nullptr;
      const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
      if (s.empty() || *end != '\0' || s[0] == '-') throw ParseError("bad integer '" + s + "'", line_no);
      return static_cast<std::uint64_t>(v);
    };
    TrialRecord r;
    r.seed = count(f[0]);
    r.n = count(f[1]);
    r.avg_k = real(f[2]);
    r.p_b = real(f[3]);
    r.n_d = real(f[4]);
    r.d_c = count(f[5]);
    r.m = count(f[6]);
    r.c_w = real(f[7]);
    r.controllable = count(f[8]) != 0;
    r.energy = real(f[9]);
    r.e_x = real(f[10]);
    r.topo_diameter = count(f[11]);
    records.push_back(r);
  }
  return records;
}

nlohmann::json FitResult::to_json() const {
  nlohmann::json j{{"model", model == FitModel::PowerLaw ? "power-law" : "exponential"},
                   {"x_min", finite_or_null(x_min)},
                   {"x_max", finite_or_null(x_max)},
                   {"goodness", finite_or_null(goodness)},
                   {"n_samples", n_samples},
                   {"n_tail", n_tail},
                   {"valid", valid}};
  if (model == FitModel::PowerLaw) {
    j["alpha"] = finite_or_null(alpha);
  } else {
    j["prefactor"] = finite_or_null(prefactor);
    j["rate"] = finite_or_null(rate);
  }
  return j;
}

FitResult fit_power_law(std::span<const double> samples, std::size_t min_tail) {
  std::vector<double> x;
  for (double s : samples) {
    if (std::isfinite(s) && s > 0) x.push_back(s);
  }
  if (x.size() < min_tail) {
    throw InsufficientDataError("power-law fit needs at least " + std::to_string(min_tail) +
                                " positive samples");
  }
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  std::vector<double> logs(n), suffix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) logs[i] = std::log(x[i]);
  for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] + logs[i];

  FitResult best;
  best.model = FitModel::PowerLaw;
  best.n_samples = n;
  best.x_max = x.back();
  double best_ks = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + min_tail <= n; ++i) {
    if (i > 0 && x[i] == x[i - 1]) continue;
    const std::size_t m = n - i;
    const double sum = suffix[i] - static_cast<double>(m) * logs[i];
    if (!(sum > 0)) continue;
    const double alpha = 1.0 + static_cast<double>(m) / sum;
    double ks = 0;
    for (std::size_t j = i; j < n; ++j) {
      const double model_cdf = 1.0 - std::exp((1.0 - alpha) * (logs[j] - logs[i]));
      const double lo = static_cast<double>(j - i) / static_cast<double>(m);
      const double hi = static_cast<double>(j - i + 1) / static_cast<double>(m);
      ks = std::max({ks, std::abs(model_cdf - lo), std::abs(model_cdf - hi)});
    }
    if (ks < best_ks) {
      best_ks = ks;
      best.alpha = alpha;
      best.x_min = x[i];
      best.n_tail = m;
    }
  }
  if (!std::isfinite(best_ks)) {
    throw InsufficientDataError("power-law fit is degenerate: samples do not spread");
  }
  best.goodness = best_ks;
  best.valid = best.alpha > 1.0 && best.n_tail >= min_tail;
  return best;
}

FitResult fit_exponential(std::span<const std::size_t> samples) {
  if (samples.size() < 30) throw InsufficientDataError("exponential fit needs at least 30 samples");
  std::map<std::size_t, std::size_t> counts;
  for (auto s : samples) ++counts[s];
  if (counts.size() < 3) throw InsufficientDataError("support holds fewer than 3 distinct values");
  auto mode = counts.begin();
  for (auto it = counts.begin(); it != counts.end(); ++it) {
    if (it->second > mode->second) mode = it;
  }
  std::vector<double> xs, ys, ws;
  const double total = static_cast<double>(samples.size());
  for (auto it = mode; it != counts.end(); ++it) {
    xs.push_back(static_cast<double>(it->first));
    ys.push_back(std::log(static_cast<double>(it->second) / total));
    ws.push_back(static_cast<double>(it->second));
  }
  if (xs.size() < 2) throw InsufficientDataError("no decaying side past the mode");

  // Counts weight the points since ln(count) has variance ~ 1/count.
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sw += ws[i];
    sx += ws[i] * xs[i];
    sy += ws[i] * ys[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += ws[i] * (xs[i] - mx) * (xs[i] - mx);
    sxy += ws[i] * (xs[i] - mx) * (ys[i] - my);
    syy += ws[i] * (ys[i] - my) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  FitResult r;
  r.model = FitModel::Exponential;
  r.rate = -slope;
  r.prefactor = std::exp(my - slope * mx);
  r.x_min = xs.front();
  r.x_max = xs.back();
  r.goodness = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
  r.n_samples = samples.size();
  r.n_tail = xs.size();
  r.valid = r.rate > 0;
  return r;
}

FitResult fit_chain_energy_growth(std::size_t l_min, std::size_t l_max, double t_f) {
  if (l_min < 2 || l_max <= l_min) throw ParameterError("chain range must satisfy 2 <= l_min < l_max");
  std::vector<double> ls, logs;
  for (std::size_t l = l_min; l <= l_max; ++l) {
    ls.push_back(static_cast<double>(l));
    logs.push_back(std::log(chain_energy(l, t_f, ChainDirection::Unidirectional).e_l));
  }
  const LinearFit lf = linear_fit(ls, logs);
  FitResult r;
  r.model = FitModel::Exponential;
  r.rate = lf.slope;
  r.prefactor = std::exp(lf.intercept);
  r.x_min = static_cast<double>(l_min);
  r.x_max = static_cast<double>(l_max);
  r.goodness = lf.r_squared;
  r.n_samples = ls.size();
  r.n_tail = ls.size();
  r.valid = r.rate > 0;
  return r;
}

SkeletonPrediction skeleton_prediction(const FitResult& fit_dc, const FitResult& fit_el,
                                       const std::optional<FitResult>& fit_m,
                                       std::span<const double> energies) {
  const double a = fit_dc.prefactor, b = fit_dc.rate;
  const double big_a = fit_el.prefactor, big_b = fit_el.rate;
  if (!(big_b > 0)) throw DomainError("energy growth rate B must be positive");
  if (!(b >= 0) || !(a > 0) || !(big_a > 0)) throw DomainError("fit parameters must be positive");
  const double s = b / big_b;

  SkeletonPrediction pred;
  pred.exponent = 1.0 + s;
  const bool have_m = fit_m.has_value() && fit_m->rate > 0 && fit_m->prefactor > 0;
  const double c = have_m ? fit_m->prefactor : kNaN;
  const double g = have_m ? fit_m->rate : kNaN;
  const double lead = a / big_b * std::pow(big_a, s);
  pred.prefactor = have_m ? lead * c / g * std::pow(g, -(1.0 + s)) : lead;

  // E_L starts where the fitted D_C support starts.
  const double dc_floor = std::isfinite(fit_dc.x_min) ? fit_dc.x_min : 1.0;
  const double u_lo = std::log(big_a) + big_b * dc_floor;
  for (double e : energies) {
    if (!(e > 0)) throw DomainError("energies must be positive");
    SkeletonPoint pt{e, kNaN, kNaN, kNaN};
    if (have_m) {
      pt.h_gamma = s > 0 ? boost::math::tgamma_lower(s, g * e) : kNaN;
      // Derivative of the cumulative below under the integral sign.
      const double el_min = std::exp(u_lo);
      pt.tail_pdf = lead * c * std::pow(g * e, -(1.0 + s)) *
                    boost::math::tgamma_lower(1.0 + s, g * e / el_min);
      auto integrand = [&](double u) {
        const double el = std::exp(u);
        return lead * std::exp(-s * u) * (c / g) * -std::expm1(-g * e / el);
      };
      pt.cdf = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
          integrand, u_lo, std::numeric_limits<double>::infinity(), 15, 1e-10);
    } else {
      pt.tail_pdf = lead * std::pow(e, -(1.0 + s));
    }
    pred.curve.push_back(pt);
  }
  return pred;
}

DirectedNetwork double_chain_network(std::size_t len1, std::size_t len2, double p,
                                     double p12, Rng& rng) {
  if (len1 < 1 || len2 < 1) throw ParameterError("chain lengths must be positive");
  if (!(p >= 0 && p <= 1) || !(p12 >= 0 && p12 <= 1)) {
    throw ParameterError("probabilities must lie in [0, 1]");
  }
  std::vector<Edge> edges;
  for (NodeId i = 0; i + 1 < len1; ++i) edges.push_back({i, i + 1});
  for (NodeId i = 0; i + 1 < len2; ++i) edges.push_back({len1 + i, len1 + i + 1});
  for (NodeId i = 0; i < len1; ++i) {
    for (NodeId j = 0; j < len2; ++j) {
      if (!rng.bernoulli(p)) continue;
      if (rng.bernoulli(p12)) edges.push_back({i, len1 + j});
      else edges.push_back({len1 + j, i});
    }
  }
  NetworkMeta meta;
  meta.generator = "double-chain";
  return DirectedNetwork(len1 + len2, std::move(edges), {}, meta);
}

DoubleChainResult double_chain_ensemble(const DoubleChainConfig& cfg) {
  if (cfg.len_min < 1 || cfg.len_max < cfg.len_min) throw ParameterError("bad chain length range");
  if (cfg.trials < 1) throw ParameterError("ensemble needs at least one trial");
  DoubleChainResult result;
  const std::uint64_t span = cfg.len_max - cfg.len_min + 1;
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    Rng rng(derive_seed(cfg.master_seed, t));
    DoubleChainTrial trial;
    trial.len1 = cfg.len_min + rng.below(span);
    trial.len2 = cfg.len_min + rng.below(span);
    const DirectedNetwork net = double_chain_network(trial.len1, trial.len2, cfg.p, cfg.p12, rng);
    trial.cross_links = net.edge_count() - (trial.len1 - 1) - (trial.len2 - 1);
    const std::size_t n = net.node_count();
    ControlProblem p;
    p.a = net.system_matrix();
    p.b = ControlMatrix::from_nodes(n, std::vector<NodeId>{0, trial.len1});
    p.t_f = cfg.t_f;
    p.x0 = random_unit_vector(n, rng);
    p.xf = random_unit_vector(n, rng);
    try {
      const ControlOutcome out = minimum_energy(p, {cfg.cw_threshold, 2});
      trial.c_w = out.c_w;
      trial.controllable = out.controllable;
      if (trial.controllable) {
        trial.energy = out.energy;
        result.energies.push_back(out.energy);
      }
    } catch (const UncontrollableError&) {
    }
    result.trials.push_back(trial);
  }
  return result;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DimensionError("correlation needs paired samples");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) return kNaN;
  return sxy / std::sqrt(sxx * syy);
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> rank(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = r;
    i = j + 1;
  }
  return rank;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("correlation needs paired samples");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DimensionError("linear fit needs paired samples");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) throw InsufficientDataError("linear fit needs distinct x values");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

std::vector<HistogramBin> log_histogram(std::span<const double> samples, int bins_per_decade) {
  if (bins_per_decade < 1) throw ParameterError("bins per decade must be positive");
  std::map<long, std::size_t> counts;
  std::size_t total = 0;
  for (double s : samples) {
    if (!(s > 0) || !std::isfinite(s)) continue;
    ++counts[static_cast<long>(std::floor(std::log10(s) * bins_per_decade))];
    ++total;
  }
  std::vector<HistogramBin> bins;
  for (const auto& [k, c] : counts) {
    const double lo = std::pow(10.0, static_cast<double>(k) / bins_per_decade);
    const double hi = std::pow(10.0, static_cast<double>(k + 1) / bins_per_decade);
    bins.push_back({lo, hi, c, static_cast<double>(c) / (static_cast<double>(total) * (hi - lo))});
  }
  return bins;
}

}  // namespace netctl
