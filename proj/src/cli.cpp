#include "netctl/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "netctl/augment.hpp"
#include "netctl/chains.hpp"
#include "netctl/circuit.hpp"
#include "netctl/errors.hpp"
#include "netctl/graph.hpp"
#include "netctl/linctrl.hpp"
#include "netctl/matching.hpp"
#include "netctl/models.hpp"
#include "netctl/rng.hpp"

namespace netctl {

namespace {

using nlohmann::json;

json num(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::ostringstream s;
  s << std::setprecision(17) << x;
  return s.str();
}

struct Common {
  std::string output;
  bool no_timestamp = false;
  std::string format = "json";
};

struct Context {
  std::ostream& out;
  std::ostream& err;
  Common common;
  std::vector<std::string> argv;
};

json run_metadata(const Context& ctx, json config) {
  json meta{{"tool", "netctl"}, {"argv", ctx.argv}, {"config", std::move(config)}};
  if (!ctx.common.no_timestamp) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    meta["generated_at"] = s.str();
  }
  return meta;
}

void emit(const Context& ctx, const std::string& text) {
  if (ctx.common.output.empty() || ctx.common.output == "-") {
    ctx.out << text;
    return;
  }
  std::ofstream f(ctx.common.output, std::ios::binary);
  if (!f) throw ParameterError("cannot write '" + ctx.common.output + "'");
  f << text;
}

void emit_json(const Context& ctx, const json& config, json body) {
  body["meta"] = run_metadata(ctx, config);
  emit(ctx, body.dump(2) + "\n");
}

/// CSV with the metadata JSON on a leading comment line.
void emit_csv(const Context& ctx, const json& config, const std::string& csv) {
  emit(ctx, "# " + run_metadata(ctx, config).dump() + "\n" + csv);
}

DirectedNetwork load_network(const std::string& path, bool drop_self_loops, json& info) {
  std::ifstream f(path);
  if (!f) throw ParameterError("cannot read '" + path + "'");
  std::stringstream buf;
  buf << f.rdbuf();
  const std::string text = buf.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw ParameterError(path + ": " + e.what());
    }
    info = {{"path", path}, {"format", "json"}};
    return network_from_json(j);
  }
  std::istringstream in(text);
  EdgeListLoad load = load_edge_list(in, drop_self_loops);
  info = {{"path", path},
          {"format", "edgelist"},
          {"duplicates_dropped", load.duplicates_dropped},
          {"self_loops_dropped", load.self_loops_dropped}};
  return std::move(load.network);
}

GeneratorKind parse_model(const std::string& s) {
  if (s == "er") return GeneratorKind::ER;
  if (s == "ba") return GeneratorKind::BA;
  throw ParameterError("unknown model '" + s + "'");
}

unsigned resolve_threads(int flag) {
  if (flag > 0) return static_cast<unsigned>(flag);
  if (const char* env = std::getenv("NETCTL_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*env != '\0' && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    throw ParameterError("NETCTL_THREADS must be a positive integer");
  }
  return 1;
}

std::vector<std::size_t> d_c_values(std::span<const TrialRecord> records, double threshold,
                                    std::size_t min_dc) {
  std::vector<std::size_t> out;
  for (const auto& r : records) {
    if (r.c_w < threshold && r.d_c >= min_dc) out.push_back(r.d_c);
  }
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

// ---------------------------------------------------------------- commands

struct GenArgs {
  std::string model = "er";
  std::size_t n = 100;
  double k = 6;
  double pb = 0.1;
  std::uint64_t seed = 1;
};

int cmd_gen(Context& ctx, const GenArgs& a) {
  EnsembleConfig cfg;
  cfg.model = parse_model(a.model);
  cfg.n = a.n;
  cfg.avg_k = a.k;
  cfg.p_b = a.pb;
  const DirectedNetwork net = generate_network(cfg, a.seed);
  const json config{{"model", a.model}, {"n", a.n}, {"k", a.k}, {"pb", a.pb}, {"seed", a.seed}};
  if (ctx.common.format == "edgelist") {
    emit(ctx, "# " + run_metadata(ctx, config).dump() + "\n" + to_edge_list(net));
  } else {
    emit_json(ctx, config, to_json(net));
  }
  return 0;
}

struct InputArgs {
  std::string input;
  bool drop_self_loops = false;
};

int cmd_analyze(Context& ctx, const InputArgs& a) {
  json info;
  const DirectedNetwork net = load_network(a.input, a.drop_self_loops, info);
  const MatchingResult m = maximum_matching(net);
  control_signal_paths(m);
  const ChainProfile p = control_profile(net, m.drivers);
  json body{{"input", info},
            {"n", net.node_count()},
            {"edges", net.edge_count()},
            {"matching", to_json(m)},
            {"N_D", m.structural_driver_count()},
            {"profile", to_json(p)},
            {"topological_diameter", topological_diameter(net)}};
  emit_json(ctx, {{"input", a.input}, {"drop_self_loops", a.drop_self_loops}}, std::move(body));
  return 0;
}

struct ControlArgs {
  InputArgs in;
  double tf = 1.0;
  std::uint64_t seed = 1;
  double cw = kDefaultConditionThreshold;
  double ex = kDefaultStateErrorThreshold;
  std::size_t steps = kDefaultGridIntervals;
  std::vector<std::size_t> extra;
  bool samples = false;
};

int cmd_control(Context& ctx, const ControlArgs& a) {
  json info;
  const DirectedNetwork net = load_network(a.in.input, a.in.drop_self_loops, info);
  const MatchingResult m = maximum_matching(net);
  ControlProblem p;
  p.a = net.system_matrix();
  p.b = control_matrix(m, a.extra);
  p.t_f = a.tf;
  Rng rng(a.seed);
  p.x0 = random_unit_vector(net.node_count(), rng);
  p.xf = random_unit_vector(net.node_count(), rng);
  ControlOutcome out = minimum_energy(p, {a.cw, a.steps});
  out = simulate_control(p, std::move(out), a.steps);
  json body = to_json(out);
  body["inputs"] = p.b.input_nodes();
  body["tf"] = a.tf;
  body["state_error_ok"] = out.e_x < a.ex;
  body["lambda_h_min"] = num(h_matrix_min_eigenvalue(p.a, out.w, a.tf));
  if (a.samples) {
    json u = json::array();
    for (Eigen::Index k = 0; k < out.u_samples.cols(); ++k) {
      std::vector<double> col(out.u_samples.rows());
      for (Eigen::Index i = 0; i < out.u_samples.rows(); ++i) col[i] = out.u_samples(i, k);
      u.push_back({{"t", out.times[k]}, {"u", col}});
    }
    body["u_samples"] = std::move(u);
  }
  const json config{{"input", a.in.input}, {"tf", a.tf}, {"seed", a.seed}, {"cw_threshold", a.cw},
                    {"ex_threshold", a.ex}, {"steps", a.steps}, {"extra", a.extra}};
  emit_json(ctx, config, std::move(body));
  return 0;
}

struct EnsembleArgs {
  std::string model = "er";
  std::size_t n = 100;
  double k = 6;
  double pb = 0.1;
  double tf = 1.0;
  std::size_t trials = 10000;
  std::uint64_t seed = 1;
  double cw = kDefaultConditionThreshold;
  std::string depth = "full";
  bool no_simulate = false;
  int threads = 0;
};

EnsembleConfig ensemble_config(const EnsembleArgs& a) {
  EnsembleConfig c;
  c.model = parse_model(a.model);
  c.n = a.n;
  c.avg_k = a.k;
  c.p_b = a.pb;
  c.t_f = a.tf;
  c.trials = a.trials;
  c.master_seed = a.seed;
  c.cw_threshold = a.cw;
  if (a.depth == "structure") c.depth = TrialDepth::Structure;
  else if (a.depth == "condition") c.depth = TrialDepth::Condition;
  else if (a.depth == "full") c.depth = TrialDepth::Full;
  else throw ParameterError("unknown depth '" + a.depth + "'");
  c.simulate = !a.no_simulate;
  c.threads = resolve_threads(a.threads);
  return c;
}

int cmd_ensemble(Context& ctx, const EnsembleArgs& a) {
  const EnsembleConfig cfg = ensemble_config(a);
  const auto records = run_ensemble(cfg);
  std::ostringstream csv;
  write_trials_csv(csv, records);
  emit_csv(ctx, cfg.to_json(), csv.str());
  ctx.err << "controllable fraction " << practical_fraction(records, cfg.cw_threshold)
          << ", mean n_D " << mean_driver_density(records) << "\n";
  return 0;
}

struct FitArgs {
  std::string input;
  std::string kind = "energy";
  double cw = kDefaultConditionThreshold;
  std::size_t min_tail = 30;
};

int cmd_fit(Context& ctx, const FitArgs& a) {
  std::ifstream f(a.input);
  if (!f) throw ParameterError("cannot read '" + a.input + "'");
  const auto records = read_trials_csv(f);
  FitResult fit;
  if (a.kind == "energy") {
    fit = fit_power_law(controllable_energies(records, a.cw), a.min_tail);
  } else if (a.kind == "dc") {
    fit = fit_exponential(d_c_values(records, a.cw, 0));
  } else if (a.kind == "m") {
    std::vector<std::size_t> ms;
    for (const auto& r : records) {
      if (r.c_w < a.cw && r.d_c > 2) ms.push_back(r.m);
    }
    fit = fit_exponential(ms);
  } else {
    throw ParameterError("unknown fit kind '" + a.kind + "'");
  }
  emit_json(ctx, {{"input", a.input}, {"kind", a.kind}, {"cw_threshold", a.cw}, {"min_tail", a.min_tail}},
            {{"fit", fit.to_json()}});
  return 0;
}

struct AugmentArgs {
  InputArgs in;
  std::string name;
  double tf = 1.0;
  std::uint64_t seed = 1;
  double cw = kDefaultConditionThreshold;
  std::string strategy;
  std::size_t count = 0;
};

int cmd_augment(Context& ctx, const AugmentArgs& a) {
  json info;
  const DirectedNetwork net = load_network(a.in.input, a.in.drop_self_loops, info);
  AugmentOptions opts;
  opts.cw_threshold = a.cw;
  opts.seed = a.seed;
  const std::string name = a.name.empty() ? a.in.input : a.name;
  json body{{"input", info}, {"table_row", table_row(name, net, a.tf, opts)}};
  const MatchingResult m = maximum_matching(net);
  const AugmentationReport mstar = augment_uncontrollable(net, m, a.tf, opts);
  body["mstar"] = mstar.to_json();
  if (!a.strategy.empty()) {
    const Placement pl = parse_placement(a.strategy);
    const auto& drivers = mstar.augmented_drivers;
    const ChainProfile prof = control_profile(net, drivers);
    const auto extras = place_redundant(net, drivers, prof, pl, a.count, a.seed);
    Rng rng(a.seed);
    const Eigen::VectorXd x0 = random_unit_vector(net.node_count(), rng);
    const Eigen::VectorXd xf = random_unit_vector(net.node_count(), rng);
    AugmentationReport rep = reduction_report(net, drivers, extras, a.tf, x0, xf, a.cw);
    rep.strategy = placement_name(pl);
    rep.m_star = mstar.m_star;
    body["redundant"] = rep.to_json();
  }
  emit_json(ctx, {{"input", a.in.input}, {"name", name}, {"tf", a.tf}, {"seed", a.seed},
                  {"cw_threshold", a.cw}, {"strategy", a.strategy}, {"count", a.count}},
            std::move(body));
  return 0;
}

struct ChainArgs {
  std::size_t lmin = 2;
  std::size_t lmax = 8;
  double tf = 1.0;
  std::string direction = "uni";
};

int cmd_chain(Context& ctx, const ChainArgs& a) {
  ChainDirection dir;
  if (a.direction == "uni") dir = ChainDirection::Unidirectional;
  else if (a.direction == "bi") dir = ChainDirection::Bidirectional;
  else throw ParameterError("direction must be uni or bi");
  if (a.lmin > a.lmax) throw ParameterError("lmin exceeds lmax");
  const json config{{"lmin", a.lmin}, {"lmax", a.lmax}, {"tf", a.tf}, {"direction", a.direction}};
  std::ostringstream csv;
  csv << "l,energy,lambda_h_min,energy_times_lambda,c_w,bound\n";
  json rows = json::array();
  for (std::size_t l = a.lmin; l <= a.lmax; ++l) {
    const ChainAnalytics c = chain_energy(l, a.tf, dir);
    csv << l << ',' << fmt(c.e_l) << ',' << fmt(c.lambda_h_min) << ','
        << fmt(c.e_l * c.lambda_h_min) << ',' << fmt(c.c_w) << ',' << fmt(c.bound) << '\n';
    rows.push_back(to_json(c));
  }
  if (ctx.common.format == "json") emit_json(ctx, config, {{"chains", rows}});
  else emit_csv(ctx, config, csv.str());
  return 0;
}

struct CircuitArgs {
  std::size_t l = 7;
  double r = 1.0;
  double c = 1.0;
  double tf = 1.0;
  std::uint64_t seed = 1;
  std::vector<std::size_t> inject;
  std::size_t steps = kDefaultGridIntervals;
};

int cmd_circuit(Context& ctx, const CircuitArgs& a) {
  RcLadder ladder{a.l, a.r, a.c, a.inject};
  const CircuitReport rep = circuit_report(ladder, a.tf, a.seed, a.steps);
  emit_json(ctx, {{"L", a.l}, {"R", a.r}, {"C", a.c}, {"tf", a.tf}, {"seed", a.seed},
                  {"inject", a.inject}, {"steps", a.steps}},
            rep.to_json());
  return 0;
}

struct FigureArgs {
  std::string recipe;
  std::size_t n = 100;
  std::size_t trials = 2000;
  std::uint64_t seed = 1;
  double tf = 1.0;
  double k = 6;
  double pb = 0.1;
  int threads = 0;
};

int cmd_figures(Context& ctx, const FigureArgs& a) {
  json config{{"recipe", a.recipe}, {"n", a.n}, {"trials", a.trials}, {"seed", a.seed},
              {"tf", a.tf}, {"k", a.k}, {"pb", a.pb}};
  EnsembleConfig base;
  base.n = a.n;
  base.trials = a.trials;
  base.master_seed = a.seed;
  base.t_f = a.tf;
  base.avg_k = a.k;
  base.p_b = a.pb;
  base.threads = resolve_threads(a.threads);
  std::ostringstream csv;

  if (a.recipe == "fig1") {
    // n_D and P(C_W) against P_b for several mean degrees.
    csv << "avg_k,p_b,n_d,p_cw\n";
    base.depth = TrialDepth::Condition;
    for (double k : {4.0, 6.0, 8.0}) {
      for (int step = 0; step <= 10; ++step) {
        EnsembleConfig c = base;
        c.avg_k = k;
        c.p_b = 0.1 * step;
        c.master_seed = derive_seed(a.seed, static_cast<std::uint64_t>(k * 100 + step));
        const auto rec = run_ensemble(c);
        csv << fmt(k) << ',' << fmt(c.p_b) << ',' << fmt(mean_driver_density(rec)) << ','
            << fmt(practical_fraction(rec, c.cw_threshold)) << '\n';
      }
    }
  } else if (a.recipe == "fig2") {
    // Energy histograms under three thresholds, from one ensemble gated at the loosest.
    base.cw_threshold = 1e14;
    base.simulate = false;
    const auto rec = run_ensemble(base);
    csv << "threshold,lo,hi,count,density\n";
    json fits = json::object();
    for (double th : {1e10, 1e12, 1e14}) {
      const auto e = controllable_energies(rec, th);
      for (const auto& b : log_histogram(e, 20)) {
        csv << fmt(th) << ',' << fmt(b.lo) << ',' << fmt(b.hi) << ',' << b.count << ','
            << fmt(b.density) << '\n';
      }
      try {
        fits[fmt(th)] = fit_power_law(e).to_json();
      } catch (const InsufficientDataError& err) {
        fits[fmt(th)] = err.what();
      }
    }
    config["fits"] = fits;
  } else if (a.recipe == "fig3") {
    // Mean energy per control diameter next to m * E_L of the matching chain.
    const auto rec = run_ensemble(base);
    std::map<std::size_t, std::vector<const TrialRecord*>> by_dc;
    for (const auto& r : rec) {
      if (r.controllable) by_dc[r.d_c].push_back(&r);
    }
    csv << "d_c,count,mean_energy,mean_m,e_l,mean_m_times_e_l\n";
    for (const auto& [dc, rs] : by_dc) {
      if (dc < 2 || dc > 12) continue;
      double se = 0, sm = 0;
      for (const auto* r : rs) {
        se += r->energy;
        sm += static_cast<double>(r->m);
      }
      const double el = chain_energy(dc, a.tf, ChainDirection::Unidirectional).e_l;
      const double cnt = static_cast<double>(rs.size());
      csv << dc << ',' << rs.size() << ',' << fmt(se / cnt) << ',' << fmt(sm / cnt) << ','
          << fmt(el) << ',' << fmt(sm / cnt * el) << '\n';
    }
  } else if (a.recipe == "figA7") {
    // Redundant-input strategies against random placements, by control diameter.
    base.depth = TrialDepth::Condition;
    std::map<std::size_t, std::vector<StrategyComparison>> by_dc;
    for (std::size_t t = 0; t < a.trials; ++t) {
      const std::uint64_t seed = derive_seed(a.seed, t);
      const TrialRecord r = run_trial(base, seed);
      if (!r.controllable) continue;
      const DirectedNetwork net = generate_network(base, seed);
      const MatchingResult m = maximum_matching(net);
      Rng rng(mix64(seed));
      const Eigen::VectorXd x0 = random_unit_vector(net.node_count(), rng);
      const Eigen::VectorXd xf = random_unit_vector(net.node_count(), rng);
      auto cmp = compare_strategies(net, m.drivers, a.tf, x0, xf, seed);
      by_dc[cmp.d_c].push_back(cmp);
    }
    csv << "d_c,networks,median_mid,median_end,median_random_mid,median_random_end\n";
    for (const auto& [dc, list] : by_dc) {
      std::vector<double> mid, end, rmid, rend;
      for (const auto& c : list) {
        mid.push_back(c.mid_ratio);
        end.push_back(c.end_ratio);
        rmid.push_back(c.random_mid_ratio);
        rend.push_back(c.random_end_ratio);
      }
      csv << dc << ',' << list.size() << ',' << fmt(median(mid)) << ',' << fmt(median(end)) << ','
          << fmt(median(rmid)) << ',' << fmt(median(rend)) << '\n';
    }
  } else {
    throw ParameterError("unknown recipe '" + a.recipe + "' (fig1, fig2, fig3, figA7)");
  }
  emit_csv(ctx, config, csv.str());
  return 0;
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("-o,--output", c.output, "Output path, stdout when omitted");
  sub->add_flag("--no-timestamp", c.no_timestamp, "Leave the generation time out of the output");
}

void add_input(CLI::App* sub, InputArgs& in) {
  sub->add_option("input", in.input, "Graph file: JSON or whitespace edge list")->required();
  sub->add_flag("--drop-self-loops", in.drop_self_loops, "Discard self-loops from edge lists");
}

}  // namespace

int run(int argc, const char* const* argv) { return run(argc, argv, std::cout, std::cerr); }

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Context ctx{out, err, {}, {}};
  for (int i = 1; i < argc; ++i) ctx.argv.emplace_back(argv[i]);

  CLI::App app{"Practical controllability of directed networks", "netctl"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a random directed network");
  g->add_option("--model", gen.model, "er or ba")->check(CLI::IsMember({"er", "ba"}));
  g->add_option("--n", gen.n, "Node count");
  g->add_option("--k", gen.k, "Mean degree (ba attaches k/2 edges per node)");
  g->add_option("--pb", gen.pb, "Probability an edge points from high to low degree");
  g->add_option("--seed", gen.seed, "Seed");
  g->add_option("--format", ctx.common.format, "json or edgelist")->check(CLI::IsMember({"json", "edgelist"}));
  add_common(g, ctx.common);

  InputArgs analyze;
  auto* an = app.add_subcommand("analyze", "Drivers, control-signal paths and control diameter");
  add_input(an, analyze);
  add_common(an, ctx.common);

  ControlArgs control;
  auto* co = app.add_subcommand("control", "Minimum-energy transfer between random unit states");
  add_input(co, control.in);
  co->add_option("--tf", control.tf, "Control horizon");
  co->add_option("--seed", control.seed, "Seed for x0 and xf");
  co->add_option("--cw-threshold", control.cw, "Practical-controllability threshold on C_W");
  co->add_option("--ex-threshold", control.ex, "Acceptable final-state error");
  co->add_option("--steps", control.steps, "Time-grid intervals");
  co->add_option("--extra", control.extra, "Additional input nodes");
  co->add_flag("--samples", control.samples, "Include u(t) samples");
  add_common(co, ctx.common);

  EnsembleArgs ens;
  auto* en = app.add_subcommand("ensemble", "Trial records for a random-network ensemble");
  en->add_option("--model", ens.model, "er or ba")->check(CLI::IsMember({"er", "ba"}));
  en->add_option("--n", ens.n, "Node count");
  en->add_option("--k", ens.k, "Mean degree");
  en->add_option("--pb", ens.pb, "Orientation bias");
  en->add_option("--tf", ens.tf, "Control horizon");
  en->add_option("--trials", ens.trials, "Number of trials");
  en->add_option("--seed", ens.seed, "Master seed");
  en->add_option("--cw-threshold", ens.cw, "Practical-controllability threshold on C_W");
  en->add_option("--depth", ens.depth, "structure, condition or full")
      ->check(CLI::IsMember({"structure", "condition", "full"}));
  en->add_flag("--no-simulate", ens.no_simulate, "Skip the trajectory simulation and e_x");
  en->add_option("--threads", ens.threads, "Worker threads (NETCTL_THREADS when unset)");
  add_common(en, ctx.common);

  FitArgs fit;
  auto* fi = app.add_subcommand("fit", "Fit energy, D_C or m distributions from an ensemble CSV");
  fi->add_option("input", fit.input, "Trial CSV")->required();
  fi->add_option("--kind", fit.kind, "energy, dc or m")->check(CLI::IsMember({"energy", "dc", "m"}));
  fi->add_option("--cw-threshold", fit.cw, "Keep trials with C_W below this");
  fi->add_option("--min-tail", fit.min_tail, "Minimum tail size for power-law fits");
  add_common(fi, ctx.common);

  AugmentArgs aug;
  auto* au = app.add_subcommand("augment", "Driver augmentation and redundant-input report");
  add_input(au, aug.in);
  au->add_option("--name", aug.name, "Row name in the table output");
  au->add_option("--tf", aug.tf, "Control horizon");
  au->add_option("--seed", aug.seed, "Seed for x0, xf and random placement");
  au->add_option("--cw-threshold", aug.cw, "Practical-controllability threshold on C_W");
  au->add_option("--strategy", aug.strategy, "mid, end or random")
      ->check(CLI::IsMember({"mid", "end", "random"}));
  au->add_option("--count", aug.count, "Input count for random placement");
  add_common(au, ctx.common);

  ChainArgs chain;
  auto* ch = app.add_subcommand("chain", "Energy and conditioning of 1D chains");
  ch->add_option("--lmin", chain.lmin, "Shortest chain");
  ch->add_option("--lmax", chain.lmax, "Longest chain");
  ch->add_option("--tf", chain.tf, "Control horizon");
  ch->add_option("--direction", chain.direction, "uni or bi")->check(CLI::IsMember({"uni", "bi"}));
  ch->add_option("--format", ctx.common.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))
      ->default_val("csv");
  add_common(ch, ctx.common);

  CircuitArgs circ;
  auto* ci = app.add_subcommand("circuit", "R-C ladder control and dissipated energy");
  ci->add_option("--l", circ.l, "Stage count");
  ci->add_option("--r", circ.r, "Resistance in ohm");
  ci->add_option("--c", circ.c, "Capacitance in farad");
  ci->add_option("--tf", circ.tf, "Control horizon");
  ci->add_option("--seed", circ.seed, "Seed for the target state");
  ci->add_option("--inject", circ.inject, "1-based stages for extra current sources");
  ci->add_option("--steps", circ.steps, "Time-grid intervals");
  add_common(ci, ctx.common);

  FigureArgs figs;
  auto* fg = app.add_subcommand("figures", "Plot-ready CSV for fig1, fig2, fig3 and figA7");
  fg->add_option("recipe", figs.recipe, "fig1, fig2, fig3 or figA7")->required()
      ->check(CLI::IsMember({"fig1", "fig2", "fig3", "figA7"}));
  fg->add_option("--n", figs.n, "Node count");
  fg->add_option("--trials", figs.trials, "Trials per ensemble point");
  fg->add_option("--seed", figs.seed, "Master seed");
  fg->add_option("--tf", figs.tf, "Control horizon");
  fg->add_option("--k", figs.k, "Mean degree (fig2, fig3, figA7)");
  fg->add_option("--pb", figs.pb, "Orientation bias (fig2, fig3, figA7)");
  fg->add_option("--threads", figs.threads, "Worker threads (NETCTL_THREADS when unset)");
  add_common(fg, ctx.common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "netctl: " << e.what() << "\n";
    const CLI::App* failed = &app;
    for (auto* sub : app.get_subcommands()) failed = sub;
    err << failed->help();
    return 1;
  }

  try {
    if (g->parsed()) return cmd_gen(ctx, gen);
    if (an->parsed()) return cmd_analyze(ctx, analyze);
    if (co->parsed()) return cmd_control(ctx, control);
    if (en->parsed()) return cmd_ensemble(ctx, ens);
    if (fi->parsed()) return cmd_fit(ctx, fit);
    if (au->parsed()) return cmd_augment(ctx, aug);
    if (ch->parsed()) return cmd_chain(ctx, chain);
    if (ci->parsed()) return cmd_circuit(ctx, circ);
    if (fg->parsed()) return cmd_figures(ctx, figs);
  } catch (const ParameterError& e) {
    err << "netctl: " << e.what() << "\n";
    return 1;
  } catch (const NumericError& e) {
    err << "netctl: numeric failure: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace netctl
