// Acceptance harness: one PASS/FAIL line per criterion, with the measured
// numbers next to each verdict. Exits 0 once every criterion has been
// evaluated; an exception inside a criterion is reported as FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "netctl/augment.hpp"
#include "netctl/chains.hpp"
#include "netctl/circuit.hpp"
#include "netctl/errors.hpp"
#include "netctl/graph.hpp"
#include "netctl/linctrl.hpp"
#include "netctl/matching.hpp"
#include "netctl/models.hpp"
#include "netctl/rng.hpp"

using namespace netctl;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (ok ? "" : "[miss] ") << what << "; ";
  }
};

std::string g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::vector<double> sweep() {
  std::vector<double> p;
  for (int i = 0; i <= 10; ++i) p.push_back(0.1 * i);
  return p;
}

void criterion1(Verdict& v) {
  for (double k : {4.0, 6.0, 8.0}) {
    std::vector<double> nd;
    for (double pb : sweep()) {
      EnsembleConfig c;
      c.n = 200;
      c.avg_k = k;
      c.p_b = pb;
      c.trials = 200;
      c.depth = TrialDepth::Structure;
      c.master_seed = derive_seed(101, static_cast<std::uint64_t>(k * 1000 + pb * 10 + 0.5));
      const auto rec = run_ensemble(c);
      nd.push_back(mean_driver_density(rec));
    }
    const auto it = std::min_element(nd.begin(), nd.end());
    const double argmin = 0.1 * static_cast<double>(it - nd.begin());
    double asym = 0;
    for (std::size_t i = 0; i < nd.size(); ++i) asym = std::max(asym, std::abs(nd[i] - nd[10 - i]));
    std::ostringstream s;
    s << "k=" << k << " n_D(0)=" << g(nd[0]) << " n_D(0.5)=" << g(nd[5]) << " argmin P_b=" << g(argmin)
      << " max|n_D(p)-n_D(1-p)|=" << g(asym);
    v.check(argmin >= 0.3 - 1e-9 && argmin <= 0.7 + 1e-9 && *it < nd[0] && *it < nd[10] && asym <= 0.03,
            s.str());
  }
}

void criterion2(Verdict& v) {
  std::map<double, std::vector<double>> curve;
  for (double k : {4.0, 6.0}) {
    for (double pb : sweep()) {
      EnsembleConfig c;
      c.n = 100;
      c.avg_k = k;
      c.p_b = pb;
      c.t_f = 1;
      c.cw_threshold = 1e12;
      c.trials = 200;
      c.depth = TrialDepth::Condition;
      c.master_seed = derive_seed(202, static_cast<std::uint64_t>(k * 1000 + pb * 10 + 0.5));
      curve[k].push_back(practical_fraction(run_ensemble(c), c.cw_threshold));
    }
  }
  const auto& k6 = curve[6.0];
  double worst = 0;
  for (int i = 3; i <= 8; ++i) worst = std::max(worst, k6[i]);
  v.check(worst < 0.05, "k=6 max P(C_W) on [0.3,0.8]=" + g(worst));
  const auto& k4 = curve[4.0];
  const auto it = std::min_element(k4.begin(), k4.end());
  const double argmin = 0.1 * static_cast<double>(it - k4.begin());
  std::ostringstream s;
  s << "k=4 min P(C_W)=" << g(*it) << " at P_b=" << g(argmin) << " curve:";
  for (double x : k4) s << ' ' << g(x);
  v.check(*it <= 0.2 && argmin >= 0.5 - 1e-9 && argmin <= 0.7 + 1e-9, s.str());
}

// Shared by criteria 3 and 5.
std::vector<TrialRecord> energy_ensemble() {
  static std::vector<TrialRecord> rec;
  if (rec.empty()) {
    EnsembleConfig c;
    c.n = 100;
    c.avg_k = 6;
    c.p_b = 0.1;
    c.t_f = 1;
    c.cw_threshold = 1e14;
    c.trials = 3000;
    c.simulate = false;
    c.master_seed = 303;
    rec = run_ensemble(c);
  }
  return rec;
}

void criterion3(Verdict& v) {
  const auto rec = energy_ensemble();
  std::map<double, double> alpha;
  for (double th : {1e10, 1e12, 1e14}) {
    const auto e = controllable_energies(rec, th);
    const FitResult f = fit_power_law(e);
    alpha[th] = f.alpha;
    if (th == 1e12) {
      v.check(e.size() >= 2000, "controllable samples at 1e12=" + std::to_string(e.size()));
      v.check(std::abs(f.alpha - 1.5) <= 0.3,
              "alpha=" + g(f.alpha) + " x_min=" + g(f.x_min) + " tail=" + std::to_string(f.n_tail));
    }
  }
  double shift = 0;
  for (auto& [a, x] : alpha) {
    for (auto& [b, y] : alpha) shift = std::max(shift, std::abs(x - y));
  }
  v.check(shift < 0.3, "alpha at 1e10/1e12/1e14=" + g(alpha[1e10]) + "/" + g(alpha[1e12]) + "/" +
                           g(alpha[1e14]) + " shift=" + g(shift));
}

void criterion4(Verdict& v) {
  std::vector<double> ls, logs;
  double worst = 0;
  double cw8 = 0;
  for (std::size_t l = 2; l <= 8; ++l) {
    const ChainAnalytics c = chain_energy(l, 1.0, ChainDirection::Unidirectional);
    ls.push_back(static_cast<double>(l));
    logs.push_back(std::log10(c.e_l));
    worst = std::max(worst, std::abs(std::log10(c.e_l * c.lambda_h_min)));
    if (l == 8) cw8 = c.c_w;
  }
  const LinearFit fit = linear_fit(ls, logs);
  v.check(fit.r_squared > 0.95, "R^2=" + g(fit.r_squared) + " slope=" + g(fit.slope));
  v.check(worst <= 1, "max |log10(E_l lambda_H)|=" + g(worst));
  v.check(cw8 > 1e12, "C_W(l=8)=" + g(cw8));
}

void criterion5(Verdict& v) {
  const auto rec = energy_ensemble();
  std::map<std::size_t, std::vector<double>> by_dc;
  for (const auto& r : rec) {
    if (r.c_w < 1e12 && std::isfinite(r.energy) && r.d_c >= 3 && r.d_c <= 6) by_dc[r.d_c].push_back(r.energy);
  }
  std::vector<double> x, y;
  std::ostringstream s;
  for (const auto& [dc, es] : by_dc) {
    double mean = 0;
    for (double e : es) mean += e;
    mean /= static_cast<double>(es.size());
    const double el = chain_energy(dc, 1.0, ChainDirection::Unidirectional).e_l;
    x.push_back(std::log10(el));
    y.push_back(std::log10(mean));
    s << " d_c=" << dc << "(n=" << es.size() << ",<E>=" << g(mean) << ",E_L=" << g(el) << ")";
  }
  const double r = x.size() >= 2 ? pearson(x, y) : std::nan("");
  v.check(r > 0.7, "Pearson=" + g(r) + s.str());
}

void criterion6(Verdict& v) {
  // Chain of seven driven from its head, mid-chain redundant input.
  {
    const std::size_t l = 7;
    std::vector<Edge> edges;
    for (NodeId i = 0; i + 1 < l; ++i) edges.push_back({i, i + 1});
    const DirectedNetwork chain(l, edges);
    const std::vector<NodeId> drivers{0};
    const ChainProfile prof = control_profile(chain, drivers);
    const auto extras = place_redundant(chain, drivers, prof, Placement::Mid);
    const Eigen::VectorXd x0 = Eigen::VectorXd::Unit(l, l - 1);
    const Eigen::VectorXd xf = Eigen::VectorXd::Zero(l);
    const auto rep = reduction_report(chain, drivers, extras, 1.0, x0, xf);
    v.check(rep.ratio <= 1e-5, "chain l=7 mid node " + std::to_string(extras.at(0) + 1) +
                                   " ratio=" + g(rep.ratio));
  }
  {
    RcLadder ladder{7, 1.0, 1.0, {4}};
    const CircuitReport rep = circuit_report(ladder, 1.0, 7);
    v.check(!rep.ratios.empty() && rep.ratios[0] <= 1e-6,
            "circuit l=7 mid injection ratio=" + g(rep.ratios.empty() ? std::nan("") : rep.ratios[0]));
  }
  // Strategy comparison. P_b = 0 supplies the short diameters that P_b = 0.1
  // rarely produces.
  std::map<std::size_t, std::vector<StrategyComparison>> by_dc;
  const std::size_t want = 100;
  auto full = [&] {
    return by_dc[3].size() >= want && by_dc[4].size() >= want && by_dc[5].size() >= want;
  };
  for (double pb : {0.0, 0.1}) {
    EnsembleConfig c;
    c.n = 100;
    c.avg_k = 6;
    c.p_b = pb;
    c.depth = TrialDepth::Structure;
    for (std::uint64_t t = 0; t < 3000 && !full(); ++t) {
      const std::uint64_t seed = derive_seed(606 + static_cast<std::uint64_t>(pb * 10), t);
      const DirectedNetwork net = generate_network(c, seed);
      const MatchingResult m = maximum_matching(net);
      const ChainProfile prof = control_profile(net, m.drivers);
      if (prof.d_c < 3 || prof.d_c > 5 || by_dc[prof.d_c].size() >= want) continue;
      Rng rng(mix64(seed));
      const Eigen::VectorXd x0 = random_unit_vector(net.node_count(), rng);
      const Eigen::VectorXd xf = random_unit_vector(net.node_count(), rng);
      const StrategyComparison cmp = compare_strategies(net, m.drivers, 1.0, x0, xf, seed);
      if (!std::isfinite(cmp.energy) || !std::isfinite(cmp.mid_ratio) || !std::isfinite(cmp.end_ratio) ||
          !std::isfinite(cmp.random_mid_ratio) || !std::isfinite(cmp.random_end_ratio)) {
        continue;
      }
      by_dc[cmp.d_c].push_back(cmp);
    }
  }
  for (std::size_t dc = 3; dc <= 5; ++dc) {
    const auto& list = by_dc[dc];
    std::vector<double> mid, end, rmid, rend;
    for (const auto& c : list) {
      mid.push_back(c.mid_ratio);
      end.push_back(c.end_ratio);
      rmid.push_back(c.random_mid_ratio);
      rend.push_back(c.random_end_ratio);
    }
    if (list.size() < want) {
      v.check(false, "d_c=" + std::to_string(dc) + " only " + std::to_string(list.size()) + " networks");
      continue;
    }
    const double a = median(mid), b = median(rmid), c = median(end), d = median(rend);
    v.check(a < b && c < d, "d_c=" + std::to_string(dc) + " n=" + std::to_string(list.size()) +
                                " median mid " + g(a) + " vs random " + g(b) + ", end " + g(c) +
                                " vs random " + g(d));
  }
}

std::size_t brute_force_matching(const DirectedNetwork& net) {
  const auto& edges = net.edges();
  std::vector<bool> out(net.node_count()), in(net.node_count());
  std::function<std::size_t(std::size_t)> best = [&](std::size_t i) -> std::size_t {
    if (i == edges.size()) return 0;
    std::size_t r = best(i + 1);
    const Edge& e = edges[i];
    if (!out[e.src] && !in[e.dst]) {
      out[e.src] = in[e.dst] = true;
      r = std::max(r, 1 + best(i + 1));
      out[e.src] = in[e.dst] = false;
    }
    return r;
  };
  return best(0);
}

void criterion7(Verdict& v) {
  Rng rng(707);
  double worst_gram = 0;
  for (int t = 0; t < 40; ++t) {
    const std::size_t n = 4 + rng.below(17);
    const DirectedNetwork net = generate_er(n, 2.5, rng.uniform(), rng.below(1u << 30));
    const MatchingResult m = maximum_matching(net);
    const ControlMatrix b = control_matrix(m, {});
    const Eigen::MatrixXd a = net.system_matrix();
    const auto w1 = gramian(a, b, 1.0, GramianMethod::BlockExponential);
    const auto w2 = gramian(a, b, 1.0, GramianMethod::Quadrature);
    worst_gram = std::max(worst_gram, gramian_discrepancy(w1, w2));
  }
  v.check(worst_gram <= 1e-7, "Gramian block-exp vs quadrature max rel=" + g(worst_gram));

  double worst_energy = 0;
  int compared = 0;
  for (int t = 0; t < 60 && compared < 30; ++t) {
    const std::size_t n = 4 + rng.below(9);
    const DirectedNetwork net = generate_er(n, 2.0, rng.uniform(), rng.below(1u << 30));
    ControlProblem p;
    p.a = net.system_matrix();
    p.b = control_matrix(maximum_matching(net), {});
    p.t_f = 1.0;
    p.x0 = random_unit_vector(n, rng);
    p.xf = random_unit_vector(n, rng);
    ControlOutcome out;
    try {
      out = minimum_energy(p, {1e8, 2});
    } catch (const UncontrollableError&) {
      continue;
    }
    if (!out.controllable) continue;
    const OracleEnergy o = oracle_energy(p, 400);
    if (o.rank_deficient) continue;
    worst_energy = std::max(worst_energy, std::abs(o.energy - out.energy) / out.energy);
    ++compared;
  }
  v.check(compared >= 20 && worst_energy <= 0.02,
          "closed-form vs least-norm oracle max rel=" + g(worst_energy) + " over " +
              std::to_string(compared) + " systems");

  int mismatches = 0;
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 1 + rng.below(6);
    const double p = 0.1 + 0.4 * rng.uniform();
    std::vector<Edge> edges;
    for (NodeId i = 0; i < n; ++i) {
      for (NodeId j = 0; j < n; ++j) {
        if (rng.bernoulli(p)) edges.push_back({i, j});
      }
    }
    const DirectedNetwork net(n, edges);
    if (maximum_matching(net).matched_edges.size() != brute_force_matching(net)) ++mismatches;
  }
  v.check(mismatches == 0, "matching vs enumeration mismatches=" + std::to_string(mismatches) + "/500");
}

void criterion8(Verdict& v) {
  const DirectedNetwork net = generate_ba(5000, 4, 0.5, 808);
  std::vector<double> counts(51, 0.0);
  for (NodeId i = 0; i < net.node_count(); ++i) {
    const std::size_t k = net.successors(i).size();
    if (k >= 4 && k <= 50) counts[k] += 1;
  }
  const DegreeModel model = DegreeModel::power_law(3.0, 0.5, 4.0);
  std::vector<double> pdf(51, 0.0);
  for (std::size_t k = 4; k <= 50; ++k) pdf[k] = analytic_degree_pdf(model, static_cast<double>(k), DegreeSide::Out);
  double ce = 0, ca = 0, te = 0, ta = 0, ks = 0;
  for (std::size_t k = 4; k <= 50; ++k) {
    te += counts[k];
    ta += pdf[k];
  }
  for (std::size_t k = 4; k <= 50; ++k) {
    ce += counts[k] / te;
    ca += pdf[k] / ta;
    ks = std::max(ks, std::abs(ce - ca));
  }
  v.check(ks < 0.05, "KS on k_out in [4,50]=" + g(ks) + " over " + g(te) + " nodes");
}

void criterion9(Verdict& v) {
  DoubleChainConfig c;
  c.master_seed = 909;
  const DoubleChainResult r = double_chain_ensemble(c);
  const FitResult f = fit_power_law(r.energies);
  v.check(std::abs(f.alpha - 1.5) <= 0.3, "alpha=" + g(f.alpha) + " x_min=" + g(f.x_min) + " tail=" +
                                               std::to_string(f.n_tail) + " of " +
                                               std::to_string(r.energies.size()));

  // Without cross links the energy splits into the two chains' energies.
  Rng rng(910);
  double worst = 0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t l1 = 3 + rng.below(4), l2 = 3 + rng.below(4);
    const DirectedNetwork net = double_chain_network(l1, l2, 0.0, 0.5, rng);
    ControlProblem p;
    p.a = net.system_matrix();
    p.b = ControlMatrix::from_nodes(l1 + l2, std::vector<NodeId>{0, l1});
    p.t_f = 1.0;
    p.x0 = random_unit_vector(l1 + l2, rng);
    p.xf = random_unit_vector(l1 + l2, rng);
    const double joint = minimum_energy(p, {1e300, 2}).energy;
    double split = 0;
    for (auto [off, len] : {std::pair{std::size_t{0}, l1}, std::pair{l1, l2}}) {
      ControlProblem q;
      q.a = chain_matrix(len, ChainDirection::Unidirectional);
      q.b = ControlMatrix::from_nodes(len, std::vector<NodeId>{0});
      q.t_f = 1.0;
      q.x0 = p.x0.segment(off, len);
      q.xf = p.xf.segment(off, len);
      split += minimum_energy(q, {1e300, 2}).energy;
    }
    worst = std::max(worst, std::abs(joint - split) / split);
  }
  v.check(worst <= 0.01, "p=0 joint vs chain sum max rel=" + g(worst));
}

DirectedNetwork florida_like(std::size_t n, double p, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Edge> edges;
  for (NodeId i = 0; i < n; ++i) {
    edges.push_back({i, i});
    for (NodeId j = i + 1; j < n; ++j) {
      if (rng.bernoulli(p)) {
        edges.push_back({i, j});
        edges.push_back({j, i});
      }
    }
  }
  return DirectedNetwork(n, edges);
}

void criterion10(Verdict& v) {
  int zero = 0, full_rank = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const DirectedNetwork net = generate_er(60, 4, 0.1, 1000 + s);
    const auto rep = augment_uncontrollable(net, maximum_matching(net), 1.0);
    if (rep.c_w_history.empty() || rep.c_w_history[0] >= 1e13) continue;
    ++full_rank;
    if (rep.m_star == 0) ++zero;
  }
  v.check(full_rank >= 5 && zero == full_rank,
          "M*=0 on " + std::to_string(zero) + "/" + std::to_string(full_rank) + " full-rank ER analogues");

  const DirectedNetwork fl = florida_like(40, 0.6, 2);
  const auto rep = augment_uncontrollable(fl, maximum_matching(fl), 1.0);
  v.check(!rep.practically_controllable && std::isnan(rep.e_after) &&
              rep.augmented_drivers.size() == fl.node_count(),
          "Florida-like: M*=" + std::to_string(rep.m_star) + " inputs=" +
              std::to_string(rep.augmented_drivers.size()) + " C_W=" + g(rep.c_w_after) +
              " energy=" + g(rep.e_after));

  const auto row = table_row("florida-like", fl, 1.0);
  const std::vector<std::string> keys{"name", "N",    "ND",   "Mstar", "nD", "nDstar",
                                      "Estar", "Mmid", "Emid", "Mend",  "Eend", "DC"};
  bool schema = row.size() == keys.size();
  for (const auto& k : keys) schema = schema && row.contains(k);
  v.check(schema && row["Estar"].is_null(), "summary row keys=" + std::to_string(row.size()));
}

}  // namespace

int main(int argc, char** argv) {
  // Optional arguments pick criteria by number.
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  const std::vector<std::pair<int, std::function<void(Verdict&)>>> criteria{
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},  {5, criterion5},
      {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9}, {10, criterion10}};
  int passed = 0;
  // The verdicts also go to a report file, since ctest hides the output of
  // passing tests.
  std::FILE* report = std::fopen("acceptance_report.txt", "w");
  std::size_t ran = 0;
  for (const auto& [id, fn] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    ++ran;
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    try {
      fn(v);
    } catch (const std::exception& e) {
      v.check(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (v.pass) ++passed;
    for (std::FILE* f : {stdout, report}) {
      if (!f) continue;
      std::fprintf(f, "%s criterion %d (%.1fs): %s\n", v.pass ? "PASS" : "FAIL", id, secs, v.detail.str().c_str());
      std::fflush(f);
    }
  }
  std::printf("%d/%zu criteria passed\n", passed, ran);
  if (report) {
    std::fprintf(report, "%d/%zu criteria passed\n", passed, ran);
    std::fclose(report);
  }
  return 0;
}
