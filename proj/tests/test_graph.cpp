#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "netctl/errors.hpp"
#include "netctl/graph.hpp"

using namespace netctl;

namespace {

std::vector<std::size_t> undirected_degrees(const DirectedNetwork& net) {
  std::vector<std::size_t> deg(net.node_count(), 0);
  for (const Edge& e : net.edges()) {
    ++deg[e.src];
    ++deg[e.dst];
  }
  return deg;
}

}  // namespace

TEST(Graph, ConstructorRejectsBadEdges) {
  EXPECT_THROW(DirectedNetwork(3, {{0, 3}}), ParameterError);
  EXPECT_THROW(DirectedNetwork(3, {{0, 1}, {0, 1}}), ParameterError);
  EXPECT_THROW(DirectedNetwork(3, {{0, 1}}, {1.0, 2.0}), ParameterError);
}

TEST(Graph, SystemMatrixConvention) {
  DirectedNetwork net(3, {{0, 1}, {2, 1}}, {2.5, -1.0});
  const auto a = net.system_matrix();
  EXPECT_EQ(a(1, 0), 2.5);
  EXPECT_EQ(a(1, 2), -1.0);
  EXPECT_EQ(a.cwiseAbs().sum(), 3.5);
}

TEST(Graph, ErDeterministic) {
  auto a = generate_er(100, 6, 0.1, 7);
  auto b = generate_er(100, 6, 0.1, 7);
  EXPECT_EQ(to_edge_list(a), to_edge_list(b));
  EXPECT_NE(to_edge_list(a), to_edge_list(generate_er(100, 6, 0.1, 8)));
  EXPECT_FALSE(a.has_self_loops());
}

TEST(Graph, ErOrientationExtremes) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    for (double pb : {0.0, 1.0}) {
      auto net = generate_er(100, 6, pb, seed);
      const auto deg = undirected_degrees(net);
      for (const Edge& e : net.edges()) {
        if (deg[e.src] == deg[e.dst]) continue;
        if (pb == 0.0) EXPECT_LT(deg[e.src], deg[e.dst]);
        else EXPECT_GT(deg[e.src], deg[e.dst]);
      }
    }
  }
}

TEST(Graph, ErMeanEdgeCount) {
  double sum = 0;
  const int trials = 100;
  for (int s = 0; s < trials; ++s) sum += static_cast<double>(generate_er(200, 6, 0.5, s).edge_count());
  const double p = 6.0 / 199.0;
  const double pairs = 200.0 * 199.0 / 2.0;
  const double sd_of_mean = std::sqrt(pairs * p * (1 - p) / trials);
  EXPECT_NEAR(sum / trials, 600.0, 3 * sd_of_mean);
}

TEST(Graph, ErParameterErrors) {
  EXPECT_THROW(generate_er(1, 0.5, 0.1, 1), ParameterError);
  EXPECT_THROW(generate_er(10, 9.5, 0.1, 1), ParameterError);
  EXPECT_THROW(generate_er(10, 2, 1.5, 1), ParameterError);
}

TEST(Graph, BaBasics) {
  EXPECT_THROW(generate_ba(10, 9, 0.5, 1), ParameterError);
  EXPECT_THROW(generate_ba(10, 0, 0.5, 1), ParameterError);
  auto a = generate_ba(100, 4, 0.3, 3);
  EXPECT_EQ(to_edge_list(a), to_edge_list(generate_ba(100, 4, 0.3, 3)));
  // Clique of 5 plus 4 edges for each later node.
  EXPECT_EQ(a.edge_count(), 10u + 95u * 4u);
}

TEST(Graph, BaDegreeExponent) {
  auto net = generate_ba(1000, 4, 0.5, 1);
  const auto deg = undirected_degrees(net);
  // Discrete MLE approximation with the half-integer shift.
  const double kmin = 6;
  double s = 0;
  std::size_t count = 0;
  for (auto d : deg) {
    if (d >= kmin) {
      s += std::log(static_cast<double>(d) / (kmin - 0.5));
      ++count;
    }
  }
  const double alpha = 1.0 + static_cast<double>(count) / s;
  EXPECT_NEAR(alpha, 3.0, 0.4);
}

TEST(Graph, LoadEdgeList) {
  std::istringstream in("0 1\n1 2\n");
  auto r = load_edge_list(in, false);
  EXPECT_EQ(r.network.node_count(), 3u);
  EXPECT_EQ(r.network.edges(), (std::vector<Edge>{{0, 1}, {1, 2}}));

  std::istringstream loops("0 0\n0 1\n");
  auto l = load_edge_list(loops, true);
  EXPECT_EQ(l.network.node_count(), 2u);
  EXPECT_EQ(l.network.edge_count(), 1u);
  EXPECT_EQ(l.self_loops_dropped, 1u);

  std::istringstream kept("0 0\n0 1\n");
  EXPECT_TRUE(load_edge_list(kept, false).network.has_self_loops());

  std::istringstream dup("# comment\n0 1\n\n0 1\n");
  auto d = load_edge_list(dup, false);
  EXPECT_EQ(d.network.edge_count(), 1u);
  EXPECT_EQ(d.duplicates_dropped, 1u);
}

TEST(Graph, LoadEdgeListErrors) {
  auto line_of = [](const std::string& text) -> std::size_t {
    std::istringstream in(text);
    try {
      load_edge_list(in, false);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  EXPECT_EQ(line_of("0 1\n1 x\n"), 2u);
  EXPECT_EQ(line_of("0 1\n\n-1 2\n"), 3u);
  EXPECT_EQ(line_of("0 1.5\n"), 1u);
  EXPECT_EQ(line_of("0 1 2\n"), 1u);
  std::istringstream empty("# nothing\n");
  EXPECT_THROW(load_edge_list(empty, false), ParseError);
}

TEST(Graph, RoundTrips) {
  auto net = generate_er(50, 4, 0.2, 11);
  std::istringstream in(to_edge_list(net));
  auto back = load_edge_list(in, false).network;
  auto sorted = [](std::vector<Edge> e) {
    std::sort(e.begin(), e.end());
    return e;
  };
  EXPECT_EQ(sorted(back.edges()), sorted(net.edges()));

  DirectedNetwork weighted(3, {{0, 1}, {1, 2}}, {0.5, 2.0});
  auto j = to_json(weighted);
  auto again = network_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(again.edges(), weighted.edges());
  EXPECT_EQ(again.weights(), weighted.weights());
  EXPECT_EQ(again.system_matrix(), weighted.system_matrix());
  EXPECT_EQ(network_from_json(to_json(net)).meta().seed, net.meta().seed);
}

TEST(DegreePdf, CaseHalf) {
  auto m = DegreeModel::power_law(2.5, 0.5, 2);
  for (double k : {1.5, 3.0, 10.0}) {
    EXPECT_NEAR(analytic_degree_pdf(m, k, DegreeSide::Out),
                std::pow(2.0, -1.5) * m.c_norm * std::pow(k, -2.5), 1e-14);
  }
}

TEST(DegreePdf, CaseGammaThree) {
  auto m = DegreeModel::power_law(3.0, 0.7, 2);
  // With an unbounded support the larger-neighbour scale equals k_min.
  EXPECT_NEAR(m.larger_neighbour_scale(), 2.0, 1e-12);
  for (double k : {3.0, 5.0, 20.0}) {
    EXPECT_NEAR(analytic_degree_pdf(m, k, DegreeSide::Out),
                m.c_norm * std::pow(0.7, 2.0) * std::pow(k + 0.4 * 2.0, -3.0), 1e-13);
  }
}

TEST(DegreePdf, PureLargeExponent) {
  auto m = DegreeModel::power_law(2.5, 0.0, 2);
  const double r = analytic_degree_pdf(m, 40, DegreeSide::Out) /
                   analytic_degree_pdf(m, 20, DegreeSide::Out);
  EXPECT_NEAR(std::log2(r), -4.0, 1e-9);
}

TEST(DegreePdf, ClosedFormsMatchNumericInversion) {
  for (double lambda : {0.0, 0.5, 1.0}) {
    auto m = DegreeModel::power_law(2.5, lambda, 2, 500);
    for (auto side : {DegreeSide::In, DegreeSide::Out}) {
      for (double frac : {0.2, 0.5, 0.8}) {
        const double lo = m.directed_degree(m.k_min, side);
        const double hi = m.directed_degree(m.k_max, side);
        const double k = std::min(lo, hi) + frac * std::abs(hi - lo);
        const double a = analytic_degree_pdf(m, k, side);
        const double b = numeric_degree_pdf(m, k, side);
        EXPECT_NEAR(a, b, 1e-7 * std::max(a, 1e-300)) << lambda << " " << k;
      }
    }
  }
  auto m3 = DegreeModel::power_law(3.0, 0.3, 2);
  for (double k : {2.0, 6.0, 30.0}) {
    const double a = analytic_degree_pdf(m3, k, DegreeSide::In);
    EXPECT_NEAR(a, numeric_degree_pdf(m3, k, DegreeSide::In), 1e-7 * a);
  }
}

TEST(DegreePdf, NumericNormalises) {
  auto m = DegreeModel::power_law(2.7, 0.3, 2, 200);
  for (auto side : {DegreeSide::In, DegreeSide::Out}) {
    const double lo = std::min(m.directed_degree(m.k_min, side), m.directed_degree(m.k_max, side));
    const double hi = std::max(m.directed_degree(m.k_min, side), m.directed_degree(m.k_max, side));
    // Midpoint rule on a log grid.
    const int n = 20000;
    double total = 0;
    for (int i = 0; i < n; ++i) {
      const double x0 = lo * std::pow(hi / lo, static_cast<double>(i) / n);
      const double x1 = lo * std::pow(hi / lo, static_cast<double>(i + 1) / n);
      total += numeric_degree_pdf(m, 0.5 * (x0 + x1), side) * (x1 - x0);
    }
    EXPECT_NEAR(total, 1.0, 2e-2);
  }
}

TEST(DegreePdf, DomainErrors) {
  EXPECT_THROW(DegreeModel::power_law(2.0, 0.5, 2), DomainError);
  EXPECT_THROW(DegreeModel::power_law(2.5, 1.5, 2), ParameterError);
  EXPECT_THROW(DegreeModel::power_law(2.5, 0.5, 0.5), ParameterError);
}
