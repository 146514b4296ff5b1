#include <gtest/gtest.h>

#include "support/instances.hpp"
#include "treecover/metric.hpp"

using namespace treecover;

namespace {

template <class Fn>
Errc code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return Errc::invalid_argument;
}

}  // namespace

TEST(MetricFromGraph, SingleEdge) {
  auto m = metric_from_graph(WeightedGraph(2, {{0, 1, 5.0}}));
  EXPECT_EQ(m(0, 1), 5.0);
  EXPECT_EQ(m(1, 0), 5.0);
}

TEST(MetricFromGraph, UnitFourCycle) {
  auto m = metric_from_graph(testkit::cycle_graph(4));
  EXPECT_EQ(m(0, 2), 2.0);
  EXPECT_EQ(m(0, 1), 1.0);
  EXPECT_EQ(m(1, 3), 2.0);
}

TEST(MetricFromGraph, UnitPath) {
  auto m = metric_from_graph(testkit::path_graph(5));
  EXPECT_EQ(m(0, 4), 4.0);
}

TEST(MetricFromGraph, DisconnectedNamesVertex) {
  WeightedGraph g(4, {{0, 1, 1.0}, {2, 3, 1.0}});
  try {
    metric_from_graph(g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::disconnected);
    EXPECT_NE(std::string(e.what()).find("disconnected"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("vertex 2"), std::string::npos);
  }
}

TEST(MetricFromGraph, TriangleInequalityOnRandomGraphs) {
  Rng rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    auto m = testkit::random_graph_metric(40 + 30 * trial, rng);
    EXPECT_EQ(triangle_violations(m), 0u);
  }
  auto grid = metric_from_graph(testkit::grid_graph(14, 14, &rng));
  EXPECT_EQ(triangle_violations(grid), 0u);
}

TEST(WeightedGraphTest, RejectsBadEdges) {
  EXPECT_EQ(code_of([] { WeightedGraph(3, {{1, 1, 1.0}}); }), Errc::invalid_graph);
  EXPECT_EQ(code_of([] { WeightedGraph(3, {{0, 1, 1.0}, {1, 0, 2.0}}); }), Errc::invalid_graph);
  EXPECT_EQ(code_of([] { WeightedGraph(3, {{0, 1, 0.0}}); }), Errc::invalid_graph);
  EXPECT_EQ(code_of([] { WeightedGraph(3, {{0, 5, 1.0}}); }), Errc::invalid_graph);
}

TEST(FiniteMetricTest, ValidatesMatrix) {
  EXPECT_EQ(code_of([] { FiniteMetric(2, {0, 1, 2, 0}); }), Errc::invalid_metric);
  EXPECT_EQ(code_of([] { FiniteMetric(2, {0, 0, 0, 0}); }), Errc::invalid_metric);
  EXPECT_EQ(code_of([] { FiniteMetric(2, {1, 1, 1, 0}); }), Errc::invalid_metric);
  EXPECT_EQ(code_of([] { FiniteMetric(2, {0, 1, 1}); }), Errc::invalid_metric);
  FiniteMetric bad(3, {0, 1, 5, 1, 0, 1, 5, 1, 0});
  EXPECT_GT(triangle_violations(bad), 0u);
}

TEST(AspectRatio, Examples) {
  EXPECT_EQ(aspect_ratio(testkit::uniform_metric(4)), 1.0);
  EXPECT_EQ(aspect_ratio(testkit::line_metric(5)), 4.0);
  EXPECT_EQ(aspect_ratio(metric_from_graph(testkit::cycle_graph(6))), 3.0);
}

TEST(AspectRatio, DegenerateMetric) {
  try {
    aspect_ratio(FiniteMetric(1, {0.0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::degenerate_metric);
    EXPECT_NE(std::string(e.what()).find("degenerate metric"), std::string::npos);
  }
}

TEST(AspectRatio, ScaleInvariant) {
  Rng rng(3);
  auto m = testkit::random_graph_metric(30, rng);
  for (double c : {0.001, 0.37, 3.0, 1e5}) {
    double a = aspect_ratio(m), b = aspect_ratio(m.scaled(c));
    EXPECT_LE(std::abs(a - b), 1e-9 * a);
  }
}

TEST(Doubling, SinglePoint) {
  FiniteMetric one(1, {0.0});
  EXPECT_EQ(doubling_constant_estimate(one), 1);
  EXPECT_EQ(doubling_constant_exact(one), 1);
}

TEST(Doubling, UniformFour) {
  auto m = testkit::uniform_metric(4);
  EXPECT_EQ(doubling_constant_estimate(m), 4);
  EXPECT_EQ(doubling_constant_exact(m), 4);
}

TEST(Doubling, EightCycleExactAtMostSix) {
  auto m = metric_from_graph(testkit::cycle_graph(8));
  EXPECT_LE(doubling_constant_exact(m), 6);
  EXPECT_GE(doubling_constant_estimate(m), doubling_constant_exact(m));
}

TEST(Doubling, EstimateNeverBelowExact) {
  Rng rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    std::size_t n = 3 + rng.index(10);
    auto m = trial % 2 ? testkit::random_small_metric(n, rng) : testkit::snapped_points(n, 6, 1.0, rng);
    EXPECT_GE(doubling_constant_estimate(m), doubling_constant_exact(m)) << "trial " << trial;
  }
}

TEST(Doubling, ExactRejectsLargeInputs) {
  EXPECT_EQ(code_of([] { doubling_constant_exact(testkit::line_metric(17)); }), Errc::invalid_argument);
}

TEST(ShortestPathTreeTest, ParentsFollowShortestPaths) {
  Rng rng(5);
  auto g = testkit::grid_graph(6, 6, &rng);
  auto spt = shortest_path_tree(g, 0);
  for (std::size_t v = 1; v < g.size(); ++v) {
    int p = spt.parent[v];
    ASSERT_GE(p, 0);
    double w = 0;
    for (const auto& a : g.neighbors(v))
      if (a.to == p) w = a.w;
    EXPECT_DOUBLE_EQ(spt.dist[v], spt.dist[p] + w);
  }
}
