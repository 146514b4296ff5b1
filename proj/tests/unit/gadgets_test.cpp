#include <gtest/gtest.h>

#include <cmath>

#include "support/instances.hpp"
#include "treecover/gadgets.hpp"
#include "treecover/planar.hpp"

using namespace treecover;

TEST(CycleMetric, SmallCases) {
  auto c3 = cycle_metric(3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_EQ(c3(i, j), i == j ? 0.0 : 1.0);
  auto c6 = cycle_metric(6);
  EXPECT_EQ(c6(0, 3), 3.0);
  EXPECT_EQ(c6(0, 2), 2.0);
  EXPECT_EQ(c6(1, 5), 2.0);
  EXPECT_EQ(cycle_metric(8).max_distance(), 4.0);
  EXPECT_THROW(cycle_metric(2), Error);
}

TEST(CycleMetric, MatchesCycleGraph) {
  for (std::size_t n : {5u, 9u, 12u}) {
    auto a = cycle_metric(n);
    auto b = metric_from_graph(testkit::cycle_graph(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) EXPECT_EQ(a(i, j), b(i, j));
  }
}

TEST(BetaComposition, SingletonInnerIsOuter) {
  auto s = cycle_metric(5);
  FiniteMetric one(1, {0.0});
  auto z = beta_composition({s, one, 2.0});
  ASSERT_EQ(z.size(), 5u);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) EXPECT_EQ(z(i, j), s(i, j));
}

TEST(BetaComposition, FourCycleHalf) {
  auto c4 = cycle_metric(4);
  CompositionSpec spec{c4, c4, 0.5};
  EXPECT_EQ(spec.gamma(), 2.0);
  auto z = beta_composition(spec);
  ASSERT_EQ(z.size(), 16u);
  for (int a = 0; a < 16; ++a)
    for (int b = 0; b < 16; ++b) {
      if (a / 4 == b / 4) {
        EXPECT_EQ(z(a, b), c4(a % 4, b % 4));  // scale 1 / (beta gamma) = 1
      } else {
        EXPECT_EQ(z(a, b), c4(a / 4, b / 4));
      }
    }
  EXPECT_EQ(triangle_violations(z), 0u);
}

TEST(BetaComposition, EightCycleBetaThree) {
  auto c8 = cycle_metric(8);
  CompositionSpec spec{c8, c8, 3.0};
  EXPECT_EQ(spec.gamma(), 4.0);
  auto z = beta_composition(spec);
  // same-copy scale 1 / (beta gamma) = 1 / 12
  EXPECT_DOUBLE_EQ(z(0, 4), 4.0 / 12.0);
  EXPECT_DOUBLE_EQ(z(9, 10), 1.0 / 12.0);
  EXPECT_EQ(z(0, 8), 1.0);
  EXPECT_EQ(triangle_violations(z), 0u);
}

TEST(BetaComposition, TriangleInequalityAcrossInputs) {
  Rng rng(6);
  for (int trial = 0; trial < 8; ++trial) {
    auto s = testkit::random_small_metric(2 + rng.index(8), rng);
    auto t = testkit::random_small_metric(1 + rng.index(8), rng);
    for (double beta : {0.5, 1.0, 3.0}) {
      auto z = beta_composition({s, t, beta});
      EXPECT_EQ(triangle_violations(z), 0u);
    }
  }
}

TEST(BetaComposition, RejectsSmallBeta) {
  auto c4 = cycle_metric(4);
  EXPECT_THROW(beta_composition({c4, c4, 0.25}), Error);
}

TEST(CompositionPower, DepthOneIsTheCycle) {
  auto z = composition_power(7, 1, 0.5);
  auto c = cycle_metric(7);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) EXPECT_EQ(z(i, j), c(i, j));
}

TEST(CompositionPower, FourCycleSquared) {
  auto z = composition_power(4, 2, 0.5);
  ASSERT_EQ(z.size(), 16u);
  auto c4 = cycle_metric(4);
  for (int a = 0; a < 16; ++a)
    for (int b = 0; b < 16; ++b)
      if (a / 4 != b / 4) {
        EXPECT_EQ(z(a, b), c4(a / 4, b / 4));
      }
}

TEST(CompositionPower, DiameterIsTheCycleDiameter) {
  for (auto [n, k] : std::vector<std::pair<std::size_t, int>>{{4, 2}, {5, 2}, {6, 3}, {9, 2}})
    EXPECT_EQ(composition_power(n, k, 0.5).max_distance(), double(n / 2));
  EXPECT_EQ(composition_power(4, 3, 3.0).max_distance(), 2.0);
}

TEST(CompositionPower, SizeCap) {
  try {
    composition_power(10, 5, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::size_cap);
  }
  EXPECT_THROW(composition_power(4, 3, 0.5, 50), Error);
}

TEST(RecursiveCycleGraph, DiameterIsPowerOfThreeN) {
  for (auto [n, k] : std::vector<std::pair<std::size_t, int>>{{2, 1}, {2, 2}, {3, 1}, {3, 2}, {2, 3}}) {
    auto g = recursive_cycle_graph(n, k);
    auto m = metric_from_graph(g.graph);
    EXPECT_EQ(m.max_distance(), std::pow(3.0 * n, k)) << n << "," << k;
    EXPECT_EQ(m(g.s, g.t), std::pow(3.0 * n, k));
  }
}

TEST(RecursiveCycleGraph, ClosedFormSizesAndPlanarity) {
  for (auto [n, k] : std::vector<std::pair<std::size_t, int>>{{2, 1}, {2, 2}, {3, 2}, {2, 3}, {4, 2}}) {
    auto g = recursive_cycle_graph(n, k);
    EXPECT_EQ(g.graph.size(), recursive_cycle_vertex_count(n, k));
    EXPECT_EQ(g.graph.edges().size(), recursive_cycle_edge_count(n, k));
    EXPECT_EQ(g.inner.size(), std::size_t(std::pow(2.0 * n, k)));
    EXPECT_TRUE(is_planar(g.graph));
    EXPECT_TRUE(g.graph.connected());
  }
  EXPECT_EQ(recursive_cycle_vertex_count(2, 1), 6u);
  EXPECT_EQ(recursive_cycle_vertex_count(2, 2), 22u);
}

TEST(RecursiveCycleGraph, SizeCap) {
  EXPECT_THROW(recursive_cycle_graph(10, 6), Error);
  EXPECT_THROW(recursive_cycle_graph(2, 3, 50), Error);
}

TEST(RecursiveCycleGraph, InnerMetricDoublingConstant) {
  auto g = recursive_cycle_graph(3, 1);
  auto m = metric_from_graph(g.graph).restricted(g.inner);
  EXPECT_LE(doubling_constant_exact(m), 6);
  EXPECT_LE(doubling_constant_estimate(m), 6);
}

TEST(RecursiveCycleGraph, CrossCopyLowerBound) {
  const std::size_t n = 2;
  const int k = 2;
  auto g = recursive_cycle_graph(n, k);
  auto m = metric_from_graph(g.graph);
  const std::size_t per_copy = std::size_t(std::pow(2.0 * n, k - 1));
  const int cycle = int(2 * n);
  for (std::size_t a = 0; a < g.inner.size(); ++a)
    for (std::size_t b = 0; b < g.inner.size(); ++b) {
      const int i = int(a / per_copy), j = int(b / per_copy);
      if (i == j) continue;
      const int c = std::min(std::abs(i - j), cycle - std::abs(i - j));
      EXPECT_GE(m(g.inner[a], g.inner[b]), 2.0 * c * n * std::pow(3.0 * n, k - 2));
    }
}

TEST(CompositionEmbeddingTest, DepthOneIsIsometric) {
  auto e = embed_composition_in_cycle_graph(3, 1);
  EXPECT_EQ(e.scale, 1.0);
  EXPECT_EQ(e.distortion, 1.0);
}

TEST(CompositionEmbeddingTest, TwoTwoRegression) {
  // Frozen from the first measured run: contraction 2/3, expansion 4/3.
  auto e = embed_composition_in_cycle_graph(2, 2);
  EXPECT_EQ(e.vertex_of_point.size(), 16u);
  EXPECT_DOUBLE_EQ(e.scale, 1.0 / 6.0);
  EXPECT_NEAR(e.min_ratio, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(e.max_ratio, 4.0 / 3.0, 1e-12);
  EXPECT_NEAR(e.distortion, 2.0, 1e-12);
}

TEST(CompositionEmbeddingTest, DistortionStaysConstantWithDepth) {
  for (auto [n, k] : std::vector<std::pair<std::size_t, int>>{{3, 2}, {2, 3}})
    EXPECT_LE(embed_composition_in_cycle_graph(n, k).distortion, 2.0 + 1e-9);
}
