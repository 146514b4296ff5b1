#include <gtest/gtest.h>

#include <cmath>

#include "support/instances.hpp"
#include "treecover/separator_cover.hpp"

using namespace treecover;

namespace {

std::size_t largest_component(const WeightedGraph& g, const PathSeparator& sep) {
  std::vector<char> removed(g.size(), 0);
  for (int v : sep.removed) removed[v] = 1;
  std::size_t best = 0;
  for (const auto& c : components_without(g, removed)) best = std::max(best, c.size());
  return best;
}

void expect_shortest_paths(const WeightedGraph& g, const PathSeparator& sep) {
  for (const auto& p : sep.paths) {
    auto d = shortest_distances(g, p.front());
    EXPECT_NO_THROW(shortest_path_prefix(g, p, d));
  }
}

WeightedGraph k5() {
  std::vector<Edge> e;
  for (int a = 0; a < 5; ++a)
    for (int b = a + 1; b < 5; ++b) e.push_back({a, b, 1.0});
  return WeightedGraph(5, e);
}

WeightedGraph k33() {
  std::vector<Edge> e;
  for (int a = 0; a < 3; ++a)
    for (int b = 3; b < 6; ++b) e.push_back({a, b, 1.0});
  return WeightedGraph(6, e);
}

}  // namespace

TEST(PlanarSeparator, PathGraphIsOnePath) {
  auto g = testkit::path_graph(9);
  auto sep = planar_separator(g);
  ASSERT_EQ(sep.paths.size(), 1u);
  EXPECT_EQ(sep.removed.size(), 9u);
  EXPECT_EQ(largest_component(g, sep), 0u);
  expect_shortest_paths(g, sep);
}

TEST(PlanarSeparator, SingleVertex) {
  WeightedGraph g(1, {});
  auto sep = planar_separator(g);
  EXPECT_TRUE(sep.paths.empty());
  EXPECT_TRUE(sep.removed.empty());
}

TEST(PlanarSeparator, FourByFourGrid) {
  auto g = testkit::grid_graph(4, 4);
  auto sep = planar_separator(g);
  EXPECT_LE(sep.paths.size(), 3u);
  EXPECT_LE(largest_component(g, sep), 8u);
  expect_shortest_paths(g, sep);
}

TEST(PlanarSeparator, HalvesRandomPlanarGraphs) {
  Rng rng(31);
  for (int trial = 0; trial < 12; ++trial) {
    auto g = trial % 2 ? testkit::random_outerplanar(20 + rng.index(60), rng)
                       : testkit::grid_graph(3 + rng.index(8), 3 + rng.index(8), &rng);
    auto sep = planar_separator(g);
    EXPECT_LE(sep.paths.size(), 3u);
    EXPECT_LE(2 * largest_component(g, sep), g.size());
    expect_shortest_paths(g, sep);
  }
}

TEST(PlanarSeparator, RejectsNonPlanar) {
  for (const auto& g : {k5(), k33()}) {
    try {
      planar_separator(g);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::non_planar);
      EXPECT_STREQ(e.what(), "non-planar input");
    }
  }
}

TEST(Landmarks, PathVertexIsItsOwnNearest) {
  auto g = testkit::grid_graph(5, 5);
  std::vector<int> row{10, 11, 12, 13, 14};
  auto L = landmarks(g, row, 0.25);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(L.vertices(row[i]).front(), row[i]);
}

TEST(Landmarks, SizeBoundOnPlanarGraphs) {
  Rng rng(3);
  for (int trial = 0; trial < 6; ++trial) {
    auto g = testkit::grid_graph(7, 6, &rng);
    auto sep = planar_separator(g);
    for (const auto& p : sep.paths) {
      auto L = landmarks(g, p, 0.5);
      EXPECT_LE(L.max_size(), 16u);
    }
  }
}

TEST(Landmarks, CoverageOnFiveByFiveGrid) {
  auto g = testkit::grid_graph(5, 5);
  std::vector<int> row{10, 11, 12, 13, 14};
  auto L = landmarks(g, row, 0.25);
  auto check = landmark_coverage(metric_from_graph(g), L, 0.25);
  EXPECT_GT(check.crossing_pairs, 0u);
  EXPECT_EQ(check.violations, 0u);
}

TEST(Landmarks, CoverageOnWeightedGraphs) {
  Rng rng(17);
  for (int trial = 0; trial < 6; ++trial) {
    auto g = testkit::random_outerplanar(40, rng);
    auto sep = planar_separator(g);
    auto apsp = metric_from_graph(g);
    for (double eps : {0.5, 0.2}) {
      for (const auto& p : sep.paths) {
        auto L = landmarks(g, p, eps);
        EXPECT_LE(double(L.max_size()), 8.0 / eps);
        EXPECT_EQ(landmark_coverage(apsp, L, eps).violations, 0u);
      }
    }
  }
}

TEST(Landmarks, RejectsNonShortestPath) {
  auto g = testkit::cycle_graph(6);
  std::vector<int> detour{0, 1, 2, 3, 4};  // 0..4 is shorter the other way round
  try {
    landmarks(g, detour, 0.25);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::invalid_separator_path);
  }
  std::vector<int> jump{0, 2};
  EXPECT_THROW(landmarks(g, jump, 0.25), Error);
}

TEST(SeparatorCover, SingleEdge) {
  WeightedGraph g(2, {{0, 1, 2.5}});
  auto res = build_separator_cover(g, 0.25, 4.0, 1);
  EXPECT_EQ(res.cover.trees.size(), 1u);
  EXPECT_EQ(res.report.plain_distortion, 1.0);
}

TEST(SeparatorCover, SixBySixGrid) {
  auto g = testkit::grid_graph(6, 6);
  auto res = build_separator_cover(g, 0.25, 4.0, 7);
  EXPECT_TRUE(res.report.domination_ok);
  EXPECT_LE(res.report.plain_distortion, 1.25 * (1 + 1e-9));
  EXPECT_EQ(res.cover.kind, CoverKind::plain);
  EXPECT_DOUBLE_EQ(res.cover.claimed_distortion, 1.25);
  EXPECT_LE(res.depth, int(std::ceil(std::log2(36.0))) + 1);
}

TEST(SeparatorCover, OuterplanarFiftyVertices) {
  Rng rng(50);
  auto g = testkit::random_outerplanar(50, rng);
  auto res = build_separator_cover(g, 0.5, 4.0, 3);
  EXPECT_TRUE(res.report.passed());
  EXPECT_LE(res.report.plain_distortion, 1.5 * (1 + 1e-9));
  // Per level at most three paths, each with ceil(C ln n / eps^2) copies.
  const double per_path = std::ceil(4.0 * std::log(50.0) / 0.25);
  EXPECT_EQ(res.copies_per_path, std::size_t(per_path));
  EXPECT_LE(double(res.cover.trees.size()), 3.0 * per_path * res.depth);
}

TEST(SeparatorCover, DeterministicGivenSeed) {
  Rng rng(9);
  auto g = testkit::random_outerplanar(30, rng);
  auto a = build_separator_cover(g, 0.5, 1.0, 11);
  auto b = build_separator_cover(g, 0.5, 1.0, 11);
  ASSERT_EQ(a.cover.trees.size(), b.cover.trees.size());
  for (std::size_t k = 0; k < a.cover.trees.size(); ++k) {
    const auto& ea = a.cover.trees[k].edges();
    const auto& eb = b.cover.trees[k].edges();
    ASSERT_EQ(ea.size(), eb.size());
    for (std::size_t e = 0; e < ea.size(); ++e) {
      EXPECT_EQ(ea[e].u, eb[e].u);
      EXPECT_EQ(ea[e].v, eb[e].v);
      EXPECT_EQ(ea[e].w, eb[e].w);
    }
  }
}

TEST(SeparatorCover, RejectsBadInput) {
  auto g = testkit::path_graph(4);
  EXPECT_THROW(build_separator_cover(g, 0.0, 4.0, 1), Error);
  EXPECT_THROW(build_separator_cover(g, 0.5, 0.0, 1), Error);
  try {
    build_separator_cover(k5(), 0.5, 4.0, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::non_planar);
  }
}
