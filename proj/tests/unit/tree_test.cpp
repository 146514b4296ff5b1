#include <gtest/gtest.h>

#include "support/instances.hpp"
#include "treecover/tree.hpp"

using namespace treecover;

TEST(TreeDistance, StarAndPath) {
  auto star = TreeEmbedding::on_points(3, {{0, 1, 1.0}, {0, 2, 1.0}});
  EXPECT_EQ(tree_distance(star, 1, 2), 2.0);
  auto path = TreeEmbedding::on_points(3, {{0, 1, 1.0}, {1, 2, 2.0}});
  EXPECT_EQ(tree_distance(path, 0, 2), 3.0);
  EXPECT_EQ(tree_distance(path, 2, 0), 3.0);
  EXPECT_EQ(tree_distance(path, 1, 1), 0.0);
}

TEST(TreeDistance, UnmappedPoint) {
  auto path = TreeEmbedding::on_points(2, {{0, 1, 1.0}});
  try {
    tree_distance(path, 0, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::unmapped_point);
    EXPECT_NE(std::string(e.what()).find("unmapped point"), std::string::npos);
  }
}

TEST(TreeEmbeddingTest, RejectsMalformedTrees) {
  auto expect = [](auto fn) {
    try {
      fn();
      ADD_FAILURE();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::invalid_tree);
    }
  };
  expect([] { TreeEmbedding::on_points(3, {{0, 1, 1.0}}); });
  expect([] { TreeEmbedding::on_points(4, {{0, 1, 1.0}, {1, 0, 1.0}, {2, 3, 1.0}}); });
  expect([] { TreeEmbedding::on_points(2, {{0, 1, 0.0}}); });
  expect([] { TreeEmbedding(2, {0, 0}, {{0, 1, 1.0}}); });
  expect([] { TreeEmbedding(2, {0, -1}, {{0, 1, 1.0}}); });
}

TEST(TreeEmbeddingTest, DistancesFromMatchPairQueries) {
  Rng rng(1);
  std::vector<Edge> e;
  for (int v = 1; v < 30; ++v) e.push_back({int(rng.index(v)), v, 0.1 + rng.uniform01()});
  auto t = TreeEmbedding::on_points(30, e);
  for (int x = 0; x < 30; ++x) {
    auto row = t.distances_from(x);
    for (int y = x; y < 30; ++y) EXPECT_EQ(row[y], tree_distance(t, x, y));
  }
}

TEST(HstToTree, TwoLeaves) {
  HstTree h(2, {{-1, 6.0, -1}, {0, 0.0, 0}, {0, 0.0, 1}});
  auto t = hst_to_tree(h);
  EXPECT_EQ(t.node_count(), 3u);
  for (const auto& e : t.edges()) EXPECT_EQ(e.w, 3.0);
  EXPECT_EQ(tree_distance(t, 0, 1), 6.0);
}

TEST(HstToTree, RootLabelFourGivesSteinerEdgesOfTwo) {
  HstTree h(2, {{-1, 4.0, -1}, {0, 0.0, 0}, {0, 0.0, 1}});
  auto t = hst_to_tree(h);
  EXPECT_EQ(tree_distance(t, 0, 1), 4.0);
  EXPECT_TRUE(t.is_steiner(0));
}

TEST(HstToTree, ThreeLeaves) {
  // root(4) -> {inner(2) -> {x, y}, z}
  HstTree h(3, {{-1, 4.0, -1}, {0, 2.0, -1}, {1, 0.0, 0}, {1, 0.0, 1}, {0, 0.0, 2}});
  auto t = hst_to_tree(h);
  EXPECT_EQ(tree_distance(t, 0, 1), 2.0);
  EXPECT_EQ(tree_distance(t, 0, 2), 4.0);
  EXPECT_EQ(tree_distance(t, 1, 2), 4.0);
  EXPECT_EQ(h.distance(0, 1), 2.0);
  EXPECT_EQ(h.distance(1, 2), 4.0);
}

TEST(HstToTree, SingleLeaf) {
  HstTree h(1, {{-1, 0.0, 0}});
  auto t = hst_to_tree(h);
  EXPECT_EQ(t.node_count(), 1u);
  EXPECT_TRUE(t.edges().empty());
}

TEST(HstToTree, ContractsEqualLabelsAndUnaryChains) {
  // root(8) -> a(8) -> {p0, b(4) -> c(2) -> {p1, p2}}, root -> p3
  HstTree h(4, {{-1, 8.0, -1}, {0, 8.0, -1}, {1, 0.0, 0}, {1, 4.0, -1}, {3, 2.0, -1},
                {4, 0.0, 1}, {4, 0.0, 2}, {0, 0.0, 3}});
  auto t = hst_to_tree(h);
  for (int x = 0; x < 4; ++x)
    for (int y = x + 1; y < 4; ++y) EXPECT_EQ(tree_distance(t, x, y), h.distance(x, y));
  EXPECT_EQ(t.node_count(), 6u);  // 4 points + root + c
}

TEST(HstTreeTest, InvalidHst) {
  auto expect = [](auto fn) {
    try {
      fn();
      ADD_FAILURE();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::invalid_hst);
      EXPECT_NE(std::string(e.what()).find("invalid HST"), std::string::npos);
    }
  };
  // child label above parent label
  expect([] { HstTree(2, {{-1, 2.0, -1}, {0, 3.0, -1}, {1, 0.0, 0}, {1, 0.0, 1}}); });
  // leaf with a label
  expect([] { HstTree(2, {{-1, 2.0, -1}, {0, 1.0, 0}, {0, 0.0, 1}}); });
  // missing point
  expect([] { HstTree(3, {{-1, 2.0, -1}, {0, 0.0, 0}, {0, 0.0, 1}}); });
  // separation factor violated
  expect([] { HstTree(3, {{-1, 4.0, -1}, {0, 3.0, -1}, {1, 0.0, 0}, {1, 0.0, 1}, {0, 0.0, 2}}, 2.0); });
  // not an ultrametric
  expect([] { hst_from_ultrametric(testkit::line_metric(3)); });
}

TEST(HstToTree, PreservesUltrametricOnRandomHsts) {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    // Random ultrametric: points on a random binary merge tree with increasing heights.
    const int n = 2 + int(rng.index(60));
    std::vector<double> u(n * n, 0.0);
    std::vector<std::vector<int>> groups;
    for (int i = 0; i < n; ++i) groups.push_back({i});
    double height = 0.0;
    while (groups.size() > 1) {
      height += 0.1 + rng.uniform01();
      std::size_t a = rng.index(groups.size());
      std::size_t b = rng.index(groups.size() - 1);
      if (b >= a) ++b;
      for (int x : groups[a])
        for (int y : groups[b]) u[x * n + y] = u[y * n + x] = height;
      groups[a].insert(groups[a].end(), groups[b].begin(), groups[b].end());
      groups.erase(groups.begin() + b);
    }
    FiniteMetric um(n, u);
    auto h = hst_from_ultrametric(um);
    auto t = hst_to_tree(h);
    for (int x = 0; x < n; ++x)
      for (int y = x + 1; y < n; ++y) {
        EXPECT_EQ(h.distance(x, y), um(x, y));
        EXPECT_LE(std::abs(tree_distance(t, x, y) - um(x, y)), 1e-9 * um(x, y));
      }
  }
}

TEST(CompleteForest, JoinsComponentsWithTrueDistances) {
  auto m = testkit::line_metric(5);
  auto t = complete_forest(m, {{1, 2, 1.0}, {3, 4, 1.0}});
  EXPECT_EQ(t.node_count(), 5u);
  for (int x = 0; x < 5; ++x)
    for (int y = x + 1; y < 5; ++y) EXPECT_GE(tree_distance(t, x, y), m(x, y));
  EXPECT_EQ(tree_distance(t, 0, 3), 3.0);
}

TEST(CompleteForest, RejectsCycles) {
  auto m = testkit::uniform_metric(3);
  try {
    complete_forest(m, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 0, 1.0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::invariant_violation);
  }
}
