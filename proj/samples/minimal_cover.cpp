// Builds a (1 + eps) tree cover of a small grid metric and checks it.
#include <cstdio>

#include "treecover/doubling_cover.hpp"
#include "treecover/verify.hpp"

int main() {
  using namespace treecover;
  std::vector<Edge> edges;
  const int side = 6;
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < side; ++c) {
      const int v = r * side + c;
      if (c + 1 < side) edges.push_back({v, v + 1, 1.0});
      if (r + 1 < side) edges.push_back({v, v + side, 1.0});
    }
  const auto metric = metric_from_graph(WeightedGraph(side * side, edges));

  const auto built = build_doubling_cover(metric, 0.25);
  const auto report = verify_cover(built.cover, metric);
  std::printf("trees: %zu\nplain distortion: %.6f (claimed %.6f)\ndominating: %s\n", built.cover.trees.size(),
              report.plain_distortion, built.cover.claimed_distortion, report.domination_ok ? "yes" : "no");
  return report.passed() ? 0 : 1;
}
