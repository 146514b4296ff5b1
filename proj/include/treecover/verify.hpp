#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "treecover/common.hpp"
#include "treecover/metric.hpp"
#include "treecover/tree.hpp"

namespace treecover {

struct PairDistortion {
  int x = 0;
  int y = 0;
  double distortion = 0.0;
  int tree = -1;  // best tree for the pair
};

struct DominationViolation {
  int tree = 0;
  int x = 0;
  int y = 0;
  double tree_distance = 0.0;
  double metric_distance = 0.0;
};

struct VerifyOptions {
  std::size_t worst_pairs = 10;
  std::size_t violation_samples = 10;
  bool keep_pair_distortions = false;
};

struct DistortionReport {
  std::size_t num_points = 0;
  std::size_t num_trees = 0;
  CoverKind kind = CoverKind::plain;
  double plain_distortion = 1.0;
  std::optional<double> ramsey_distortion;
  std::vector<int> optimal_home_tree;
  std::optional<double> declared_home_distortion;  // ramsey distortion under cover.home_tree
  std::size_t domination_violation_count = 0;
  std::vector<DominationViolation> domination_violations;
  bool domination_ok = true;
  double claimed_distortion = 1.0;
  bool claimed_met = true;
  std::vector<PairDistortion> worst_pairs;
  std::vector<double> pair_distortions;  // pairs x < y in row-major order, on request

  bool passed() const { return domination_ok && claimed_met; }
};

// All-pairs tree distances of one tree, restricted to points. Entry (x, y) with
// x < y is summed along the path starting at x; the matrix is mirrored.
inline std::vector<double> tree_distance_matrix(const TreeEmbedding& t) {
  const std::size_t n = t.point_count();
  std::vector<double> d(n * n, 0.0);
  parallel_for(n, [&](std::size_t x) {
    std::vector<double> scratch, row(n);
    std::vector<int> stack;
    t.distances_from(static_cast<int>(x), row, scratch, stack);
    for (std::size_t y = x + 1; y < n; ++y) d[x * n + y] = row[y];
  });
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x + 1; y < n; ++y) d[y * n + x] = d[x * n + y];
  return d;
}

// Exhaustive certification of a cover against its source metric.
inline DistortionReport verify_cover(const TreeCover& cover, const FiniteMetric& m, const VerifyOptions& opts = {}) {
  const std::size_t n = m.size();
  const std::size_t k = cover.trees.size();
  for (std::size_t j = 0; j < k; ++j)
    if (cover.trees[j].point_count() != n)
      throw Error(Errc::cover_mismatch, "cover/metric mismatch: tree " + std::to_string(j) + " spans " +
                                            std::to_string(cover.trees[j].point_count()) + " points, metric has " +
                                            std::to_string(n));
  const bool ramsey = cover.kind == CoverKind::ramsey;
  if (ramsey) {
    if (cover.home_tree.size() != n)
      throw Error(Errc::cover_mismatch, "cover/metric mismatch: home tree list has " +
                                            std::to_string(cover.home_tree.size()) + " entries, metric has " +
                                            std::to_string(n) + " points");
    for (int h : cover.home_tree)
      if (h < 0 || h >= static_cast<int>(k))
        throw Error(Errc::cover_mismatch, "cover/metric mismatch: home tree index out of range");
  }

  DistortionReport rep;
  rep.num_points = n;
  rep.num_trees = k;
  rep.kind = cover.kind;
  rep.claimed_distortion = cover.claimed_distortion;

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> best(n * n, inf);
  std::vector<int> best_tree(n * n, -1);
  std::vector<double> row_max(ramsey ? k * n : 0, 0.0);

  for (std::size_t j = 0; j < k; ++j) {
    const auto dt = tree_distance_matrix(cover.trees[j]);
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = x + 1; y < n; ++y) {
        const double dm = m(x, y);
        const double tv = dt[x * n + y];
        if (tv < dm * (1.0 - rel_tol)) {
          if (rep.domination_violations.size() < opts.violation_samples)
            rep.domination_violations.push_back({static_cast<int>(j), static_cast<int>(x), static_cast<int>(y), tv, dm});
          ++rep.domination_violation_count;
        }
        const double r = tv / dm;
        if (r < best[x * n + y]) {
          best[x * n + y] = r;
          best_tree[x * n + y] = static_cast<int>(j);
        }
        if (ramsey) {
          row_max[j * n + x] = std::max(row_max[j * n + x], r);
          row_max[j * n + y] = std::max(row_max[j * n + y], r);
        }
      }
    }
  }
  rep.domination_ok = rep.domination_violation_count == 0;

  std::vector<PairDistortion> pairs;
  pairs.reserve(n * (n - (n > 0)) / 2);
  double plain = 1.0;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x + 1; y < n; ++y) {
      const double r = best[x * n + y];
      plain = std::max(plain, r);
      pairs.push_back({static_cast<int>(x), static_cast<int>(y), r, best_tree[x * n + y]});
    }
  rep.plain_distortion = plain;
  if (opts.keep_pair_distortions) {
    rep.pair_distortions.reserve(pairs.size());
    for (const auto& p : pairs) rep.pair_distortions.push_back(p.distortion);
  }
  const std::size_t top = std::min(opts.worst_pairs, pairs.size());
  std::partial_sort(pairs.begin(), pairs.begin() + top, pairs.end(), [](const PairDistortion& a, const PairDistortion& b) {
    if (a.distortion != b.distortion) return a.distortion > b.distortion;
    if (a.x != b.x) return a.x < b.x;
    return a.y < b.y;
  });
  rep.worst_pairs.assign(pairs.begin(), pairs.begin() + top);

  if (ramsey) {
    double worst = 1.0, declared = 1.0;
    rep.optimal_home_tree.assign(n, 0);
    for (std::size_t x = 0; x < n; ++x) {
      double b = inf;
      for (std::size_t j = 0; j < k; ++j)
        if (row_max[j * n + x] < b) {
          b = row_max[j * n + x];
          rep.optimal_home_tree[x] = static_cast<int>(j);
        }
      if (n > 1) worst = std::max(worst, b);
      if (n > 1) declared = std::max(declared, row_max[cover.home_tree[x] * n + x]);
    }
    rep.ramsey_distortion = worst;
    rep.declared_home_distortion = declared;
  }

  const double achieved = ramsey ? *rep.ramsey_distortion : rep.plain_distortion;
  rep.claimed_met = achieved <= cover.claimed_distortion * (1.0 + rel_tol);
  return rep;
}

}  // namespace treecover
