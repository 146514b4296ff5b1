#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "treecover/common.hpp"
#include "treecover/metric.hpp"
#include "treecover/nets.hpp"
#include "treecover/tree.hpp"
#include "treecover/verify.hpp"

namespace treecover {

// Per-tree clustering state: who is clustered, by which center, and the forest so far.
struct ClusterState {
  std::vector<char> clustered;
  std::vector<int> parent;  // center that clustered the point, -1 if none
  std::vector<int> uf;
  std::vector<std::vector<TreeEmbedding::Arc>> adj;
  std::vector<Edge> edges;

  explicit ClusterState(std::size_t n) : clustered(n, 0), parent(n, -1), uf(n), adj(n) {
    std::iota(uf.begin(), uf.end(), 0);
  }

  int find(int x) {
    while (uf[x] != x) x = uf[x] = uf[uf[x]];
    return x;
  }

  // Forest path lengths from x over its component; -1 outside it.
  void component_distances(int x, std::vector<double>& dist, std::vector<int>& members) const {
    members.clear();
    dist[x] = 0.0;
    members.push_back(x);
    for (std::size_t a = 0; a < members.size(); ++a) {
      int v = members[a];
      for (const auto& arc : adj[v])
        if (dist[arc.to] < 0.0) {
          dist[arc.to] = dist[v] + arc.w;
          members.push_back(arc.to);
        }
    }
  }
};

struct DoublingCoverStats {
  double eps_public = 0.0;
  double eps_internal = 0.0;
  double rescale = 1.0;
  int escalations = 0;
  int residues = 0;  // number of level residue classes p
  int classes = 0;   // t
  int lowest_level = 0;
  int highest_level = 0;
  std::size_t distinct_levels = 0;
  std::vector<std::pair<int, int>> identical_runs;
  std::size_t forest_edges = 0;
  std::size_t diameter_checks = 0;
  std::size_t detour_checks = 0;
};

struct DoublingCoverResult {
  TreeCover cover;
  std::vector<std::pair<int, int>> tree_index;  // (j, p) per tree, j is 1-based
  DoublingCoverStats stats;
  DistortionReport report;  // filled by the public entry point only
};

inline int residue_count(double eps) { return std::max(1, ceil_log2(1.0 / eps)); }

// Builds the t * P trees (j, p) for an internal eps in (0, 1/8]. With
// check_invariants the construction asserts that level-i centers stay
// unclustered, that components created at level i have diameter at most
// 8/eps * 2^i, and that every y within 2/eps * 2^i of a center x lies in its
// component at path length at most d(x,y) + 2^(i+4).
inline DoublingCoverResult build_doubling_cover(const FiniteMetric& m, double eps, const NetLadder& ladder,
                                                const SubnetPartition& parts, bool check_invariants = true) {
  if (!(eps > 0.0 && eps <= 0.125)) throw Error(Errc::invalid_argument, "internal eps must lie in (0, 1/8]");
  if (parts.class_of.size() != m.size()) throw Error(Errc::invalid_argument, "subnet partition does not match metric");
  const std::size_t n = m.size();
  const int P = residue_count(eps);
  const int t = parts.class_count;

  DoublingCoverResult res;
  res.stats.eps_public = eps;
  res.stats.eps_internal = eps;
  res.stats.residues = P;
  res.stats.classes = t;
  res.stats.lowest_level = ladder.lowest();
  res.stats.highest_level = ladder.highest();
  res.stats.distinct_levels = ladder.distinct_levels();
  res.stats.identical_runs = ladder.identical_runs();

  const std::size_t count = static_cast<std::size_t>(t) * P;
  std::vector<std::vector<Edge>> forests(count);
  std::vector<std::size_t> diam_checks(count, 0), detour_checks(count, 0);

  parallel_for(count, [&](std::size_t idx) {
    const int j = static_cast<int>(idx) / P + 1;
    const int p = static_cast<int>(idx) % P;
    ClusterState st(n);
    std::vector<double> dist(n, -1.0);
    std::vector<int> comp;
    for (int i = ladder.lowest(); i <= ladder.highest(); ++i) {
      if (((i % P) + P) % P != p) continue;
      const double scale = std::ldexp(1.0, i);
      const double reach = 3.0 / eps * scale;
      std::vector<int> centers;
      for (int x : ladder.net(i))
        if (parts.class_of[x] == j) centers.push_back(x);
      for (int x : centers) {
        auto row = m.row(x);
        for (std::size_t y = 0; y < n; ++y) {
          if (static_cast<int>(y) == x || st.clustered[y] || !(row[y] < reach)) continue;
          int a = st.find(x), b = st.find(static_cast<int>(y));
          if (a == b)
            throw Error(Errc::invariant_violation, "doubling cover: edge " + std::to_string(x) + "-" +
                                                       std::to_string(y) + " closes a cycle");
          st.uf[b] = a;
          st.clustered[y] = 1;
          st.parent[y] = x;
          st.adj[x].push_back({static_cast<int>(y), row[y]});
          st.adj[y].push_back({x, row[y]});
          st.edges.push_back({x, static_cast<int>(y), row[y]});
        }
      }
      if (!check_invariants) continue;
      const double diam_bound = 8.0 / eps * scale;
      const double near = 2.0 / eps * scale;
      const double slack = std::ldexp(1.0, i + 4);
      for (int x : centers) {
        if (st.clustered[x])
          throw Error(Errc::invariant_violation, "doubling cover: center " + std::to_string(x) + " of level " +
                                                     std::to_string(i) + " was clustered");
        std::fill(dist.begin(), dist.end(), -1.0);
        st.component_distances(x, dist, comp);
        auto row = m.row(x);
        double far = 0.0;
        for (int y : comp) far = std::max(far, row[y]);
        if (!approx_leq(2.0 * far, diam_bound)) {
          for (std::size_t a = 0; a < comp.size(); ++a)
            for (std::size_t b = a + 1; b < comp.size(); ++b)
              if (!approx_leq(m(comp[a], comp[b]), diam_bound))
                throw Error(Errc::invariant_violation, "doubling cover: component of center " + std::to_string(x) +
                                                           " at level " + std::to_string(i) + " exceeds diameter bound");
        }
        ++diam_checks[idx];
        for (std::size_t y = 0; y < n; ++y) {
          if (!(row[y] <= near)) continue;
          if (dist[y] < 0.0 || !approx_leq(dist[y], row[y] + slack))
            throw Error(Errc::invariant_violation, "doubling cover: detour bound fails for center " +
                                                       std::to_string(x) + " and point " + std::to_string(y) +
                                                       " at level " + std::to_string(i));
          ++detour_checks[idx];
        }
      }
    }
    forests[idx] = std::move(st.edges);
  });

  res.cover.kind = CoverKind::plain;
  res.cover.claimed_distortion = 1.0 + eps;
  res.cover.trees.reserve(count);
  for (std::size_t idx = 0; idx < count; ++idx) {
    res.stats.forest_edges += forests[idx].size();
    res.stats.diameter_checks += diam_checks[idx];
    res.stats.detour_checks += detour_checks[idx];
    res.cover.trees.push_back(complete_forest(m, std::move(forests[idx])));
    res.tree_index.emplace_back(static_cast<int>(idx) / P + 1, static_cast<int>(idx) % P);
  }
  return res;
}

struct DoublingCoverOptions {
  double rescale = 2.0;       // internal eps = public eps / rescale, calibrated
  double max_rescale = 68.0;  // the rescale at which the stretch bound is provable
  bool check_invariants = true;
};

// Public entry point for 0 < eps < 1. Builds, verifies, and on a failed
// verification doubles the rescale (up to max_rescale) and rebuilds.
inline DoublingCoverResult build_doubling_cover(const FiniteMetric& m, double eps, const DoublingCoverOptions& opts = {}) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(Errc::invalid_argument, "eps must lie in (0, 1)");
  if (m.size() == 0) throw Error(Errc::invalid_argument, "empty metric");
  double rescale = std::max(opts.rescale, 8.0 * eps);
  int escalations = 0;
  while (true) {
    const double inner = std::min(eps / rescale, 0.125);
    auto ladder = build_ladder(m, inner);
    auto parts = subnet_partition(ladder, m, inner);
    auto res = build_doubling_cover(m, inner, ladder, parts, opts.check_invariants);
    res.cover.claimed_distortion = 1.0 + eps;
    res.stats.eps_public = eps;
    res.stats.rescale = rescale;
    res.stats.escalations = escalations;
    res.report = verify_cover(res.cover, m);
    if (res.report.passed() || rescale >= opts.max_rescale) return res;
    rescale = std::min(2.0 * rescale, opts.max_rescale);
    ++escalations;
  }
}

}  // namespace treecover
