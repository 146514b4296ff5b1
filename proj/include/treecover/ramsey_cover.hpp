#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "treecover/common.hpp"
#include "treecover/metric.hpp"
#include "treecover/partition.hpp"
#include "treecover/random.hpp"
#include "treecover/tree.hpp"
#include "treecover/verify.hpp"

namespace treecover {

struct RamseyOptions {
  int attempts = 8;             // hierarchies drawn per extraction; the one with least distortion wins
  double padding_target = 2.0;  // points padded at padding_target / alpha always qualify
  double lambda = 0.0;          // doubling constant for the carving rate; 0 = estimate
};

struct RamseyStep {
  std::vector<int> survivors;  // S_i
  std::vector<int> extracted;  // Z_i, ascending
  HstTree hst;
  TreeEmbedding tree;
  double alpha = 1.0;
  double alpha_actual = 0.0;  // max over Z x X of d_T / d
  double threshold = 0.0;     // padding level every extracted point reaches
  int attempt = 0;
};

namespace ramsey_detail {

// max over x in `from`, y != x of d_T(x, y) / d(x, y)
inline double worst_ratio(const TreeEmbedding& t, const FiniteMetric& m, std::span<const int> from) {
  std::vector<double> best(from.size(), 0.0);
  parallel_for(from.size(), [&](std::size_t a) {
    const int x = from[a];
    const auto dist = t.distances_from(x);
    for (std::size_t y = 0; y < m.size(); ++y)
      if (static_cast<int>(y) != x) best[a] = std::max(best[a], dist[y] / m(x, y));
  });
  return from.empty() ? 0.0 : *std::max_element(best.begin(), best.end());
}

}  // namespace ramsey_detail

// Randomized Ramsey step: a hierarchy of ball-carving partitions on the ladder
// 2^ceil(log2 diam) / 2^i down below the minimum distance, cut into a hierarchy.
// A point's padding is min over levels of (distance to other clusters) / scale.
// Z takes every survivor padded at padding_target / alpha, and in any case the
// ceil(|S|^(1-1/alpha)) best padded survivors.
inline FiniteMetric mst_ultrametric(const FiniteMetric& m, std::span<const int> points);

inline RamseyStep ramsey_ultrametric(const FiniteMetric& m, std::span<const int> survivors, double alpha, Rng& rng,
                                     const RamseyOptions& opts = {}) {
  if (survivors.empty()) throw Error(Errc::invalid_argument, "Ramsey extraction needs a nonempty set");
  alpha = std::max(alpha, 1.0);
  const std::size_t n = m.size();
  const std::size_t s = survivors.size();
  const std::size_t need = static_cast<std::size_t>(std::ceil(std::pow(double(s), 1.0 - 1.0 / alpha) - 1e-9));
  const double lambda = opts.lambda > 0.0 ? opts.lambda : (n > 1 ? doubling_constant_estimate(m) : 1.0);
  const auto params = make_partition_params(alpha, lambda);

  RamseyStep best;
  best.alpha = alpha;
  best.survivors.assign(survivors.begin(), survivors.end());
  best.alpha_actual = std::numeric_limits<double>::infinity();

  if (n == 1) {
    best.hst = HstTree(1, {HstNode{-1, 0.0, 0}});
    best.tree = hst_to_tree(best.hst);
    best.extracted = {0};
    best.alpha_actual = 0.0;
    return best;
  }

  const double top = std::ldexp(1.0, ceil_log2(m.max_distance()));
  std::vector<double> scales;
  for (int i = 0; scales.empty() || !(scales.back() < m.min_distance()); ++i) scales.push_back(std::ldexp(top, -i));

  for (int attempt = 0; attempt < std::max(1, opts.attempts); ++attempt) {
    Rng draw = rng.child("attempt", attempt);
    std::vector<BoundedPartition> parts;
    for (std::size_t i = 0; i + 1 < scales.size(); ++i) parts.push_back(padded_partition(m, scales[i], params, draw));
    parts.push_back(partition_detail::singletons(n, scales.back()));
    const auto hier = cut_hierarchy(parts);

    std::vector<double> padding(n, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < scales.size(); ++i) {
      const auto radii = padding_radii(m, hier.levels[i]);
      for (std::size_t x = 0; x < n; ++x) padding[x] = std::min(padding[x], radii[x] / scales[i]);
    }
    std::vector<double> ranked;
    for (int x : survivors) ranked.push_back(padding[x]);
    std::sort(ranked.begin(), ranked.end(), std::greater<>());
    const double threshold = std::min(opts.padding_target / alpha, ranked[need - 1]);

    RamseyStep step;
    step.alpha = alpha;
    step.attempt = attempt;
    step.threshold = threshold;
    step.survivors = best.survivors;
    for (int x : survivors)
      if (padding[x] >= threshold) step.extracted.push_back(x);
    std::sort(step.extracted.begin(), step.extracted.end());
    step.hst = hierarchy_hst(hier);
    step.tree = hst_to_tree(step.hst);
    step.alpha_actual = ramsey_detail::worst_ratio(step.tree, m, step.extracted);
    if (step.extracted.size() >= need && step.alpha_actual < best.alpha_actual) best = std::move(step);
  }
  // One deterministic candidate: the MST ultrametric over all of X, keeping the
  // `need` points it treats best. Exact whenever the input is itself an ultrametric.
  {
    RamseyStep step;
    step.alpha = alpha;
    step.attempt = std::max(1, opts.attempts);
    step.survivors = best.survivors;
    std::vector<int> everything(n);
    std::iota(everything.begin(), everything.end(), 0);
    step.hst = hst_from_ultrametric(mst_ultrametric(m, everything));
    step.tree = hst_to_tree(step.hst);
    std::vector<std::pair<double, int>> ranked;
    for (int x : survivors) ranked.push_back({ramsey_detail::worst_ratio(step.tree, m, std::span<const int>(&x, 1)), x});
    std::sort(ranked.begin(), ranked.end());
    const double cut = ranked[need - 1].first;
    for (const auto& [ratio, x] : ranked)
      if (ratio <= cut) step.extracted.push_back(x);
    std::sort(step.extracted.begin(), step.extracted.end());
    step.alpha_actual = cut;
    if (step.alpha_actual < best.alpha_actual) best = std::move(step);
  }
  if (best.extracted.size() < need || !std::isfinite(best.alpha_actual))
    throw Error(Errc::ramsey_extraction_failed, "ramsey extraction failed: kept " +
                                                    std::to_string(best.extracted.size()) + " of " +
                                                    std::to_string(need) + " required points");
  return best;
}

// Ultrametric on `points` (local indices): split along the heaviest minimum-
// spanning-tree edge, labelling each set with its diameter. Its distortion on the
// set is at most |points| - 1.
inline FiniteMetric mst_ultrametric(const FiniteMetric& m, std::span<const int> points) {
  const std::size_t s = points.size();
  std::vector<double> u(s * s, 0.0);
  if (s < 2) return FiniteMetric(s, std::move(u));
  // Prim.
  std::vector<int> from(s, 0);
  std::vector<double> key(s, std::numeric_limits<double>::infinity());
  std::vector<char> done(s, 0);
  struct TreeEdge {
    int a, b;
    double w;
  };
  std::vector<TreeEdge> mst;
  key[0] = 0.0;
  for (std::size_t step = 0; step < s; ++step) {
    int v = -1;
    for (std::size_t a = 0; a < s; ++a)
      if (!done[a] && (v < 0 || key[a] < key[v])) v = static_cast<int>(a);
    done[v] = 1;
    if (step > 0) mst.push_back({from[v], v, key[v]});
    for (std::size_t a = 0; a < s; ++a) {
      const double d = m(points[v], points[a]);
      if (!done[a] && d < key[a]) {
        key[a] = d;
        from[a] = v;
      }
    }
  }
  // Splitting along the heaviest edge first is Kruskal in reverse: merge edges in
  // increasing weight order and label each merge with the merged set's diameter.
  std::sort(mst.begin(), mst.end(), [](const TreeEdge& x, const TreeEdge& y) {
    return x.w != y.w ? x.w < y.w : (x.a != y.a ? x.a < y.a : x.b < y.b);
  });
  std::vector<std::vector<int>> sets(s);
  std::vector<int> owner(s);
  for (std::size_t a = 0; a < s; ++a) {
    sets[a] = {static_cast<int>(a)};
    owner[a] = static_cast<int>(a);
  }
  for (const auto& e : mst) {
    int ra = owner[e.a], rb = owner[e.b];
    if (sets[ra].size() < sets[rb].size()) std::swap(ra, rb);
    double diam = 0.0;
    for (const auto* set : {&sets[ra], &sets[rb]})
      for (std::size_t i = 0; i < set->size(); ++i)
        for (std::size_t j = i + 1; j < set->size(); ++j)
          diam = std::max(diam, m(points[(*set)[i]], points[(*set)[j]]));
    for (int a : sets[ra])
      for (int b : sets[rb]) diam = std::max(diam, m(points[a], points[b]));
    for (int a : sets[ra])
      for (int b : sets[rb]) u[a * s + b] = u[b * s + a] = diam;
    for (int b : sets[rb]) owner[b] = ra;
    sets[ra].insert(sets[ra].end(), sets[rb].begin(), sets[rb].end());
    sets[rb].clear();
  }
  // Labels of nested merges only grow, so the smallest set holding a pair decides.
  return FiniteMetric(s, std::move(u));
}

// Ultrametric over all of X from one on `points`: each point goes with its nearest
// member p(x) at distance r_x, and d(x, y) = 3 max(U(p(x), p(y)), r_x, r_y).
// When `points` is everything the ultrametric is used as is.
inline FiniteMetric extend_ultrametric(const FiniteMetric& m, std::span<const int> points, const FiniteMetric& u) {
  const std::size_t n = m.size(), s = points.size();
  if (s == n) {
    std::vector<double> d(n * n, 0.0);
    for (std::size_t a = 0; a < s; ++a)
      for (std::size_t b = 0; b < s; ++b) d[points[a] * n + points[b]] = u(a, b);
    return FiniteMetric(n, std::move(d));
  }
  std::vector<int> near(n, 0);
  std::vector<double> r(n, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t a = 1; a < s; ++a)
      if (m(x, points[a]) < m(x, points[near[x]])) near[x] = static_cast<int>(a);
    r[x] = m(x, points[near[x]]);
  }
  std::vector<double> d(n * n, 0.0);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x + 1; y < n; ++y)
      d[x * n + y] = d[y * n + x] = 3.0 * std::max({u(near[x], near[y]), r[x], r[y]});
  return FiniteMetric(n, std::move(d));
}

struct RamseyStepSummary {
  std::size_t survivors = 0;
  std::size_t extracted = 0;
  double alpha_actual = 0.0;
  double threshold = 0.0;
  int attempt = 0;
};

struct RamseyCoverResult {
  TreeCover cover;
  DistortionReport report;
  std::vector<RamseyStepSummary> steps;
  double alpha = 1.0;
  std::size_t last_set_size = 0;
  double last_set_distortion = 0.0;  // of the final ultrametric on S_k
  std::uint64_t seed = 0;
};

// k trees: k - 1 Ramsey extractions with alpha = n^(1/k) (ln n)^(1 - 1/k), then
// one ultrametric for the leftover set extended to everything. Once the survivors
// run out, the remaining slots repeat the last tree.
inline RamseyCoverResult build_ramsey_cover(const FiniteMetric& m, int k, std::uint64_t seed,
                                            const RamseyOptions& opts = {}) {
  if (k <= 0) throw Error(Errc::invalid_argument, "k must be positive");
  const std::size_t n = m.size();
  if (n < 2) throw Error(Errc::invalid_argument, "Ramsey cover needs at least two points");
  RamseyCoverResult res;
  res.seed = seed;
  const double ln_n = std::log(double(n));
  res.alpha = std::max(1.0, std::pow(double(n), 1.0 / k) * std::pow(ln_n, 1.0 - 1.0 / k));
  RamseyOptions step_opts = opts;
  if (!(step_opts.lambda > 0.0)) step_opts.lambda = doubling_constant_estimate(m);

  res.cover.kind = CoverKind::ramsey;
  res.cover.home_tree.assign(n, -1);
  std::vector<int> survivors(n);
  std::iota(survivors.begin(), survivors.end(), 0);
  const Rng root(seed);
  for (int i = 0; i + 1 < k && !survivors.empty(); ++i) {
    Rng rng = root.child("extraction", static_cast<std::uint64_t>(i));
    auto step = ramsey_ultrametric(m, survivors, res.alpha, rng, step_opts);
    const double bound = std::pow(double(survivors.size()), 1.0 - 1.0 / res.alpha);
    if (double(step.extracted.size()) < bound - 1e-9)
      throw Error(Errc::invariant_violation, "extraction kept " + std::to_string(step.extracted.size()) +
                                                 " points, below |S|^(1-1/alpha)");
    for (int x : step.extracted) res.cover.home_tree[x] = i;
    res.steps.push_back({survivors.size(), step.extracted.size(), step.alpha_actual, step.threshold, step.attempt});
    std::vector<int> rest;
    std::set_difference(survivors.begin(), survivors.end(), step.extracted.begin(), step.extracted.end(),
                        std::back_inserter(rest));
    survivors = std::move(rest);
    res.cover.trees.push_back(std::move(step.tree));
  }
  const int extractions = static_cast<int>(res.steps.size());
  const double shrink = double(n) * std::pow(1.0 - std::pow(double(n), -1.0 / res.alpha), extractions);
  if (double(survivors.size()) > shrink * (1.0 + rel_tol) + 1e-9)
    throw Error(Errc::invariant_violation, "survivor set did not shrink as required");

  res.last_set_size = survivors.size();
  if (!survivors.empty()) {
    const auto u = mst_ultrametric(m, survivors);
    for (std::size_t a = 0; a < survivors.size(); ++a)
      for (std::size_t b = a + 1; b < survivors.size(); ++b)
        res.last_set_distortion = std::max(res.last_set_distortion, u(a, b) / m(survivors[a], survivors[b]));
    const double allowed = std::max(1.0, double(survivors.size()) - 1.0);
    if (!approx_leq(res.last_set_distortion, allowed))
      throw Error(Errc::invariant_violation, "last ultrametric exceeds |S_k| - 1");
    const auto ext = extend_ultrametric(m, survivors, u);
    for (int x : survivors) res.cover.home_tree[x] = static_cast<int>(res.cover.trees.size());
    res.cover.trees.push_back(hst_to_tree(hst_from_ultrametric(ext)));
  }
  while (static_cast<int>(res.cover.trees.size()) < k) res.cover.trees.push_back(res.cover.trees.back());

  // The claim is whatever the verifier measures.
  res.cover.claimed_distortion = std::numeric_limits<double>::infinity();
  res.cover.claimed_distortion = *verify_cover(res.cover, m).ramsey_distortion;
  res.report = verify_cover(res.cover, m);
  return res;
}

}  // namespace treecover
