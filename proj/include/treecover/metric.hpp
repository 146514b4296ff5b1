#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "treecover/common.hpp"

namespace treecover {

struct Edge {
  int u = 0;
  int v = 0;
  double w = 0.0;
};

// Symmetric distance matrix over n points, stored row-major.
class FiniteMetric {
 public:
  FiniteMetric() = default;

  // Checks the diagonal, symmetry and positivity. The cubic triangle check is
  // separate, see triangle_violations().
  FiniteMetric(std::size_t n, std::vector<double> dist, std::vector<std::string> labels = {})
      : n_(n), dist_(std::move(dist)), labels_(std::move(labels)) {
    if (dist_.size() != n_ * n_)
      throw Error(Errc::invalid_metric, "invalid metric: expected " + std::to_string(n_ * n_) + " entries");
    if (!labels_.empty() && labels_.size() != n_)
      throw Error(Errc::invalid_metric, "invalid metric: label count does not match point count");
    d_min_ = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_; ++i) {
      if (dist_[i * n_ + i] != 0.0)
        throw Error(Errc::invalid_metric, "invalid metric: nonzero diagonal at " + std::to_string(i));
      for (std::size_t j = i + 1; j < n_; ++j) {
        double a = dist_[i * n_ + j];
        double b = dist_[j * n_ + i];
        if (!std::isfinite(a) || !(a > 0.0))
          throw Error(Errc::invalid_metric, "invalid metric: distance between " + std::to_string(i) + " and " +
                                                std::to_string(j) + " must be positive and finite");
        if (!approx_eq(a, b))
          throw Error(Errc::invalid_metric,
                      "invalid metric: asymmetric entry (" + std::to_string(i) + "," + std::to_string(j) + ")");
        dist_[j * n_ + i] = a;
        d_min_ = std::min(d_min_, a);
        d_max_ = std::max(d_max_, a);
      }
    }
    if (n_ < 2) d_min_ = 0.0;
  }

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return dist_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const { return {dist_.data() + i * n_, n_}; }
  const std::vector<double>& data() const { return dist_; }
  const std::vector<std::string>& labels() const { return labels_; }

  // Smallest and largest distance between distinct points (0 when n < 2).
  double min_distance() const { return d_min_; }
  double max_distance() const { return d_max_; }

  FiniteMetric scaled(double c) const {
    if (!(c > 0.0)) throw Error(Errc::invalid_argument, "scale factor must be positive");
    std::vector<double> d(dist_);
    for (double& v : d) v *= c;
    return FiniteMetric(n_, std::move(d), labels_);
  }

  // Submetric on the given points, in the given order.
  FiniteMetric restricted(std::span<const int> points) const {
    const std::size_t k = points.size();
    std::vector<double> d(k * k);
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b) d[a * k + b] = (*this)(points[a], points[b]);
    std::vector<std::string> lab;
    if (!labels_.empty())
      for (int p : points) lab.push_back(labels_[p]);
    return FiniteMetric(k, std::move(d), std::move(lab));
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> dist_;
  std::vector<std::string> labels_;
  double d_min_ = 0.0;
  double d_max_ = 0.0;
};

// Number of ordered triples (i, j, k) with d(i,k) > d(i,j) + d(j,k) beyond tolerance.
inline std::size_t triangle_violations(const FiniteMetric& m, double tol = rel_tol) {
  const std::size_t n = m.size();
  std::vector<std::size_t> per_row(n, 0);
  parallel_for(n, [&](std::size_t i) {
    auto ri = m.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      auto rj = m.row(j);
      for (std::size_t k = 0; k < n; ++k)
        if (!approx_leq(ri[k], ri[j] + rj[k], tol)) ++per_row[i];
    }
  });
  return std::accumulate(per_row.begin(), per_row.end(), std::size_t{0});
}

class WeightedGraph {
 public:
  struct Arc {
    int to;
    double w;
  };

  WeightedGraph() = default;

  // Rejects self-loops, duplicate undirected edges, out-of-range ids and
  // non-positive weights. Connectivity is checked by callers that need it.
  WeightedGraph(std::size_t n, std::vector<Edge> edges, bool planarity_hint = false)
      : n_(n), edges_(std::move(edges)), planarity_hint_(planarity_hint) {
    std::vector<std::pair<int, int>> keys;
    keys.reserve(edges_.size());
    for (const Edge& e : edges_) {
      if (e.u < 0 || e.v < 0 || static_cast<std::size_t>(e.u) >= n_ || static_cast<std::size_t>(e.v) >= n_)
        throw Error(Errc::invalid_graph, "invalid graph: edge endpoint out of range");
      if (e.u == e.v) throw Error(Errc::invalid_graph, "invalid graph: self-loop at vertex " + std::to_string(e.u));
      if (!std::isfinite(e.w) || !(e.w > 0.0))
        throw Error(Errc::invalid_graph, "invalid graph: non-positive weight on edge " + std::to_string(e.u) + "-" +
                                             std::to_string(e.v));
      keys.emplace_back(std::min(e.u, e.v), std::max(e.u, e.v));
    }
    std::sort(keys.begin(), keys.end());
    auto dup = std::adjacent_find(keys.begin(), keys.end());
    if (dup != keys.end())
      throw Error(Errc::invalid_graph, "invalid graph: duplicate edge " + std::to_string(dup->first) + "-" +
                                           std::to_string(dup->second));

    offset_.assign(n_ + 1, 0);
    for (const Edge& e : edges_) {
      ++offset_[e.u + 1];
      ++offset_[e.v + 1];
    }
    for (std::size_t v = 0; v < n_; ++v) offset_[v + 1] += offset_[v];
    arcs_.resize(offset_[n_]);
    std::vector<std::size_t> fill(offset_.begin(), offset_.end() - 1);
    for (const Edge& e : edges_) {
      arcs_[fill[e.u]++] = {e.v, e.w};
      arcs_[fill[e.v]++] = {e.u, e.w};
    }
  }

  std::size_t size() const { return n_; }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  bool planarity_hint() const { return planarity_hint_; }

  std::span<const Arc> neighbors(std::size_t v) const {
    return {arcs_.data() + offset_[v], offset_[v + 1] - offset_[v]};
  }

  // First vertex not reachable from vertex 0, or -1 when connected.
  int first_unreachable() const {
    if (n_ == 0) return -1;
    std::vector<char> seen(n_, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (const Arc& a : neighbors(v))
        if (!seen[a.to]) {
          seen[a.to] = 1;
          stack.push_back(a.to);
        }
    }
    for (std::size_t v = 0; v < n_; ++v)
      if (!seen[v]) return static_cast<int>(v);
    return -1;
  }

  bool connected() const { return first_unreachable() < 0; }

  // Subgraph induced by `vertices`; vertex vertices[i] becomes local id i.
  WeightedGraph induced(std::span<const int> vertices) const {
    std::vector<int> local(n_, -1);
    for (std::size_t i = 0; i < vertices.size(); ++i) local[vertices[i]] = static_cast<int>(i);
    std::vector<Edge> sub;
    for (const Edge& e : edges_)
      if (local[e.u] >= 0 && local[e.v] >= 0) sub.push_back({local[e.u], local[e.v], e.w});
    return WeightedGraph(vertices.size(), std::move(sub), planarity_hint_);
  }

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  bool planarity_hint_ = false;
  std::vector<std::size_t> offset_;
  std::vector<Arc> arcs_;
};

struct ShortestPathTree {
  std::vector<double> dist;
  std::vector<int> parent;  // -1 at the source and at unreachable vertices
};

// Label-setting shortest paths. Ties keep the first parent found, so the
// result depends only on the graph and the source.
inline ShortestPathTree shortest_path_tree(const WeightedGraph& g, int source) {
  const double inf = std::numeric_limits<double>::infinity();
  ShortestPathTree out{std::vector<double>(g.size(), inf), std::vector<int>(g.size(), -1)};
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  out.dist[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (d > out.dist[v]) continue;
    for (const auto& a : g.neighbors(v)) {
      double nd = d + a.w;
      if (nd < out.dist[a.to]) {
        out.dist[a.to] = nd;
        out.parent[a.to] = v;
        heap.emplace(nd, a.to);
      }
    }
  }
  return out;
}

inline std::vector<double> shortest_distances(const WeightedGraph& g, int source) {
  return shortest_path_tree(g, source).dist;
}

inline void require_connected(const WeightedGraph& g) {
  int bad = g.first_unreachable();
  if (bad >= 0)
    throw Error(Errc::disconnected, "disconnected: no path from vertex 0 to vertex " + std::to_string(bad));
}

// Shortest-path metric of a connected graph. Row i is computed from source i and
// the upper triangle is mirrored, so the result is exactly symmetric.
inline FiniteMetric metric_from_graph(const WeightedGraph& g) {
  require_connected(g);
  const std::size_t n = g.size();
  std::vector<double> d(n * n, 0.0);
  parallel_for(n, [&](std::size_t s) {
    auto row = shortest_distances(g, static_cast<int>(s));
    std::copy(row.begin(), row.end(), d.begin() + s * n);
  });
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d[j * n + i] = d[i * n + j];
  return FiniteMetric(n, std::move(d));
}

inline double aspect_ratio(const FiniteMetric& m) {
  if (m.size() < 2) throw Error(Errc::degenerate_metric, "degenerate metric: aspect ratio needs at least 2 points");
  return m.max_distance() / m.min_distance();
}

namespace detail {

// Distinct positive distances in a row, ascending, with the points sorted by distance.
inline std::vector<int> by_distance(const FiniteMetric& m, int x) {
  std::vector<int> order(m.size());
  std::iota(order.begin(), order.end(), 0);
  auto row = m.row(x);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return row[a] < row[b]; });
  return order;
}

}  // namespace detail

// Upper estimate of the doubling constant: for every ball B(x, R) with R a distance
// from x, cover it first-fit by radius-R/2 balls and keep the largest count.
inline int doubling_constant_estimate(const FiniteMetric& m) {
  const std::size_t n = m.size();
  if (n <= 1) return 1;
  std::vector<int> best(n, 1);
  parallel_for(n, [&](std::size_t x) {
    auto order = detail::by_distance(m, static_cast<int>(x));
    auto row = m.row(x);
    std::vector<char> covered(n);
    std::size_t end = 1;
    while (end < n) {
      const double radius = row[order[end]];
      while (end < n && row[order[end]] == radius) ++end;
      const double half = radius / 2.0;
      std::fill(covered.begin(), covered.end(), 0);
      int count = 0;
      for (std::size_t a = 0; a < end; ++a) {
        int p = order[a];
        if (covered[p]) continue;
        ++count;
        auto rp = m.row(p);
        for (std::size_t b = a; b < end; ++b)
          if (rp[order[b]] <= half) covered[order[b]] = 1;
      }
      best[x] = std::max(best[x], count);
    }
  });
  return *std::max_element(best.begin(), best.end());
}

// Exact doubling constant by exhaustive set cover (centers anywhere in X). n <= 16.
inline int doubling_constant_exact(const FiniteMetric& m) {
  const std::size_t n = m.size();
  if (n > 16) throw Error(Errc::invalid_argument, "exact doubling constant is limited to 16 points");
  if (n <= 1) return 1;
  using Mask = std::uint32_t;
  int best = 1;
  for (std::size_t x = 0; x < n; ++x) {
    auto row = m.row(x);
    std::vector<double> radii(row.begin(), row.end());
    std::sort(radii.begin(), radii.end());
    radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
    for (double radius : radii) {
      if (radius <= 0.0) continue;
      Mask ball = 0;
      for (std::size_t y = 0; y < n; ++y)
        if (row[y] <= radius) ball |= Mask{1} << y;
      std::vector<Mask> cover(n, 0);
      for (std::size_t c = 0; c < n; ++c)
        for (std::size_t y = 0; y < n; ++y)
          if ((ball >> y & 1) && m(c, y) <= radius / 2.0) cover[c] |= Mask{1} << y;
      // Branch on the lowest uncovered point: some chosen ball must contain it.
      std::function<bool(Mask, int)> solve = [&](Mask left, int budget) -> bool {
        if (left == 0) return true;
        if (budget == 0) return false;
        int low = std::countr_zero(left);
        for (std::size_t c = 0; c < n; ++c)
          if ((cover[c] >> low & 1) && solve(left & ~cover[c], budget - 1)) return true;
        return false;
      };
      int need = 1;
      while (!solve(ball, need)) ++need;
      best = std::max(best, need);
    }
  }
  return best;
}

}  // namespace treecover
