#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <string>
#include <vector>

#include "treecover/common.hpp"
#include "treecover/metric.hpp"

namespace treecover {

inline constexpr std::size_t default_size_cap = 20000;

inline FiniteMetric cycle_metric(std::size_t n) {
  if (n < 3) throw Error(Errc::invalid_argument, "cycle needs at least 3 points");
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t gap = i > j ? i - j : j - i;
      d[i * n + j] = static_cast<double>(std::min(gap, n - gap));
    }
  return FiniteMetric(n, std::move(d));
}

// outer[beta](inner): every outer point u becomes a copy of `inner`. Point
// u * |inner| + i is point i of copy u. Inside a copy distances are the inner
// ones divided by beta * gamma, gamma = diam(inner) / min distance of outer;
// across copies they are the outer distances.
struct CompositionSpec {
  const FiniteMetric& outer;
  const FiniteMetric& inner;
  double beta = 0.5;

  double gamma() const { return inner.size() < 2 ? 1.0 : inner.max_distance() / outer.min_distance(); }
};

inline FiniteMetric beta_composition(const CompositionSpec& spec, std::size_t cap = default_size_cap) {
  const auto& S = spec.outer;
  const auto& T = spec.inner;
  if (S.size() < 2) throw Error(Errc::invalid_argument, "composition needs at least two outer points");
  if (T.size() < 1) throw Error(Errc::invalid_argument, "composition needs a nonempty inner metric");
  if (!(spec.beta >= 0.5)) throw Error(Errc::invalid_argument, "beta must be at least 1/2");
  const std::size_t t = T.size();
  const std::size_t n = S.size() * t;
  if (n > cap) throw Error(Errc::size_cap, "size cap exceeded: " + std::to_string(n) + " points");
  const double shrink = 1.0 / (spec.beta * spec.gamma());
  std::vector<double> d(n * n, 0.0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      const std::size_t u = a / t, v = b / t;
      d[a * n + b] = u == v ? shrink * T(a % t, b % t) : S(u, v);
    }
  FiniteMetric z(n, std::move(d));
  if (n <= 300 && triangle_violations(z) > 0)
    throw Error(Errc::invariant_violation, "composition violates the triangle inequality");
  return z;
}

// k-fold composition of the n-cycle with itself: Z_1 = C_n, Z_k = C_n[beta](Z_{k-1}).
inline FiniteMetric composition_power(std::size_t n, int k, double beta, std::size_t cap = default_size_cap) {
  if (n < 3) throw Error(Errc::invalid_argument, "cycle needs at least 3 points");
  if (k < 1) throw Error(Errc::invalid_argument, "composition depth must be at least 1");
  double size = 1.0;
  for (int i = 0; i < k; ++i) size *= static_cast<double>(n);
  if (size > static_cast<double>(cap))
    throw Error(Errc::size_cap, "size cap exceeded: " + std::to_string(static_cast<std::uint64_t>(size)) + " points");
  const FiniteMetric cycle = cycle_metric(n);
  FiniteMetric z = cycle;
  for (int i = 1; i < k; ++i) z = beta_composition({cycle, z, beta}, cap);
  return z;
}

// G_1: a 2n-cycle with unit edges c_0 .. c_{2n-1}, plus s joined to c_0 and t joined
// to c_n by edges of weight n. G_k: the same frame with every cycle edge c_u c_{u+1}
// replaced by a copy of G_{k-1} whose s, t sit on c_u, c_{u+1}, and side edges of
// weight n (3n)^(k-1). The s-t distance, which is the diameter, is (3n)^k.
struct RecursiveCycleGraph {
  WeightedGraph graph;
  int s = 0;
  int t = 1;
  std::size_t half = 0;  // n
  int depth = 0;         // k
  // inner[p]: vertex hosting point p of the composition of depth k over the
  // 2n-cycle (copy u of the outer cycle lives in the copy of G_{k-1} on edge u).
  std::vector<int> inner;
};

inline std::size_t recursive_cycle_vertex_count(std::size_t n, int k) {
  std::size_t v = 2 * n + 2;
  for (int i = 1; i < k; ++i) v = 2 + 2 * n + 2 * n * (v - 2);
  return v;
}

inline std::size_t recursive_cycle_edge_count(std::size_t n, int k) {
  std::size_t e = 2 * n + 2;
  for (int i = 1; i < k; ++i) e = 2 + 2 * n * e;
  return e;
}

inline RecursiveCycleGraph recursive_cycle_graph(std::size_t n, int k, std::size_t cap = default_size_cap) {
  if (n < 2) throw Error(Errc::invalid_argument, "recursive cycle graph needs n >= 2");
  if (k < 1) throw Error(Errc::invalid_argument, "recursion depth must be at least 1");
  // Guard against overflow before comparing with the cap.
  std::size_t v = 2 * n + 2;
  for (int i = 1; i < k; ++i) {
    if (v > cap) break;
    v = 2 + 2 * n + 2 * n * (v - 2);
  }
  if (v > cap) throw Error(Errc::size_cap, "size cap exceeded: recursive cycle graph too large");

  const int cycle = static_cast<int>(2 * n);
  auto frame = [&](double side, std::vector<Edge>& edges) {
    edges.push_back({0, 2, side});
    edges.push_back({1, 2 + static_cast<int>(n), side});
  };
  // Vertex ids: s = 0, t = 1, c_u = 2 + u, then copies.
  std::vector<Edge> edges;
  std::vector<int> inner;
  frame(static_cast<double>(n), edges);
  for (int u = 0; u < cycle; ++u) {
    edges.push_back({2 + u, 2 + (u + 1) % cycle, 1.0});
    inner.push_back(2 + u);
  }
  std::size_t count = 2 + static_cast<std::size_t>(cycle);
  double side = static_cast<double>(n);
  for (int level = 2; level <= k; ++level) {
    side *= 3.0 * static_cast<double>(n);
    const std::size_t sub_count = count;
    const std::vector<Edge> sub_edges = std::move(edges);
    const std::vector<int> sub_inner = std::move(inner);
    edges.clear();
    inner.clear();
    frame(side, edges);
    int next = 2 + cycle;
    for (int u = 0; u < cycle; ++u) {
      std::vector<int> id(sub_count);
      id[0] = 2 + u;
      id[1] = 2 + (u + 1) % cycle;
      for (std::size_t w = 2; w < sub_count; ++w) id[w] = next++;
      for (const Edge& e : sub_edges) edges.push_back({id[e.u], id[e.v], e.w});
      for (int p : sub_inner) inner.push_back(id[p]);
    }
    count = static_cast<std::size_t>(next);
  }
  RecursiveCycleGraph g{WeightedGraph(count, std::move(edges), true), 0, 1, n, k, std::move(inner)};
  return g;
}

struct CompositionEmbedding {
  std::vector<int> vertex_of_point;
  double scale = 1.0;       // 1 / (3n)^(k-1)
  double min_ratio = 0.0;   // of scale * d_G / d_Z over pairs
  double max_ratio = 0.0;
  double distortion = 1.0;  // max_ratio / min_ratio
};

// Maps the composition of depth k over the 2n-cycle with beta = 3 onto the inner
// vertices of G_k scaled by 1 / (3n)^(k-1) and measures the bi-Lipschitz distortion
// over all pairs.
inline CompositionEmbedding embed_composition_in_cycle_graph(std::size_t n, int k, std::size_t cap = default_size_cap) {
  const auto z = composition_power(2 * n, k, 3.0, cap);
  const auto g = recursive_cycle_graph(n, k, cap);
  CompositionEmbedding out;
  out.vertex_of_point = g.inner;
  out.scale = std::pow(3.0 * static_cast<double>(n), -(k - 1));
  const std::size_t p = z.size();
  std::vector<std::vector<double>> rows(p);
  parallel_for(p, [&](std::size_t a) { rows[a] = shortest_distances(g.graph, g.inner[a]); });
  out.min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = a + 1; b < p; ++b) {
      const double r = out.scale * rows[a][g.inner[b]] / z(a, b);
      out.min_ratio = std::min(out.min_ratio, r);
      out.max_ratio = std::max(out.max_ratio, r);
    }
  out.distortion = p < 2 ? 1.0 : out.max_ratio / out.min_ratio;
  return out;
}

}  // namespace treecover
