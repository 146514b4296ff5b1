#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "treecover/common.hpp"
#include "treecover/metric.hpp"

namespace treecover {

// Edge-weighted tree whose nodes include every metric point exactly once.
// Nodes without a point are Steiner nodes.
class TreeEmbedding {
 public:
  struct Arc {
    int to;
    double w;
  };

  TreeEmbedding() = default;

  // point_of_node[v] is the metric point placed at node v, or -1 for a Steiner node.
  TreeEmbedding(std::size_t point_count, std::vector<int> point_of_node, std::vector<Edge> edges)
      : points_(point_count), point_of_node_(std::move(point_of_node)), edges_(std::move(edges)) {
    const std::size_t nodes = point_of_node_.size();
    if (nodes == 0) throw Error(Errc::invalid_tree, "invalid tree: no nodes");
    if (edges_.size() + 1 != nodes)
      throw Error(Errc::invalid_tree, "invalid tree: " + std::to_string(nodes) + " nodes but " +
                                          std::to_string(edges_.size()) + " edges");
    node_of_point_.assign(points_, -1);
    for (std::size_t v = 0; v < nodes; ++v) {
      int p = point_of_node_[v];
      if (p < -1 || p >= static_cast<int>(points_))
        throw Error(Errc::invalid_tree, "invalid tree: node " + std::to_string(v) + " maps to an unknown point");
      if (p < 0) continue;
      if (node_of_point_[p] >= 0)
        throw Error(Errc::invalid_tree, "invalid tree: point " + std::to_string(p) + " appears twice");
      node_of_point_[p] = static_cast<int>(v);
    }
    for (std::size_t p = 0; p < points_; ++p)
      if (node_of_point_[p] < 0)
        throw Error(Errc::invalid_tree, "invalid tree: point " + std::to_string(p) + " is missing");

    offset_.assign(nodes + 1, 0);
    for (const Edge& e : edges_) {
      if (e.u < 0 || e.v < 0 || e.u >= static_cast<int>(nodes) || e.v >= static_cast<int>(nodes) || e.u == e.v)
        throw Error(Errc::invalid_tree, "invalid tree: bad edge endpoints");
      if (!std::isfinite(e.w) || !(e.w > 0.0))
        throw Error(Errc::invalid_tree, "invalid tree: edge weights must be positive");
      ++offset_[e.u + 1];
      ++offset_[e.v + 1];
    }
    for (std::size_t v = 0; v < nodes; ++v) offset_[v + 1] += offset_[v];
    arcs_.resize(offset_[nodes]);
    std::vector<std::size_t> fill(offset_.begin(), offset_.end() - 1);
    for (const Edge& e : edges_) {
      arcs_[fill[e.u]++] = {e.v, e.w};
      arcs_[fill[e.v]++] = {e.u, e.w};
    }

    // Root at node 0; record parent links for path queries.
    parent_.assign(nodes, -2);
    parent_w_.assign(nodes, 0.0);
    depth_.assign(nodes, 0);
    parent_[0] = -1;
    std::vector<int> stack{0};
    std::size_t reached = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (const Arc& a : neighbors(v)) {
        if (parent_[a.to] != -2) continue;
        parent_[a.to] = v;
        parent_w_[a.to] = a.w;
        depth_[a.to] = depth_[v] + 1;
        ++reached;
        stack.push_back(a.to);
      }
    }
    if (reached != nodes) throw Error(Errc::invalid_tree, "invalid tree: not connected");
  }

  // Tree whose nodes are exactly the points, node i = point i.
  static TreeEmbedding on_points(std::size_t n, std::vector<Edge> edges) {
    std::vector<int> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    return TreeEmbedding(n, std::move(ids), std::move(edges));
  }

  std::size_t node_count() const { return point_of_node_.size(); }
  std::size_t point_count() const { return points_; }
  const std::vector<Edge>& edges() const { return edges_; }
  int point_of_node(std::size_t v) const { return point_of_node_[v]; }
  int node_of_point(std::size_t p) const { return node_of_point_[p]; }
  bool is_steiner(std::size_t v) const { return point_of_node_[v] < 0; }

  std::span<const Arc> neighbors(std::size_t v) const {
    return {arcs_.data() + offset_[v], offset_[v + 1] - offset_[v]};
  }

  // Path lengths from point x to every point, each summed edge by edge walking
  // away from x. `node_dist` is scratch space of node_count() entries.
  void distances_from(int x, std::span<double> out, std::vector<double>& node_dist,
                      std::vector<int>& stack) const {
    node_dist.assign(node_count(), -1.0);
    const int src = node_of_point_[x];
    node_dist[src] = 0.0;
    stack.clear();
    stack.push_back(src);
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (const Arc& a : neighbors(v)) {
        if (node_dist[a.to] >= 0.0) continue;
        node_dist[a.to] = node_dist[v] + a.w;
        stack.push_back(a.to);
      }
    }
    for (std::size_t p = 0; p < points_; ++p) out[p] = node_dist[node_of_point_[p]];
  }

  std::vector<double> distances_from(int x) const {
    std::vector<double> out(points_), scratch;
    std::vector<int> stack;
    distances_from(x, out, scratch, stack);
    return out;
  }

  // Path length between points, summed edge by edge starting at the smaller point id.
  // This matches distances_from(min(x, y)) bit for bit.
  double distance(int x, int y) const {
    if (x < 0 || y < 0 || x >= static_cast<int>(points_) || y >= static_cast<int>(points_))
      throw Error(Errc::unmapped_point, "unmapped point: " + std::to_string(x < 0 || x >= static_cast<int>(points_) ? x : y));
    if (x > y) std::swap(x, y);
    int a = node_of_point_[x];
    int b = node_of_point_[y];
    std::vector<double> down;
    double sum = 0.0;
    while (a != b) {
      if (depth_[a] >= depth_[b]) {
        sum += parent_w_[a];
        a = parent_[a];
      } else {
        down.push_back(parent_w_[b]);
        b = parent_[b];
      }
    }
    for (auto it = down.rbegin(); it != down.rend(); ++it) sum += *it;
    return sum;
  }

 private:
  std::size_t points_ = 0;
  std::vector<int> point_of_node_;
  std::vector<int> node_of_point_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offset_;
  std::vector<Arc> arcs_;
  std::vector<int> parent_;
  std::vector<double> parent_w_;
  std::vector<int> depth_;
};

inline double tree_distance(const TreeEmbedding& t, int x, int y) { return t.distance(x, y); }

struct HstNode {
  int parent = -1;
  double label = 0.0;
  int point = -1;  // leaves carry a metric point
};

// Rooted labelled tree; the distance between two leaves is the label of their
// lowest common ancestor.
class HstTree {
 public:
  HstTree() = default;

  HstTree(std::size_t point_count, std::vector<HstNode> nodes, double mu = 1.0)
      : points_(point_count), nodes_(std::move(nodes)), mu_(mu) {
    const std::size_t n = nodes_.size();
    auto fail = [](const std::string& why) { throw Error(Errc::invalid_hst, "invalid HST: " + why); };
    if (n == 0) fail("no nodes");
    if (!(mu_ >= 1.0)) fail("separation factor below 1");
    children_.assign(n, {});
    leaf_of_point_.assign(points_, -1);
    for (std::size_t v = 0; v < n; ++v) {
      const HstNode& node = nodes_[v];
      if (node.parent < 0) {
        if (root_ >= 0) fail("more than one root");
        root_ = static_cast<int>(v);
      } else {
        if (node.parent >= static_cast<int>(n) || node.parent == static_cast<int>(v)) fail("bad parent link");
        children_[node.parent].push_back(static_cast<int>(v));
      }
      if (node.point >= static_cast<int>(points_) || node.point < -1) fail("unknown point");
      if (node.point >= 0) {
        if (leaf_of_point_[node.point] >= 0) fail("point " + std::to_string(node.point) + " appears twice");
        leaf_of_point_[node.point] = static_cast<int>(v);
      }
      if (!std::isfinite(node.label) || node.label < 0.0) fail("negative label");
    }
    if (root_ < 0) fail("no root");
    for (std::size_t p = 0; p < points_; ++p)
      if (leaf_of_point_[p] < 0) fail("point " + std::to_string(p) + " is missing");

    depth_.assign(n, -1);
    depth_[root_] = 0;
    std::vector<int> stack{root_};
    std::size_t reached = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int c : children_[v]) {
        depth_[c] = depth_[v] + 1;
        ++reached;
        stack.push_back(c);
      }
    }
    if (reached != n) fail("parent links contain a cycle");

    for (std::size_t v = 0; v < n; ++v) {
      const HstNode& node = nodes_[v];
      const bool leaf = children_[v].empty();
      if (leaf && node.point < 0) fail("leaf without a point");
      if (!leaf && node.point >= 0) fail("point on an internal node");
      if (leaf && node.label != 0.0) fail("leaf with nonzero label");
      if (!leaf && node.label <= 0.0) fail("internal node with zero label");
      if (node.parent >= 0) {
        double up = nodes_[node.parent].label;
        if (node.label > up) fail("child label exceeds parent label");
        if (mu_ > 1.0 && !leaf && !approx_leq(mu_ * node.label, up)) fail("label ratio below separation factor");
      }
    }
  }

  std::size_t point_count() const { return points_; }
  std::size_t node_count() const { return nodes_.size(); }
  int root() const { return root_; }
  double mu() const { return mu_; }
  const HstNode& node(std::size_t v) const { return nodes_[v]; }
  const std::vector<HstNode>& nodes() const { return nodes_; }
  const std::vector<int>& children(std::size_t v) const { return children_[v]; }
  int leaf_of_point(std::size_t p) const { return leaf_of_point_[p]; }

  double distance(int x, int y) const {
    if (x < 0 || y < 0 || x >= static_cast<int>(points_) || y >= static_cast<int>(points_))
      throw Error(Errc::unmapped_point, "unmapped point");
    int a = leaf_of_point_[x];
    int b = leaf_of_point_[y];
    while (a != b) {
      if (depth_[a] >= depth_[b])
        a = nodes_[a].parent;
      else
        b = nodes_[b].parent;
    }
    return nodes_[a].label;
  }

 private:
  std::size_t points_ = 0;
  std::vector<HstNode> nodes_;
  double mu_ = 1.0;
  int root_ = -1;
  std::vector<std::vector<int>> children_;
  std::vector<int> leaf_of_point_;
  std::vector<int> depth_;
};

// Steiner realization: the edge from a node labelled a to a descendant labelled b
// weighs (a - b) / 2. Equal-label chains are contracted and unary nodes spliced out.
inline TreeEmbedding hst_to_tree(const HstTree& h) {
  std::vector<int> point_of_node;
  std::vector<Edge> edges;

  auto effective_children = [&](int v) {
    std::vector<int> out, stack(h.children(v).rbegin(), h.children(v).rend());
    while (!stack.empty()) {
      int c = stack.back();
      stack.pop_back();
      if (!h.children(c).empty() && h.node(c).label == h.node(v).label)
        stack.insert(stack.end(), h.children(c).rbegin(), h.children(c).rend());
      else
        out.push_back(c);
    }
    return out;
  };

  struct Task {
    int hst_node;
    int attach;  // tree node to hang from, -1 for the root
    double attach_label;
  };
  std::vector<Task> work{{h.root(), -1, 0.0}};
  while (!work.empty()) {
    Task t = work.back();
    work.pop_back();
    const HstNode& node = h.node(t.hst_node);
    if (h.children(t.hst_node).empty()) {
      int id = static_cast<int>(point_of_node.size());
      point_of_node.push_back(node.point);
      if (t.attach >= 0) edges.push_back({t.attach, id, (t.attach_label - node.label) / 2.0});
      continue;
    }
    auto kids = effective_children(t.hst_node);
    if (kids.size() == 1) {
      work.push_back({kids[0], t.attach, t.attach_label});
      continue;
    }
    int id = static_cast<int>(point_of_node.size());
    point_of_node.push_back(-1);
    if (t.attach >= 0) edges.push_back({t.attach, id, (t.attach_label - node.label) / 2.0});
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) work.push_back({*it, id, node.label});
  }
  return TreeEmbedding(h.point_count(), std::move(point_of_node), std::move(edges));
}

// Builds the HST of an ultrametric given as a distance matrix. Each set is split
// into the classes of "closer than the set diameter".
inline HstTree hst_from_ultrametric(const FiniteMetric& u, double mu = 1.0) {
  const std::size_t n = u.size();
  if (n == 0) throw Error(Errc::invalid_hst, "invalid HST: empty point set");
  std::vector<HstNode> nodes;
  struct Task {
    std::vector<int> members;
    int parent;
  };
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  std::vector<Task> work;
  work.push_back({std::move(all), -1});
  std::vector<char> taken(n, 0);
  while (!work.empty()) {
    Task t = std::move(work.back());
    work.pop_back();
    const int id = static_cast<int>(nodes.size());
    if (t.members.size() == 1) {
      nodes.push_back({t.parent, 0.0, t.members[0]});
      continue;
    }
    double label = 0.0;
    for (std::size_t a = 0; a < t.members.size(); ++a)
      for (std::size_t b = a + 1; b < t.members.size(); ++b) label = std::max(label, u(t.members[a], t.members[b]));
    nodes.push_back({t.parent, label, -1});
    for (int p : t.members) taken[p] = 0;
    std::vector<std::vector<int>> classes;
    for (int a : t.members) {
      if (taken[a]) continue;
      std::vector<int> cls;
      for (int b : t.members)
        if (!taken[b] && (a == b || u(a, b) < label)) {
          taken[b] = 1;
          cls.push_back(b);
        }
      classes.push_back(std::move(cls));
    }
    // Ultrametric check: inside a class everything is below the label, across
    // classes everything equals it.
    for (std::size_t c = 0; c < classes.size(); ++c)
      for (int a : classes[c])
        for (std::size_t e = c; e < classes.size(); ++e)
          for (int b : classes[e]) {
            if (a == b) continue;
            bool ok = (c == e) ? u(a, b) < label : approx_eq(u(a, b), label);
            if (!ok) throw Error(Errc::invalid_hst, "invalid HST: input is not an ultrametric");
          }
    for (auto it = classes.rbegin(); it != classes.rend(); ++it) work.push_back({std::move(*it), id});
  }
  return HstTree(n, std::move(nodes), mu);
}

// Completes a forest on the points to a spanning tree: every component other than
// the one holding point 0 is joined to point 0 through its smallest point, with
// the true metric distance as weight.
inline TreeEmbedding complete_forest(const FiniteMetric& m, std::vector<Edge> forest) {
  const std::size_t n = m.size();
  std::vector<int> up(n);
  std::iota(up.begin(), up.end(), 0);
  auto find = [&](int x) {
    while (up[x] != x) x = up[x] = up[up[x]];
    return x;
  };
  for (const Edge& e : forest) {
    int a = find(e.u), b = find(e.v);
    if (a == b)
      throw Error(Errc::invariant_violation, "forest edge " + std::to_string(e.u) + "-" + std::to_string(e.v) +
                                                 " closes a cycle");
    up[std::max(a, b)] = std::min(a, b);
  }
  for (std::size_t v = 0; v < n; ++v) {
    int r = find(static_cast<int>(v));
    if (r == static_cast<int>(v) && v != 0) forest.push_back({0, r, m(0, r)});
  }
  return TreeEmbedding::on_points(n, std::move(forest));
}

enum class CoverKind { plain, ramsey };

struct TreeCover {
  std::vector<TreeEmbedding> trees;
  CoverKind kind = CoverKind::plain;
  double claimed_distortion = 1.0;
  std::vector<int> home_tree;  // one entry per point for ramsey covers

  std::size_t point_count() const { return trees.empty() ? 0 : trees.front().point_count(); }
};

}  // namespace treecover
