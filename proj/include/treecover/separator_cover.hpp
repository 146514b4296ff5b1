#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "treecover/common.hpp"
#include "treecover/metric.hpp"
#include "treecover/planar.hpp"
#include "treecover/random.hpp"
#include "treecover/tree.hpp"
#include "treecover/verify.hpp"

namespace treecover {

// Union of a few shortest paths whose removal leaves components of at most half
// the vertices. Vertex ids refer to the graph the separator was computed on.
struct PathSeparator {
  std::vector<std::vector<int>> paths;
  std::vector<int> removed;  // ascending
};

// Connected components of g after deleting the flagged vertices, each ascending,
// ordered by smallest vertex.
inline std::vector<std::vector<int>> components_without(const WeightedGraph& g, const std::vector<char>& removed) {
  std::vector<std::vector<int>> comps;
  std::vector<char> seen(removed.begin(), removed.end());
  for (std::size_t s = 0; s < g.size(); ++s) {
    if (seen[s]) continue;
    std::vector<int> comp{static_cast<int>(s)};
    seen[s] = 1;
    for (std::size_t a = 0; a < comp.size(); ++a)
      for (const auto& arc : g.neighbors(comp[a]))
        if (!seen[arc.to]) {
          seen[arc.to] = 1;
          comp.push_back(arc.to);
        }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  return comps;
}

namespace separator_detail {

struct Candidate {
  std::vector<int> ends;
  std::size_t largest = std::numeric_limits<std::size_t>::max();
  std::size_t covered = 0;
};

class RootPaths {
 public:
  RootPaths(const WeightedGraph& g, const ShortestPathTree& spt) : g_(g), spt_(spt), mark_(g.size(), 0) {}

  std::vector<int> path_to(int v) const {
    std::vector<int> p;
    for (int x = v; x >= 0; x = spt_.parent[x]) p.push_back(x);
    std::reverse(p.begin(), p.end());
    return p;
  }

  // Size of the largest component left after deleting the root paths to `ends`.
  void evaluate(Candidate& c) {
    std::fill(mark_.begin(), mark_.end(), 0);
    c.covered = 0;
    for (int v : c.ends)
      for (int x = v; x >= 0 && !mark_[x]; x = spt_.parent[x]) {
        mark_[x] = 1;
        ++c.covered;
      }
    c.largest = 0;
    std::vector<int> stack;
    for (std::size_t s = 0; s < g_.size(); ++s) {
      if (mark_[s]) continue;
      std::size_t size = 0;
      mark_[s] = 1;
      stack.assign(1, static_cast<int>(s));
      while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        ++size;
        for (const auto& arc : g_.neighbors(v))
          if (!mark_[arc.to]) {
            mark_[arc.to] = 1;
            stack.push_back(arc.to);
          }
      }
      c.largest = std::max(c.largest, size);
    }
  }

 private:
  const WeightedGraph& g_;
  const ShortestPathTree& spt_;
  std::vector<char> mark_;
};

inline bool better(const Candidate& a, const Candidate& b) {
  if (a.largest != b.largest) return a.largest < b.largest;
  return a.covered > b.covered;
}

}  // namespace separator_detail

// Separator made of at most three root paths of a shortest-path tree rooted at
// vertex 0. Tries single paths, then the two paths of each non-tree edge, then the
// three corner paths of each triangle in a triangulated planar embedding, keeping
// the most balanced candidate of the first stage that reaches the n/2 bound.
inline PathSeparator planar_separator(const WeightedGraph& g) {
  using separator_detail::Candidate;
  const std::size_t n = g.size();
  PathSeparator out;
  if (n == 0) return out;
  require_connected(g);
  auto faces = planar_faces(g);  // also rejects non-planar input
  if (n == 1) return out;

  const auto spt = shortest_path_tree(g, 0);
  separator_detail::RootPaths roots(g, spt);
  auto balanced = [&](const Candidate& c) { return 2 * c.largest <= n; };

  Candidate best;
  auto consider = [&](std::vector<int> ends) {
    Candidate c{std::move(ends)};
    roots.evaluate(c);
    if (separator_detail::better(c, best)) best = std::move(c);
  };

  for (std::size_t v = 0; v < n; ++v) consider({static_cast<int>(v)});
  if (!balanced(best)) {
    for (const Edge& e : g.edges())
      if (spt.parent[e.u] != e.v && spt.parent[e.v] != e.u) consider({e.u, e.v});
  }
  if (!balanced(best)) {
    for (const auto& f : faces)
      for (std::size_t i = 1; i + 1 < f.size(); ++i) consider({f[0], f[i], f[i + 1]});
  }
  if (!balanced(best))
    throw Error(Errc::invariant_violation, "no balanced path separator found on " + std::to_string(n) + " vertices");

  // Drop root paths contained in another chosen path.
  std::vector<std::vector<int>> paths;
  for (int v : best.ends) paths.push_back(roots.path_to(v));
  std::sort(paths.begin(), paths.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });
  std::vector<std::vector<int>> kept;
  for (auto& p : paths) {
    bool inside = std::any_of(kept.begin(), kept.end(), [&](const auto& q) {
      return std::find(q.begin(), q.end(), p.back()) != q.end();
    });
    if (!inside) kept.push_back(std::move(p));
  }
  // Two root paths that only share the root form one path when that path is shortest.
  for (std::size_t a = 0; a < kept.size() && kept.size() > 1; ++a)
    for (std::size_t b = a + 1; b < kept.size(); ++b) {
      const auto& pa = kept[a];
      const auto& pb = kept[b];
      if (pa.size() < 2 || pb.size() < 2 || pa[1] == pb[1]) continue;
      const double joined = spt.dist[pa.back()] + spt.dist[pb.back()];
      const double direct = shortest_distances(g, pa.back())[pb.back()];
      if (!approx_eq(joined, direct)) continue;
      std::vector<int> merged(pa.rbegin(), pa.rend());
      merged.insert(merged.end(), pb.begin() + 1, pb.end());
      kept[a] = std::move(merged);
      kept.erase(kept.begin() + b);
      b = a;
    }
  out.paths = std::move(kept);
  for (const auto& p : out.paths) out.removed.insert(out.removed.end(), p.begin(), p.end());
  std::sort(out.removed.begin(), out.removed.end());
  out.removed.erase(std::unique(out.removed.begin(), out.removed.end()), out.removed.end());
  return out;
}

// Landmarks of every vertex on one path. Positions index into `path`.
struct LandmarkSets {
  std::vector<int> path;
  std::vector<double> prefix;                // path length from path[0]
  std::vector<double> to_path;               // to_path[i * n + x] = d(x, path[i])
  std::vector<std::vector<int>> positions;   // per vertex; the nearest path vertex comes first
  std::size_t n = 0;

  double path_distance(int a, int b) const { return std::abs(prefix[b] - prefix[a]); }
  double distance(int x, int pos) const { return to_path[static_cast<std::size_t>(pos) * n + x]; }

  std::vector<int> vertices(int x) const {
    std::vector<int> out;
    for (int pos : positions[x]) out.push_back(path[pos]);
    return out;
  }

  std::size_t max_size() const {
    std::size_t m = 0;
    for (const auto& p : positions) m = std::max(m, p.size());
    return m;
  }
};

// Checks that `path` is a walk along edges of g whose length equals the graph
// distance of its endpoints; returns the prefix lengths.
inline std::vector<double> shortest_path_prefix(const WeightedGraph& g, std::span<const int> path,
                                                std::span<const double> from_first) {
  auto bad = [] { throw Error(Errc::invalid_separator_path, "invalid separator path"); };
  if (path.empty()) bad();
  std::vector<double> prefix(path.size(), 0.0);
  for (std::size_t i = 1; i < path.size(); ++i) {
    double w = -1.0;
    for (const auto& arc : g.neighbors(path[i - 1]))
      if (arc.to == path[i]) w = arc.w;
    if (w < 0.0) bad();
    prefix[i] = prefix[i - 1] + w;
  }
  if (!approx_eq(prefix.back(), from_first[path.back()])) bad();
  return prefix;
}

// Scan both directions from the nearest path vertex z0, adding a vertex whenever
// (1 + eps) d(x, z) drops below d(x, last landmark) + d_P(last landmark, z).
inline LandmarkSets landmarks(const WeightedGraph& g, std::span<const int> path, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(Errc::invalid_argument, "eps must lie in (0, 1)");
  LandmarkSets L;
  L.n = g.size();
  L.path.assign(path.begin(), path.end());
  L.to_path.resize(path.size() * L.n);
  parallel_for(path.size(), [&](std::size_t i) {
    auto d = shortest_distances(g, path[i]);
    std::copy(d.begin(), d.end(), L.to_path.begin() + i * L.n);
  });
  L.prefix = shortest_path_prefix(g, path, std::span<const double>(L.to_path.data(), L.n));
  const int len = static_cast<int>(path.size());
  L.positions.assign(L.n, {});
  for (std::size_t x = 0; x < L.n; ++x) {
    int z0 = 0;
    for (int i = 1; i < len; ++i)
      if (L.distance(int(x), i) < L.distance(int(x), z0)) z0 = i;
    auto& pos = L.positions[x];
    pos.push_back(z0);
    for (int dir : {1, -1}) {
      int last = z0;
      for (int i = z0 + dir; i >= 0 && i < len; i += dir) {
        const double lhs = (1.0 + eps) * L.distance(int(x), i);
        const double rhs = L.distance(int(x), last) + L.path_distance(last, i);
        if (lhs < rhs * (1.0 - rel_tol)) {
          pos.push_back(i);
          last = i;
        }
      }
    }
  }
  return L;
}

// Brute force over all pairs whose shortest path meets the path: count pairs with
// no landmark witness u in L_x, v in L_y of d(x,u) + d_P(u,v) + d(v,y) <= (1+eps) d(x,y).
// `apsp` must be the shortest-path metric of the same graph.
struct CoverageCheck {
  std::size_t crossing_pairs = 0;
  std::size_t violations = 0;
};

inline CoverageCheck landmark_coverage(const FiniteMetric& apsp, const LandmarkSets& L, double eps) {
  const std::size_t n = apsp.size();
  const int len = static_cast<int>(L.path.size());
  std::vector<CoverageCheck> per_x(n);
  parallel_for(n, [&](std::size_t x) {
    for (std::size_t y = x + 1; y < n; ++y) {
      const double dxy = apsp(x, y);
      bool crossing = false;
      for (int i = 0; i < len && !crossing; ++i)
        crossing = approx_eq(L.distance(int(x), i) + L.distance(int(y), i), dxy);
      if (!crossing) continue;
      ++per_x[x].crossing_pairs;
      bool ok = false;
      for (int u : L.positions[x]) {
        for (int v : L.positions[y])
          if (approx_leq(L.distance(int(x), u) + L.path_distance(u, v) + L.distance(int(y), v), (1.0 + eps) * dxy)) {
            ok = true;
            break;
          }
        if (ok) break;
      }
      if (!ok) ++per_x[x].violations;
    }
  });
  CoverageCheck total;
  for (const auto& c : per_x) {
    total.crossing_pairs += c.crossing_pairs;
    total.violations += c.violations;
  }
  return total;
}

struct SeparatorCoverOptions {
  int max_retries = 5;
  std::size_t coverage_check_limit = 300;  // brute-force landmark check on pieces up to this size
};

struct SeparatorCoverResult {
  TreeCover cover;
  DistortionReport report;
  std::uint64_t seed = 0;
  int retries = 0;
  int depth = 0;
  std::vector<std::size_t> paths_per_level;
  std::vector<std::size_t> pieces_per_level;
  std::size_t copies_per_path = 0;
  std::size_t max_landmarks = 0;
  std::size_t crossing_pairs_checked = 0;
};

// Builds the randomized landmark-tree cover of a planar graph: recursive path
// separation; for every recursion level and path slot, independent trees made of
// the path plus one edge from each other vertex of the piece to a uniformly chosen
// landmark. The result is verified and rebuilt with fresh derived seeds on failure.
inline SeparatorCoverResult build_separator_cover(const WeightedGraph& g, double eps, double C, std::uint64_t seed,
                                                  const SeparatorCoverOptions& opts = {}) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(Errc::invalid_argument, "eps must lie in (0, 1)");
  if (!(C > 0.0)) throw Error(Errc::invalid_argument, "C must be positive");
  const std::size_t n = g.size();
  if (n == 0) throw Error(Errc::invalid_argument, "empty graph");
  require_connected(g);
  if (!is_planar(g)) throw Error(Errc::non_planar, "non-planar input");
  const FiniteMetric metric = metric_from_graph(g);

  struct Slot {
    std::vector<int> path;  // global ids
    LandmarkSets marks;     // local to the piece
    bool branching = false; // some off-path vertex has more than one landmark
  };
  struct Piece {
    int level;
    std::vector<int> vertices;  // global ids, ascending
    std::vector<Slot> slots;
  };

  SeparatorCoverResult res;
  res.seed = seed;
  const std::size_t landmark_cap = static_cast<std::size_t>(std::floor(8.0 / eps + 1e-9));
  const int depth_cap = (n > 1 ? ceil_log2(static_cast<double>(n)) : 0) + 2;

  std::vector<Piece> pieces;
  std::vector<std::vector<int>> current{std::vector<int>(n)};
  std::iota(current[0].begin(), current[0].end(), 0);
  for (int level = 0;; ++level) {
    std::erase_if(current, [](const auto& v) { return v.size() < 2; });  // nothing left to separate
    if (current.empty()) break;
    if (level >= depth_cap)
      throw Error(Errc::recursion_depth, "separator recursion exceeded depth " + std::to_string(depth_cap));
    std::vector<std::vector<int>> next;
    std::size_t level_paths = 0;
    for (auto& verts : current) {
      const auto sub = g.induced(verts);
      const auto sep = planar_separator(sub);
      Piece piece{level, verts, {}};
      std::vector<char> on_sep(sub.size(), 0);
      for (int v : sep.removed) on_sep[v] = 1;
      std::optional<FiniteMetric> apsp;
      if (sub.size() <= opts.coverage_check_limit) apsp = metric_from_graph(sub);
      for (const auto& p : sep.paths) {
        Slot slot;
        slot.marks = landmarks(sub, p, eps);
        for (int v : p) slot.path.push_back(verts[v]);
        const std::size_t biggest = slot.marks.max_size();
        if (biggest > landmark_cap)
          throw Error(Errc::invariant_violation, "landmark set of size " + std::to_string(biggest) +
                                                     " exceeds 8/eps");
        res.max_landmarks = std::max(res.max_landmarks, biggest);
        std::vector<char> on_path(sub.size(), 0);
        for (int v : p) on_path[v] = 1;
        for (std::size_t x = 0; x < sub.size(); ++x)
          if (!on_path[x] && slot.marks.positions[x].size() > 1) slot.branching = true;
        if (apsp) {
          auto check = landmark_coverage(*apsp, slot.marks, eps);
          res.crossing_pairs_checked += check.crossing_pairs;
          if (check.violations > 0)
            throw Error(Errc::invariant_violation, std::to_string(check.violations) +
                                                       " crossing pairs lack a landmark witness");
        }
        piece.slots.push_back(std::move(slot));
      }
      level_paths += sep.paths.size();
      for (auto& comp : components_without(sub, on_sep)) {
        if (2 * comp.size() > sub.size())
          throw Error(Errc::invariant_violation, "separator left a component of " + std::to_string(comp.size()) +
                                                     " out of " + std::to_string(sub.size()) + " vertices");
        for (int& v : comp) v = verts[v];
        next.push_back(std::move(comp));
      }
      pieces.push_back(std::move(piece));
    }
    res.paths_per_level.push_back(level_paths);
    res.pieces_per_level.push_back(current.size());
    current = std::move(next);
  }
  res.depth = static_cast<int>(res.paths_per_level.size());

  const double log_n = std::log(static_cast<double>(std::max<std::size_t>(n, 2)));
  res.copies_per_path = static_cast<std::size_t>(std::ceil(C * log_n / (eps * eps)));

  // Tree groups: (level, slot). Single-vertex pieces never get a separator.
  struct Group {
    int level;
    std::size_t slot;
    std::vector<std::size_t> pieces;
    std::size_t copies;
  };
  std::vector<Group> groups;
  for (int level = 0; level < res.depth; ++level) {
    std::size_t max_slots = 0;
    for (const auto& p : pieces)
      if (p.level == level) max_slots = std::max(max_slots, p.slots.size());
    for (std::size_t s = 0; s < max_slots; ++s) {
      Group grp{level, s, {}, 1};
      bool branching = false;
      for (std::size_t k = 0; k < pieces.size(); ++k)
        if (pieces[k].level == level && pieces[k].slots.size() > s) {
          grp.pieces.push_back(k);
          branching = branching || pieces[k].slots[s].branching;
        }
      grp.copies = branching ? res.copies_per_path : 1;
      groups.push_back(std::move(grp));
    }
  }

  const Rng root(seed);
  for (int attempt = 0;; ++attempt) {
    res.cover = TreeCover{};
    res.cover.kind = CoverKind::plain;
    res.cover.claimed_distortion = 1.0 + eps;
    for (const auto& grp : groups) {
      std::vector<TreeEmbedding> made(grp.copies);
      parallel_for(grp.copies, [&](std::size_t c) {
        std::vector<Edge> forest;
        for (std::size_t k : grp.pieces) {
          const Piece& piece = pieces[k];
          const Slot& slot = piece.slots[grp.slot];
          Rng pick = root.child("attempt", attempt).child("level", grp.level).child("piece", k)
                         .child("slot", grp.slot).child("copy", c);
          for (std::size_t i = 0; i + 1 < slot.path.size(); ++i)
            forest.push_back({slot.path[i], slot.path[i + 1],
                              slot.marks.path_distance(static_cast<int>(i), static_cast<int>(i + 1))});
          std::vector<char> on_path(piece.vertices.size(), 0);
          for (int v : slot.marks.path) on_path[v] = 1;
          for (std::size_t x = 0; x < piece.vertices.size(); ++x) {
            if (on_path[x]) continue;
            const auto& pos = slot.marks.positions[x];
            const int choice = pos[pick.index(pos.size())];
            forest.push_back({piece.vertices[x], slot.path[choice], slot.marks.distance(static_cast<int>(x), choice)});
          }
        }
        made[c] = complete_forest(metric, std::move(forest));
      });
      for (auto& t : made) res.cover.trees.push_back(std::move(t));
    }
    if (res.cover.trees.empty()) res.cover.trees.push_back(complete_forest(metric, {}));
    res.report = verify_cover(res.cover, metric);
    res.retries = attempt;
    if (res.report.passed() || attempt >= opts.max_retries) return res;
  }
}

}  // namespace treecover
