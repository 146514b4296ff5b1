#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "treecover/common.hpp"
#include "treecover/metric.hpp"

namespace treecover {

// Greedy r-net: scan points in `order` (ascending ids when empty) and keep a point
// iff it is farther than r from every point kept so far.
inline std::vector<int> greedy_net(const FiniteMetric& m, double r, std::span<const int> order = {}) {
  if (!(r > 0.0)) throw Error(Errc::invalid_argument, "net radius must be positive");
  std::vector<int> scan;
  if (order.empty()) {
    scan.resize(m.size());
    std::iota(scan.begin(), scan.end(), 0);
  } else {
    scan.assign(order.begin(), order.end());
  }
  std::vector<int> net;
  for (int p : scan) {
    auto row = m.row(p);
    bool far = std::all_of(net.begin(), net.end(), [&](int q) { return row[q] > r; });
    if (far) net.push_back(p);
  }
  return net;
}

// Nested 2^i-nets for every level i in [lowest, highest]. Identical consecutive
// levels share storage.
class NetLadder {
 public:
  NetLadder() = default;
  NetLadder(int lowest, std::vector<std::vector<int>> nets, std::size_t point_count)
      : lowest_(lowest), top_level_(point_count, lowest - 1) {
    for (auto& net : nets) {
      std::sort(net.begin(), net.end());
      if (sets_.empty() || sets_.back() != net) sets_.push_back(std::move(net));
      set_of_level_.push_back(static_cast<int>(sets_.size()) - 1);
    }
    for (int i = lowest_; i <= highest(); ++i)
      for (int p : net(i)) top_level_[p] = std::max(top_level_[p], i);
  }

  int lowest() const { return lowest_; }
  int highest() const { return lowest_ + static_cast<int>(set_of_level_.size()) - 1; }
  std::size_t level_count() const { return set_of_level_.size(); }
  std::size_t distinct_levels() const { return sets_.size(); }

  // Net at a level, ascending point ids.
  const std::vector<int>& net(int level) const { return sets_[set_of_level_[level - lowest_]]; }

  // Highest level whose net contains p; membership is p in net(i) iff i <= top_level(p).
  int top_level(int p) const { return top_level_[p]; }
  bool contains(int level, int p) const { return level >= lowest_ && level <= top_level_[p]; }

  // Maximal runs [first, last] of consecutive levels with identical nets.
  std::vector<std::pair<int, int>> identical_runs() const {
    std::vector<std::pair<int, int>> runs;
    for (std::size_t a = 0; a < set_of_level_.size();) {
      std::size_t b = a;
      while (b + 1 < set_of_level_.size() && set_of_level_[b + 1] == set_of_level_[a]) ++b;
      runs.emplace_back(lowest_ + static_cast<int>(a), lowest_ + static_cast<int>(b));
      a = b + 1;
    }
    return runs;
  }

 private:
  int lowest_ = 0;
  std::vector<int> set_of_level_;
  std::vector<std::vector<int>> sets_;
  std::vector<int> top_level_;
};

// Levels run from ceil(log2(eps * d_min)) to ceil(log2(d_max)); each net is seeded
// with the net one level up so the ladder is nested.
inline NetLadder build_ladder(const FiniteMetric& m, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(Errc::invalid_argument, "eps must lie in (0, 1)");
  const std::size_t n = m.size();
  if (n == 0) throw Error(Errc::invalid_argument, "empty metric");
  if (n == 1) return NetLadder(0, {{0}}, 1);
  const int lo = ceil_log2(eps * m.min_distance());
  const int hi = ceil_log2(m.max_distance());
  std::vector<std::vector<int>> nets(hi - lo + 1);
  std::vector<char> in_upper(n, 0);
  for (int i = hi; i >= lo; --i) {
    std::vector<int> order;
    order.reserve(n);
    if (i < hi)
      for (int p : nets[i + 1 - lo]) order.push_back(p);
    for (std::size_t p = 0; p < n; ++p)
      if (!in_upper[p]) order.push_back(static_cast<int>(p));
    nets[i - lo] = greedy_net(m, std::ldexp(1.0, i), order);
    std::fill(in_upper.begin(), in_upper.end(), 0);
    for (int p : nets[i - lo]) in_upper[p] = 1;
  }
  return NetLadder(lo, std::move(nets), n);
}

// Greedy class filling for one level: class 1 takes every point (in the given
// order) at distance >= separation from its members, then class 2 from the rest,
// and so on. `classes` holds inherited members per class (index 0 = class 1) and
// is extended in place; returns the class of each entry of `fresh`.
inline std::vector<int> greedy_class_fill(const FiniteMetric& m, std::span<const int> fresh, double separation,
                                          std::vector<std::vector<int>>& classes) {
  std::vector<int> assigned(fresh.size(), 0);
  std::size_t left = fresh.size();
  for (std::size_t j = 0; left > 0; ++j) {
    if (j == classes.size()) classes.emplace_back();
    auto& members = classes[j];
    for (std::size_t a = 0; a < fresh.size(); ++a) {
      if (assigned[a]) continue;
      auto row = m.row(fresh[a]);
      bool ok = std::all_of(members.begin(), members.end(), [&](int q) { return row[q] >= separation; });
      if (!ok) continue;
      members.push_back(fresh[a]);
      assigned[a] = static_cast<int>(j) + 1;
      --left;
    }
  }
  return assigned;
}

inline std::vector<int> greedy_class_fill(const FiniteMetric& m, std::span<const int> points, double separation) {
  std::vector<std::vector<int>> classes;
  return greedy_class_fill(m, points, separation, classes);
}

// Classes of net points such that same-class points of level i are at least
// 6/eps * 2^i apart. A point keeps its class at every level it belongs to, so
// one class per point suffices.
struct SubnetPartition {
  double eps = 0.0;
  int class_count = 0;        // t
  std::vector<int> class_of;  // 1-based class per point

  // Members of class j (1-based) in net(level), ascending.
  std::vector<int> members(const NetLadder& ladder, int level, int j) const {
    std::vector<int> out;
    for (int p : ladder.net(level))
      if (class_of[p] == j) out.push_back(p);
    return out;
  }
};

inline double class_separation(double eps, int level) { return 6.0 / eps * std::ldexp(1.0, level); }

inline SubnetPartition subnet_partition(const NetLadder& ladder, const FiniteMetric& m, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(Errc::invalid_argument, "eps must lie in (0, 1)");
  SubnetPartition out;
  out.eps = eps;
  out.class_of.assign(m.size(), 0);
  std::vector<std::vector<int>> classes;
  for (int i = ladder.highest(); i >= ladder.lowest(); --i) {
    std::vector<int> fresh;
    for (int p : ladder.net(i))
      if (ladder.top_level(p) == i) fresh.push_back(p);
    auto cls = greedy_class_fill(m, fresh, class_separation(eps, i), classes);
    for (std::size_t a = 0; a < fresh.size(); ++a) out.class_of[fresh[a]] = cls[a];
  }
  out.class_count = static_cast<int>(classes.size());
  return out;
}

}  // namespace treecover
