#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "treecover/common.hpp"
#include "treecover/metric.hpp"
#include "treecover/nets.hpp"
#include "treecover/random.hpp"
#include "treecover/tree.hpp"
#include "treecover/verify.hpp"

namespace treecover {

// Disjoint clusters covering every point, each of diameter at most `bound`.
// Clusters are numbered by their smallest member.
struct BoundedPartition {
  double bound = 0.0;
  std::vector<int> cluster_of;
  std::vector<int> centers;  // one member per cluster

  std::size_t size() const { return centers.size(); }

  std::vector<std::vector<int>> clusters() const {
    std::vector<std::vector<int>> out(centers.size());
    for (std::size_t x = 0; x < cluster_of.size(); ++x) out[cluster_of[x]].push_back(static_cast<int>(x));
    return out;
  }
};

// Renumbers arbitrary nonnegative labels by smallest member. `preferred[l]` is the
// wanted center of label l (used when it belongs to that label).
inline BoundedPartition canonical_partition(double bound, std::span<const int> labels, std::span<const int> preferred = {}) {
  BoundedPartition p;
  p.bound = bound;
  p.cluster_of.assign(labels.size(), -1);
  std::vector<int> renumber;
  for (std::size_t x = 0; x < labels.size(); ++x) {
    const int l = labels[x];
    if (l < 0) throw Error(Errc::invariant_violation, "partition leaves point " + std::to_string(x) + " unassigned");
    if (static_cast<std::size_t>(l) >= renumber.size()) renumber.resize(l + 1, -1);
    if (renumber[l] < 0) {
      renumber[l] = static_cast<int>(p.centers.size());
      p.centers.push_back(static_cast<int>(x));
    }
    p.cluster_of[x] = renumber[l];
  }
  for (std::size_t l = 0; l < preferred.size() && l < renumber.size(); ++l) {
    const int c = preferred[l];
    if (renumber[l] >= 0 && c >= 0 && static_cast<std::size_t>(c) < labels.size() && labels[c] == static_cast<int>(l))
      p.centers[renumber[l]] = c;
  }
  return p;
}

inline void check_partition(const FiniteMetric& m, const BoundedPartition& p) {
  auto fail = [](const std::string& why) { throw Error(Errc::invariant_violation, "bounded partition: " + why); };
  if (p.cluster_of.size() != m.size()) fail("point count mismatch");
  for (int c : p.cluster_of)
    if (c < 0 || static_cast<std::size_t>(c) >= p.size()) fail("bad cluster index");
  for (std::size_t c = 0; c < p.size(); ++c)
    if (p.cluster_of[p.centers[c]] != static_cast<int>(c)) fail("center outside its cluster");
  const auto clusters = p.clusters();
  for (const auto& cl : clusters) {
    if (cl.empty()) fail("empty cluster");
    for (std::size_t a = 0; a < cl.size(); ++a)
      for (std::size_t b = a + 1; b < cl.size(); ++b)
        if (!approx_leq(m(cl[a], cl[b]), p.bound))
          fail("cluster diameter " + std::to_string(m(cl[a], cl[b])) + " exceeds " + std::to_string(p.bound));
  }
}

// Nested partitions; level i is bounded by scales[i] = scales[0] / mu^i and
// parent[i][c] is the level i-1 cluster containing level i cluster c.
struct PartitionHierarchy {
  double mu = 2.0;
  std::vector<double> scales;
  std::vector<BoundedPartition> levels;
  std::vector<std::vector<int>> parent;

  std::size_t level_count() const { return levels.size(); }
};

inline PartitionHierarchy make_hierarchy(std::vector<BoundedPartition> levels, double mu = 2.0) {
  PartitionHierarchy h;
  h.mu = mu;
  h.levels = std::move(levels);
  h.parent.assign(h.levels.size(), {});
  for (std::size_t i = 0; i < h.levels.size(); ++i) {
    h.scales.push_back(h.levels[i].bound);
    if (i == 0) continue;
    h.parent[i].assign(h.levels[i].size(), -1);
    const auto& up = h.levels[i - 1].cluster_of;
    for (std::size_t x = 0; x < up.size(); ++x) {
      int& link = h.parent[i][h.levels[i].cluster_of[x]];
      if (link >= 0 && link != up[x])
        throw Error(Errc::invariant_violation, "level " + std::to_string(i) + " does not refine level " +
                                                   std::to_string(i - 1));
      link = up[x];
    }
  }
  return h;
}

inline void check_hierarchy(const FiniteMetric& m, const PartitionHierarchy& h) {
  for (std::size_t i = 0; i < h.levels.size(); ++i) {
    check_partition(m, h.levels[i]);
    if (i > 0 && !approx_leq(h.mu * h.scales[i], h.scales[i - 1]))
      throw Error(Errc::invariant_violation, "scale ratio below mu at level " + std::to_string(i));
    if (i == 0) continue;
    for (std::size_t x = 0; x < m.size(); ++x)
      if (h.parent[i][h.levels[i].cluster_of[x]] != h.levels[i - 1].cluster_of[x])
        throw Error(Errc::invariant_violation, "level " + std::to_string(i) + " does not refine level " +
                                                   std::to_string(i - 1));
  }
}

// Level i of the result: every nonempty intersection of a level i cluster with a
// level i-1 result cluster. Input is coarsest first.
inline PartitionHierarchy cut_hierarchy(const std::vector<BoundedPartition>& partitions) {
  std::vector<BoundedPartition> out;
  for (std::size_t i = 0; i < partitions.size(); ++i) {
    const auto& cur = partitions[i];
    if (i == 0) {
      out.push_back(cur);
      continue;
    }
    const auto& prev = out.back();
    const std::size_t n = cur.cluster_of.size();
    const std::size_t width = cur.size();
    std::vector<int> labels(n);
    for (std::size_t x = 0; x < n; ++x) labels[x] = prev.cluster_of[x] * static_cast<int>(width) + cur.cluster_of[x];
    // Keep the level's own center when it survives the cut.
    std::vector<int> preferred(prev.size() * width, -1);
    for (std::size_t c = 0; c < width; ++c) {
      const int z = cur.centers[c];
      preferred[prev.cluster_of[z] * width + c] = z;
    }
    out.push_back(canonical_partition(cur.bound, labels, preferred));
  }
  return make_hierarchy(std::move(out));
}

// Parameters of the padded family. The block padding constant and carving rate
// are calibrated; the remaining quantities follow from alpha and lambda.
struct PartitionParams {
  double alpha = 2.0;
  double lambda = 2.0;       // doubling constant of the input
  double c_prime = 0.0625;   // block padding: eta_block = c_prime / alpha
  double rate_factor = 2.0;  // carving radii rate = rate_factor * ln(lambda) / scale
  double size_factor = 1.0;  // multiplier on the family-size formula
  int block = 3;             // B
  int k = 1;                 // hierarchies per block family

  double log_lambda() const { return std::log(std::max(lambda, 2.0)); }
  double delta() const { return std::exp(-log_lambda() / (2.0 * alpha)); }
  double eta_of_delta(double d) const { return std::log(1.0 / d) / (64.0 * log_lambda()); }
  double c() const { return 1.0 + 1.0 / (std::ldexp(1.0, block - 1) - 1.0); }
  double eta_block() const { return c_prime / alpha; }
  double eta() const { return eta_block() / c() - std::ldexp(1.0, -block); }
  double rate(double scale) const { return rate_factor * log_lambda() / scale; }
};

inline PartitionParams make_partition_params(double alpha, double lambda, double c_prime = 0.0625,
                                             double rate_factor = 2.0, double size_factor = 1.0) {
  if (!(alpha >= 1.0)) throw Error(Errc::invalid_argument, "alpha must be at least 1");
  if (!(lambda >= 1.0)) throw Error(Errc::invalid_argument, "doubling constant must be at least 1");
  if (!(c_prime > 0.0) || !(rate_factor > 0.0) || !(size_factor > 0.0))
    throw Error(Errc::invalid_argument, "partition constants must be positive");
  PartitionParams p;
  p.alpha = alpha;
  p.lambda = lambda;
  p.c_prime = c_prime;
  p.rate_factor = rate_factor;
  p.size_factor = size_factor;
  // B = ceil(log2(2 alpha / c')), at least 3 so that eta_block / c exceeds 2^-B.
  p.block = std::max(3, ceil_log2(2.0 * alpha / c_prime));
  const double d = p.delta();
  if (!(d >= std::exp(-4096.0 * p.log_lambda()) && d <= 1.0))
    throw Error(Errc::invalid_argument, "delta outside the partition validity range");
  const double size = std::pow(std::max(lambda, 2.0), 1.0 / alpha) * p.log_lambda() *
                      (std::log(std::max(alpha, 2.0)) + p.block);
  p.k = std::max(1, static_cast<int>(std::ceil(size_factor * size)));
  return p;
}

namespace partition_detail {

inline double unit_draw(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

// Radius on [scale/4, scale/2] from a truncated exponential with the given rate.
inline double carving_radius(double u, double scale, double rate) {
  const double lo = scale / 4.0, span = scale / 4.0;
  const double mass = 1.0 - std::exp(-rate * span);
  if (mass < 1e-12) return lo + u * span;
  return lo - std::log1p(-u * mass) / rate;
}

// Ball carving: centers in increasing priority (ties by position) each take every
// unassigned point within its radius. Labels are center positions.
inline std::vector<int> carve(const FiniteMetric& m, std::span<const int> centers, std::span<const double> priority,
                              std::span<const double> radius) {
  std::vector<int> order(centers.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return priority[a] != priority[b] ? priority[a] < priority[b] : a < b;
  });
  std::vector<int> label(m.size(), -1);
  std::size_t left = m.size();
  for (int c : order) {
    const auto row = m.row(centers[c]);
    for (std::size_t x = 0; x < m.size() && left > 0; ++x)
      if (label[x] < 0 && row[x] <= radius[c]) {
        label[x] = c;
        --left;
      }
    if (left == 0) break;
  }
  return label;
}

inline BoundedPartition carve_partition(const FiniteMetric& m, double scale, std::span<const int> centers,
                                        std::span<const double> priority, std::span<const double> radius) {
  auto labels = carve(m, centers, priority, radius);
  return canonical_partition(scale, labels, centers);
}

}  // namespace partition_detail

// Random ball carving over a (scale/8)-net. Every point lies within scale/8 of a
// center and radii are at least scale/4, so the carving covers everything.
inline BoundedPartition padded_partition(const FiniteMetric& m, double scale, const PartitionParams& params, Rng& rng) {
  if (!(scale > 0.0)) throw Error(Errc::invalid_argument, "partition scale must be positive");
  const auto centers = greedy_net(m, scale / 8.0);
  std::vector<double> priority(centers.size()), radius(centers.size());
  for (std::size_t c = 0; c < centers.size(); ++c) {
    priority[c] = rng.uniform01();
    radius[c] = partition_detail::carving_radius(rng.uniform01(), scale, params.rate(scale));
  }
  return partition_detail::carve_partition(m, scale, centers, priority, radius);
}

// Largest r such that every ball B(x, r') with r' < r stays inside x's cluster:
// the distance from x to the nearest point of another cluster.
inline std::vector<double> padding_radii(const FiniteMetric& m, const BoundedPartition& p) {
  std::vector<double> out(m.size(), std::numeric_limits<double>::infinity());
  for (std::size_t x = 0; x < m.size(); ++x) {
    const auto row = m.row(x);
    for (std::size_t y = 0; y < m.size(); ++y)
      if (p.cluster_of[y] != p.cluster_of[x]) out[x] = std::min(out[x], row[y]);
  }
  return out;
}

// A family of hierarchies sharing one scale ladder, padded at eta: for every point x
// and level i some hierarchy keeps B(x, eta * scale_i) inside x's cluster.
struct PaddedFamily {
  std::vector<PartitionHierarchy> hierarchies;
  double eta = 0.0;
  std::vector<double> scales;
};

struct PaddingWitness {
  int point;
  int level;
};

inline std::vector<PaddingWitness> padding_failures(const FiniteMetric& m, const std::vector<PartitionHierarchy>& hs,
                                                    std::span<const double> scales, double eta) {
  const std::size_t n = m.size(), levels = scales.size();
  std::vector<char> padded(n * levels, 0);
  for (const auto& h : hs) {
    parallel_for(levels, [&](std::size_t i) {
      const auto radii = padding_radii(m, h.levels[i]);
      for (std::size_t x = 0; x < n; ++x)
        if (eta * scales[i] < radii[x]) padded[x * levels + i] = 1;
    });
  }
  std::vector<PaddingWitness> out;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t i = 0; i < levels; ++i)
      if (!padded[x * levels + i]) out.push_back({static_cast<int>(x), static_cast<int>(i)});
  return out;
}

inline std::vector<PaddingWitness> padding_failures(const FiniteMetric& m, const PaddedFamily& fam) {
  return padding_failures(m, fam.hierarchies, fam.scales, fam.eta);
}

class ResamplingError : public Error {
 public:
  ResamplingError(std::string what, std::vector<PaddingWitness> witnesses)
      : Error(Errc::resampling_failed, std::move(what)), witnesses_(std::move(witnesses)) {}
  const std::vector<PaddingWitness>& witnesses() const { return witnesses_; }

 private:
  std::vector<PaddingWitness> witnesses_;
};

struct BlockFamilyResult {
  PaddedFamily family;
  std::size_t net_size = 0;
  int rounds = 0;
  std::size_t resampled_events = 0;
  std::size_t initial_witnesses = 0;
};

// k cut hierarchies over the scales top / 2^l, l = 0..B, built by carving a net of
// radius eta_block * (top / 2^B) / 4 and handing every other point the cluster of
// its nearest net point. Net carving runs at scale - 2 * net radius so the extended
// clusters stay within scale. Each center's priority and radius at each level is
// an independent variable; whenever some (x, level) is unpadded in all k
// hierarchies the variables near x are redrawn until the family is padded.
inline BlockFamilyResult block_family(const FiniteMetric& m, double top, const PartitionParams& params,
                                      std::uint64_t seed) {
  if (!(top > 0.0)) throw Error(Errc::invalid_argument, "block scale must be positive");
  const int B = params.block;
  const int k = m.size() > 1 ? params.k : 1;
  const double eta_b = params.eta_block();
  const std::size_t n = m.size();
  const std::size_t levels = static_cast<std::size_t>(B) + 1;

  BlockFamilyResult res;
  res.family.eta = eta_b;
  for (std::size_t l = 0; l < levels; ++l) res.family.scales.push_back(std::ldexp(top, -static_cast<int>(l)));
  const auto& scales = res.family.scales;
  const double net_radius = eta_b * scales.back() / 4.0;

  const auto net = greedy_net(m, net_radius);
  res.net_size = net.size();
  const FiniteMetric on_net = m.restricted(net);
  std::vector<int> nearest(n, 0);
  for (std::size_t x = 0; x < n; ++x) {
    const auto row = m.row(x);
    for (std::size_t a = 1; a < net.size(); ++a)
      if (row[net[a]] < row[net[nearest[x]]]) nearest[x] = static_cast<int>(a);
  }

  // Centers per level, as positions in `net`.
  std::vector<double> carve_scale(levels);
  std::vector<std::vector<int>> centers(levels);
  for (std::size_t l = 0; l < levels; ++l) {
    carve_scale[l] = scales[l] - 2.0 * net_radius;
    centers[l] = greedy_net(on_net, carve_scale[l] / 8.0);
  }
  // version[j][l][c]: how many times the variable was redrawn.
  std::vector<std::vector<std::vector<std::uint32_t>>> version(k);
  for (auto& v : version) {
    v.resize(levels);
    for (std::size_t l = 0; l < levels; ++l) v[l].assign(centers[l].size(), 0);
  }

  auto build = [&](int j) {
    std::vector<BoundedPartition> parts;
    const std::uint64_t hs = derive_seed(seed, "hierarchy", static_cast<std::uint64_t>(j));
    for (std::size_t l = 0; l < levels; ++l) {
      const std::uint64_t ls = derive_seed(hs, "level", l);
      const std::size_t cc = centers[l].size();
      std::vector<double> priority(cc), radius(cc);
      for (std::size_t c = 0; c < cc; ++c) {
        const std::uint64_t bits = derive_seed(derive_seed(ls, "center", c), "version", version[j][l][c]);
        priority[c] = partition_detail::unit_draw(bits);
        radius[c] = partition_detail::carving_radius(partition_detail::unit_draw(splitmix64(bits)), carve_scale[l],
                                                     params.rate(carve_scale[l]));
      }
      const auto net_labels = partition_detail::carve(on_net, centers[l], priority, radius);
      std::vector<int> labels(n), preferred(cc);
      for (std::size_t x = 0; x < n; ++x) labels[x] = net_labels[nearest[x]];
      for (std::size_t c = 0; c < cc; ++c) preferred[c] = net[centers[l][c]];
      parts.push_back(canonical_partition(scales[l], labels, preferred));
    }
    return cut_hierarchy(parts);
  };

  auto& hs = res.family.hierarchies;
  hs.resize(k);
  parallel_for(static_cast<std::size_t>(k), [&](std::size_t j) { hs[j] = build(static_cast<int>(j)); });

  const std::size_t cap = 1000ULL * static_cast<std::size_t>(k) * static_cast<std::size_t>(B);
  for (;;) {
    auto failures = padding_failures(m, hs, scales, eta_b);
    if (res.rounds == 0) res.initial_witnesses = failures.size();
    if (failures.empty()) break;
    if (res.resampled_events + failures.size() > cap) {
      std::string what = "LLL resampling did not converge: " + std::to_string(failures.size()) +
                         " unpadded (point, level) pairs after " + std::to_string(res.rounds) + " rounds";
      throw ResamplingError(std::move(what), std::move(failures));
    }
    ++res.rounds;
    res.resampled_events += failures.size();
    // The event (x, l) depends on the carving at levels <= l of centers that can
    // reach the ball around x, in every hierarchy.
    std::vector<std::vector<char>> touched(levels);
    for (std::size_t l = 0; l < levels; ++l) touched[l].assign(centers[l].size(), 0);
    for (const auto& w : failures) {
      const auto row = m.row(w.point);
      const double ball = eta_b * scales[w.level];
      for (int l = 0; l <= w.level; ++l)
        for (std::size_t c = 0; c < centers[l].size(); ++c)
          if (row[net[centers[l][c]]] <= carve_scale[l] / 2.0 + ball + net_radius) touched[l][c] = 1;
    }
    for (int j = 0; j < k; ++j)
      for (std::size_t l = 0; l < levels; ++l)
        for (std::size_t c = 0; c < centers[l].size(); ++c) version[j][l][c] += touched[l][c];
    parallel_for(static_cast<std::size_t>(k), [&](std::size_t j) { hs[j] = build(static_cast<int>(j)); });
  }
  return res;
}

struct FamilyStats {
  int k = 0;
  int block = 0;
  double c = 0.0;
  double c_prime = 0.0;
  double eta_block = 0.0;
  double eta = 0.0;
  double lambda = 0.0;
  int levels = 0;
  int blocks = 0;
  int rounds = 0;
  std::size_t resampled_events = 0;
  std::size_t initial_witnesses = 0;
};

struct FamilyResult {
  PaddedFamily family;
  PartitionParams params;
  FamilyStats stats;
};

struct FamilyOptions {
  double c_prime = 0.0625;
  double rate_factor = 2.0;
  double size_factor = 1.0;
  double lambda = 0.0;  // 0: use the doubling-constant estimate
};

namespace partition_detail {

inline BoundedPartition singletons(std::size_t n, double bound) {
  std::vector<int> labels(n);
  std::iota(labels.begin(), labels.end(), 0);
  return canonical_partition(bound, labels);
}

// Each cluster of `coarse` becomes the union of the `fine` clusters whose center it
// contains.
inline BoundedPartition glue(const BoundedPartition& coarse, const BoundedPartition& fine, double bound) {
  std::vector<int> labels(fine.cluster_of.size());
  for (std::size_t x = 0; x < labels.size(); ++x)
    labels[x] = coarse.cluster_of[fine.centers[fine.cluster_of[x]]];
  return canonical_partition(bound, labels, coarse.centers);
}

inline BoundedPartition rebound(BoundedPartition p, double bound) {
  p.bound = bound;
  return p;
}

}  // namespace partition_detail

// Full-range family of 2k hierarchies on the ladder scale_i = top / 2^i, with top
// large enough that eta * top covers the diameter and the last level below the
// minimum distance. Collection h pads the scale blocks starting at (2l + h) B; a
// block family is built at scales shrunk by c and every cluster is then replaced by
// the union of the next padded block's top clusters whose centers it holds.
inline FamilyResult assemble_family(const FiniteMetric& m, double alpha, std::uint64_t seed,
                                    const FamilyOptions& opts = {}) {
  if (!(alpha >= 2.0)) throw Error(Errc::invalid_argument, "alpha must be at least 2");
  const std::size_t n = m.size();
  if (n == 0) throw Error(Errc::invalid_argument, "empty metric");
  FamilyResult res;
  const double lambda = opts.lambda > 0.0 ? opts.lambda : (n > 1 ? doubling_constant_estimate(m) : 1.0);
  res.params = make_partition_params(alpha, lambda, opts.c_prime, opts.rate_factor, opts.size_factor);
  const auto& params = res.params;
  const int B = params.block;
  const double c = params.c();
  const double eta = params.eta();
  auto& st = res.stats;
  st.k = params.k;
  st.block = B;
  st.c = c;
  st.c_prime = params.c_prime;
  st.eta_block = params.eta_block();
  st.eta = eta;
  st.lambda = lambda;
  res.family.eta = eta;

  if (n == 1) {
    res.family.scales = {1.0};
    res.family.hierarchies.push_back(make_hierarchy({partition_detail::singletons(1, 1.0)}));
    st.levels = 1;
    return res;
  }

  const double top = std::ldexp(1.0, ceil_log2(m.max_distance() / eta));
  int last = 0;
  while (!(std::ldexp(top, -last) < m.min_distance())) ++last;
  const int levels = last + 1;
  st.levels = levels;
  for (int i = 0; i < levels; ++i) res.family.scales.push_back(std::ldexp(top, -i));
  const auto& scales = res.family.scales;
  const int k = params.k;

  for (int h = 0; h < 2; ++h) {
    std::vector<int> starts;
    for (int a = h * B; a <= last; a += 2 * B) starts.push_back(a);
    std::vector<std::vector<BoundedPartition>> lv(k, std::vector<BoundedPartition>(levels));
    // Finest first; `below[j]` is the glued partition at level a + 2B.
    std::vector<BoundedPartition> below(k, partition_detail::singletons(n, 0.0));
    for (auto it = starts.rbegin(); it != starts.rend(); ++it) {
      const int a = *it;
      const std::uint64_t bs = derive_seed(derive_seed(seed, "collection", h), "block", a);
      auto bf = block_family(m, scales[a] / c, params, bs);
      ++st.blocks;
      st.rounds += bf.rounds;
      st.resampled_events += bf.resampled_events;
      st.initial_witnesses += bf.initial_witnesses;
      for (int j = 0; j < k; ++j) {
        const auto& hier = bf.family.hierarchies[j];
        for (int i = a + B + 1; i < std::min(a + 2 * B, levels); ++i)
          lv[j][i] = partition_detail::rebound(below[j], scales[i]);
        for (int l = 0; l <= B && a + l <= last; ++l)
          lv[j][a + l] = partition_detail::glue(hier.levels[l], below[j], scales[a + l]);
        below[j] = lv[j][a];
      }
    }
    // Above the first padded block of this collection: repeat its top partition.
    for (int j = 0; j < k; ++j) {
      for (int i = 0; i < starts.front(); ++i) lv[j][i] = partition_detail::rebound(below[j], scales[i]);
      res.family.hierarchies.push_back(make_hierarchy(std::move(lv[j])));
    }
  }
  for (const auto& h : res.family.hierarchies) check_hierarchy(m, h);
  return res;
}

// One HST per hierarchy: level i clusters are nodes labelled scale_i, singleton
// clusters are leaves; a root labelled 2 * scale_0 is added when level 0 is split.
inline HstTree hierarchy_hst(const PartitionHierarchy& h) {
  const std::size_t n = h.levels.front().cluster_of.size();
  std::vector<HstNode> nodes;
  std::vector<std::vector<std::vector<int>>> members(h.levels.size());
  for (std::size_t i = 0; i < h.levels.size(); ++i) members[i] = h.levels[i].clusters();
  std::vector<std::vector<std::vector<int>>> kids(h.levels.size());
  for (std::size_t i = 1; i < h.levels.size(); ++i) {
    kids[i - 1].assign(h.levels[i - 1].size(), {});
    for (std::size_t c = 0; c < h.levels[i].size(); ++c) kids[i - 1][h.parent[i][c]].push_back(static_cast<int>(c));
  }
  struct Task {
    std::size_t level;
    int cluster;
    int parent;
  };
  std::vector<Task> work;
  if (h.levels[0].size() > 1 || n == 1) {
    if (n > 1) nodes.push_back({-1, 2.0 * h.scales[0], -1});
    for (int c = static_cast<int>(h.levels[0].size()) - 1; c >= 0; --c) work.push_back({0, c, n > 1 ? 0 : -1});
  } else {
    work.push_back({0, 0, -1});
  }
  while (!work.empty()) {
    const Task t = work.back();
    work.pop_back();
    const auto& mem = members[t.level][t.cluster];
    const int id = static_cast<int>(nodes.size());
    if (mem.size() == 1) {
      nodes.push_back({t.parent, 0.0, mem.front()});
      continue;
    }
    if (t.level + 1 >= h.levels.size())
      throw Error(Errc::invariant_violation, "finest level still has a cluster of " + std::to_string(mem.size()));
    nodes.push_back({t.parent, h.scales[t.level], -1});
    const auto& ch = kids[t.level][t.cluster];
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) work.push_back({t.level + 1, *it, id});
  }
  return HstTree(n, std::move(nodes), h.mu);
}

inline TreeCover cover_from_family(const PaddedFamily& fam, const FiniteMetric& m) {
  TreeCover cover;
  cover.kind = CoverKind::plain;
  const double mu = fam.hierarchies.empty() ? 2.0 : fam.hierarchies.front().mu;
  cover.claimed_distortion = mu / fam.eta;
  std::vector<TreeEmbedding> trees(fam.hierarchies.size());
  parallel_for(trees.size(), [&](std::size_t j) {
    if (fam.hierarchies[j].levels.front().cluster_of.size() != m.size())
      throw Error(Errc::cover_mismatch, "cover/metric mismatch: hierarchy size differs from the metric");
    trees[j] = hst_to_tree(hierarchy_hst(fam.hierarchies[j]));
  });
  cover.trees = std::move(trees);
  return cover;
}

}  // namespace treecover
