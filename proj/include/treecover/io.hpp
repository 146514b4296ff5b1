#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "treecover/common.hpp"
#include "treecover/metric.hpp"
#include "treecover/tree.hpp"
#include "treecover/verify.hpp"

namespace treecover {

// Shortest decimal form that reads back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace io_detail {

// Whitespace tokens with their line numbers; '#' starts a comment.
class Tokens {
 public:
  Tokens(std::istream& in, std::string source) : source_(std::move(source)) {
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
      ++number;
      if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
      std::istringstream ls(line);
      std::string tok;
      while (ls >> tok) toks_.push_back({tok, number});
    }
  }

  bool done() const { return pos_ >= toks_.size(); }
  int line() const { return pos_ < toks_.size() ? toks_[pos_].line : (toks_.empty() ? 0 : toks_.back().line); }

  // Number of tokens on the first non-empty line.
  std::size_t header_width() const {
    if (toks_.empty()) return 0;
    std::size_t w = 0;
    while (w < toks_.size() && toks_[w].line == toks_[0].line) ++w;
    return w;
  }

  [[noreturn]] void fail(const std::string& why) const {
    throw Error(Errc::parse_error, "parse error: " + source_ + ": line " + std::to_string(line()) + ": " + why);
  }

  const std::string& word() {
    if (done()) fail("unexpected end of input");
    return toks_[pos_++].text;
  }

  long long integer() {
    const std::string& t = word();
    long long v = 0;
    auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
      --pos_;
      fail("expected an integer, got '" + t + "'");
    }
    return v;
  }

  std::size_t count() {
    long long v = integer();
    if (v < 0) {
      --pos_;
      fail("expected a nonnegative count");
    }
    return static_cast<std::size_t>(v);
  }

  double real() {
    const std::string& t = word();
    double v = 0;
    auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size() || !std::isfinite(v)) {
      --pos_;
      fail("expected a finite number, got '" + t + "'");
    }
    return v;
  }

  void expect_end() {
    if (!done()) fail("trailing data '" + toks_[pos_].text + "'");
  }

 private:
  struct Tok {
    std::string text;
    int line;
  };
  std::string source_;
  std::vector<Tok> toks_;
  std::size_t pos_ = 0;
};

inline void check_cap(std::size_t n, std::size_t cap) {
  if (n > cap) throw Error(Errc::size_cap, "size cap exceeded: " + std::to_string(n) + " > " + std::to_string(cap));
}

inline std::ifstream open_in(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw Error(Errc::parse_error, "cannot open " + p.string());
  return in;
}

inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw Error(Errc::invalid_argument, "cannot write " + p.string());
  return out;
}

}  // namespace io_detail

// ---- metric: "n" then n rows of n reals ----

inline FiniteMetric parse_metric(io_detail::Tokens& tk, std::size_t cap) {
  const std::size_t n = tk.count();
  io_detail::check_cap(n, cap);
  std::vector<double> d(n * n);
  for (double& v : d) v = tk.real();
  tk.expect_end();
  return FiniteMetric(n, std::move(d));
}

inline FiniteMetric read_metric(std::istream& in, std::size_t cap = 20000, const std::string& source = "<metric>") {
  io_detail::Tokens tk(in, source);
  return parse_metric(tk, cap);
}

inline void write_metric(std::ostream& out, const FiniteMetric& m) {
  const std::size_t n = m.size();
  out << n << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out << (j ? " " : "") << format_double(m(i, j));
    out << '\n';
  }
}

// ---- graph: "n m" then m lines "u v w" ----

inline WeightedGraph parse_graph(io_detail::Tokens& tk, std::size_t cap) {
  const std::size_t n = tk.count();
  io_detail::check_cap(n, cap);
  const std::size_t m = tk.count();
  std::vector<Edge> edges;
  edges.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    Edge e;
    e.u = static_cast<int>(tk.integer());
    e.v = static_cast<int>(tk.integer());
    e.w = tk.real();
    edges.push_back(e);
  }
  tk.expect_end();
  return WeightedGraph(n, std::move(edges));
}

inline WeightedGraph read_graph(std::istream& in, std::size_t cap = 20000, const std::string& source = "<graph>") {
  io_detail::Tokens tk(in, source);
  return parse_graph(tk, cap);
}

inline void write_graph(std::ostream& out, const WeightedGraph& g) {
  out << g.size() << ' ' << g.edges().size() << '\n';
  for (const Edge& e : g.edges()) out << e.u << ' ' << e.v << ' ' << format_double(e.w) << '\n';
}

// A metric file has a one-number header, a graph file a two-number header.
enum class InputKind { metric, graph };

struct LoadedInput {
  InputKind kind = InputKind::metric;
  FiniteMetric metric;
  std::optional<WeightedGraph> graph;
};

inline LoadedInput load_input(const std::filesystem::path& path, std::size_t cap = 20000,
                              std::optional<InputKind> forced = std::nullopt) {
  auto in = io_detail::open_in(path);
  io_detail::Tokens tk(in, path.string());
  InputKind kind;
  if (forced) {
    kind = *forced;
  } else {
    const std::size_t w = tk.header_width();
    if (w == 1) {
      kind = InputKind::metric;
    } else if (w == 2) {
      kind = InputKind::graph;
    } else {
      tk.fail("cannot tell metric from graph: header has " + std::to_string(w) + " fields");
    }
  }
  LoadedInput out;
  out.kind = kind;
  if (kind == InputKind::metric) {
    out.metric = parse_metric(tk, cap);
  } else {
    out.graph = parse_graph(tk, cap);
    out.metric = metric_from_graph(*out.graph);
  }
  return out;
}

// ---- tree: "nodes edges", node lines "id point p" / "id steiner", edge lines "u v w" ----

inline TreeEmbedding parse_tree(io_detail::Tokens& tk, std::size_t points) {
  const std::size_t nodes = tk.count();
  const std::size_t m = tk.count();
  std::vector<int> point_of_node(nodes, -2);
  for (std::size_t i = 0; i < nodes; ++i) {
    const std::size_t id = tk.count();
    if (id >= nodes || point_of_node[id] != -2) tk.fail("bad or repeated node id " + std::to_string(id));
    const std::string kind = tk.word();
    if (kind == "point") {
      point_of_node[id] = static_cast<int>(tk.integer());
    } else if (kind == "steiner") {
      point_of_node[id] = -1;
    } else {
      tk.fail("node kind must be point or steiner, got '" + kind + "'");
    }
  }
  std::vector<Edge> edges;
  edges.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    Edge e;
    e.u = static_cast<int>(tk.integer());
    e.v = static_cast<int>(tk.integer());
    e.w = tk.real();
    edges.push_back(e);
  }
  std::vector<char> seen(points, 0);
  for (int p : point_of_node)
    if (p >= 0 && static_cast<std::size_t>(p) < points) seen[p] = 1;
  for (std::size_t p = 0; p < points; ++p)
    if (!seen[p])
      throw Error(Errc::cover_mismatch, "cover/metric mismatch: tree has no node for point " + std::to_string(p));
  return TreeEmbedding(points, std::move(point_of_node), std::move(edges));
}

inline TreeEmbedding read_tree(std::istream& in, std::size_t points, const std::string& source = "<tree>") {
  io_detail::Tokens tk(in, source);
  auto t = parse_tree(tk, points);
  tk.expect_end();
  return t;
}

inline void write_tree(std::ostream& out, const TreeEmbedding& t) {
  out << t.node_count() << ' ' << t.edges().size() << '\n';
  for (std::size_t v = 0; v < t.node_count(); ++v) {
    if (t.is_steiner(v)) {
      out << v << " steiner\n";
    } else {
      out << v << " point " << t.point_of_node(v) << '\n';
    }
  }
  for (const Edge& e : t.edges()) out << e.u << ' ' << e.v << ' ' << format_double(e.w) << '\n';
}

// ---- cover directory: cover.txt manifest plus tree_<i>.txt ----
//   kind plain|ramsey
//   points n
//   trees k
//   claimed <real>|inf
//   home h_0 ... h_{n-1}      (ramsey only)

inline void write_cover(const std::filesystem::path& dir, const TreeCover& cover) {
  std::filesystem::create_directories(dir);
  const std::size_t n = cover.trees.empty() ? 0 : cover.trees[0].point_count();
  {
    auto out = io_detail::open_out(dir / "cover.txt");
    out << "kind " << (cover.kind == CoverKind::ramsey ? "ramsey" : "plain") << '\n';
    out << "points " << n << '\n';
    out << "trees " << cover.trees.size() << '\n';
    out << "claimed "
        << (std::isfinite(cover.claimed_distortion) ? format_double(cover.claimed_distortion) : std::string("inf"))
        << '\n';
    if (cover.kind == CoverKind::ramsey) {
      out << "home";
      for (int h : cover.home_tree) out << ' ' << h;
      out << '\n';
    }
  }
  for (std::size_t i = 0; i < cover.trees.size(); ++i) {
    auto out = io_detail::open_out(dir / ("tree_" + std::to_string(i) + ".txt"));
    write_tree(out, cover.trees[i]);
  }
}

// With `expect_points`, a manifest for a different point count is a mismatch.
inline TreeCover read_cover(const std::filesystem::path& dir, std::optional<std::size_t> expect_points = std::nullopt) {
  const auto manifest = dir / "cover.txt";
  auto in = io_detail::open_in(manifest);
  io_detail::Tokens tk(in, manifest.string());
  auto key = [&](const char* want) {
    const std::string k = tk.word();
    if (k != want) tk.fail(std::string("expected '") + want + "', got '" + k + "'");
  };
  TreeCover cover;
  key("kind");
  const std::string kind = tk.word();
  if (kind == "ramsey") {
    cover.kind = CoverKind::ramsey;
  } else if (kind != "plain") {
    tk.fail("cover kind must be plain or ramsey");
  }
  key("points");
  const std::size_t n = tk.count();
  if (expect_points && *expect_points != n)
    throw Error(Errc::cover_mismatch, "cover/metric mismatch: cover has " + std::to_string(n) + " points, metric has " +
                                          std::to_string(*expect_points));
  key("trees");
  const std::size_t k = tk.count();
  key("claimed");
  const std::string claimed = tk.word();
  if (claimed == "inf") {
    cover.claimed_distortion = std::numeric_limits<double>::infinity();
  } else {
    double v = 0;
    auto res = std::from_chars(claimed.data(), claimed.data() + claimed.size(), v);
    if (res.ec != std::errc{} || res.ptr != claimed.data() + claimed.size()) tk.fail("bad claimed distortion");
    cover.claimed_distortion = v;
  }
  if (cover.kind == CoverKind::ramsey) {
    key("home");
    cover.home_tree.resize(n);
    for (int& h : cover.home_tree) h = static_cast<int>(tk.integer());
  }
  tk.expect_end();
  for (std::size_t i = 0; i < k; ++i) {
    const auto p = dir / ("tree_" + std::to_string(i) + ".txt");
    auto tin = io_detail::open_in(p);
    cover.trees.push_back(read_tree(tin, n, p.string()));
  }
  return cover;
}

// ---- reports ----

inline nlohmann::ordered_json report_to_json(const DistortionReport& rep) {
  using nlohmann::ordered_json;
  auto num = [](double v) -> ordered_json { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); };
  ordered_json j;
  j["num_points"] = rep.num_points;
  j["num_trees"] = rep.num_trees;
  j["kind"] = rep.kind == CoverKind::ramsey ? "ramsey" : "plain";
  j["plain_distortion"] = num(rep.plain_distortion);
  if (rep.ramsey_distortion) j["ramsey_distortion"] = num(*rep.ramsey_distortion);
  if (rep.declared_home_distortion) j["declared_home_distortion"] = num(*rep.declared_home_distortion);
  j["domination_ok"] = rep.domination_ok;
  j["domination_violations"] = rep.domination_violation_count;
  j["claimed_distortion"] = num(rep.claimed_distortion);
  j["claimed_met"] = rep.claimed_met;
  ordered_json worst = ordered_json::array();
  for (const auto& p : rep.worst_pairs)
    worst.push_back({{"x", p.x}, {"y", p.y}, {"distortion", num(p.distortion)}, {"tree", p.tree}});
  j["worst_pairs"] = std::move(worst);
  return j;
}

// Equal-width bins on [1, max]; one "low,high,count" row per bin.
inline std::string distortion_histogram_csv(const std::vector<double>& values, int bins = 20) {
  if (bins < 1) throw Error(Errc::invalid_argument, "histogram needs at least one bin");
  double hi = 1.0;
  for (double v : values)
    if (std::isfinite(v)) hi = std::max(hi, v);
  const double width = hi > 1.0 ? (hi - 1.0) / bins : 1.0;
  std::vector<std::size_t> count(bins, 0);
  std::size_t infinite = 0;
  for (double v : values) {
    if (!std::isfinite(v)) {
      ++infinite;
      continue;
    }
    int b = static_cast<int>((v - 1.0) / width);
    count[std::clamp(b, 0, bins - 1)]++;
  }
  std::string out = "low,high,count\n";
  for (int b = 0; b < bins; ++b)
    out += format_double(1.0 + b * width) + "," + format_double(b + 1 == bins ? std::max(hi, 1.0 + width) : 1.0 + (b + 1) * width) +
           "," + std::to_string(count[b]) + "\n";
  if (infinite) out += "inf,inf," + std::to_string(infinite) + "\n";
  return out;
}

}  // namespace treecover
