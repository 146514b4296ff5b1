#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "treecover/doubling_cover.hpp"
#include "treecover/gadgets.hpp"
#include "treecover/io.hpp"
#include "treecover/partition.hpp"
#include "treecover/ramsey_cover.hpp"
#include "treecover/separator_cover.hpp"
#include "treecover/verify.hpp"

namespace treecover::app {

inline constexpr const char* tool_version = "0.1.0";
inline constexpr int report_schema = 1;

// Exit statuses.
inline constexpr int exit_ok = 0;
inline constexpr int exit_failed = 1;  // verification gate or hard assertion
inline constexpr int exit_usage = 2;   // bad flags, unreadable or malformed input

using Json = nlohmann::ordered_json;

struct RunConfig {
  std::string command;
  std::string input;
  std::string format = "auto";
  std::string out;
  std::string cover_dir;
  std::string report_path;
  std::string histogram_path;
  double eps = 0.25;
  double alpha = 2.0;
  double C = 4.0;
  double beta = 0.5;
  int k = 2;
  std::size_t N = 8;
  std::uint64_t seed = 1;
  std::size_t size_cap = default_size_cap;
  unsigned threads = 0;
  int retries = 5;

  // Only what the command reads, so equal configs give equal reports.
  Json to_json() const {
    Json j;
    j["command"] = command;
    auto has = [&](std::initializer_list<const char*> cmds) {
      for (const char* c : cmds)
        if (command == c) return true;
      return false;
    };
    if (!input.empty()) {
      j["input"] = input;
      j["format"] = format;
    }
    if (!out.empty()) j["out"] = out;
    if (!cover_dir.empty()) j["cover"] = cover_dir;
    if (has({"cover doubling", "cover planar"})) j["eps"] = eps;
    if (has({"cover planar"})) {
      j["C"] = C;
      j["retries"] = retries;
    }
    if (has({"cover hpf"})) j["alpha"] = alpha;
    if (has({"cover ramsey", "gen composition", "gen recursive-cycle"})) j["k"] = k;
    if (has({"gen cycle", "gen composition", "gen recursive-cycle"})) j["N"] = N;
    if (has({"gen composition"})) j["beta"] = beta;
    if (has({"cover planar", "cover hpf", "cover ramsey"})) j["seed"] = seed;
    j["size_cap"] = size_cap;
    return j;
  }
};

namespace detail {

inline Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline std::optional<InputKind> forced_kind(const RunConfig& c) {
  if (c.format == "metric") return InputKind::metric;
  if (c.format == "graph") return InputKind::graph;
  return std::nullopt;
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw Error(Errc::invalid_argument, "cannot write " + p.string());
  out << text;
}

inline int exit_code_for(Errc code) {
  switch (code) {
    case Errc::parse_error:
    case Errc::invalid_argument:
    case Errc::size_cap:
    case Errc::disconnected:
    case Errc::non_planar:
    case Errc::invalid_metric:
    case Errc::invalid_graph:
    case Errc::degenerate_metric:
      return exit_usage;
    default:
      return exit_failed;
  }
}

inline const char* errc_name(Errc code) {
  switch (code) {
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::disconnected: return "disconnected";
    case Errc::degenerate_metric: return "degenerate_metric";
    case Errc::invalid_metric: return "invalid_metric";
    case Errc::invalid_graph: return "invalid_graph";
    case Errc::unmapped_point: return "unmapped_point";
    case Errc::cover_mismatch: return "cover_mismatch";
    case Errc::invalid_hst: return "invalid_hst";
    case Errc::invalid_tree: return "invalid_tree";
    case Errc::non_planar: return "non_planar";
    case Errc::invalid_separator_path: return "invalid_separator_path";
    case Errc::recursion_depth: return "recursion_depth";
    case Errc::resampling_failed: return "resampling_failed";
    case Errc::ramsey_extraction_failed: return "ramsey_extraction_failed";
    case Errc::size_cap: return "size_cap";
    case Errc::invariant_violation: return "invariant_violation";
    case Errc::parse_error: return "parse_error";
  }
  return "unknown";
}

// Verifies, writes the optional histogram, and records the verification in the report.
inline bool attach_verification(const RunConfig& c, const TreeCover& cover, const FiniteMetric& m, Json& report) {
  VerifyOptions vo;
  vo.keep_pair_distortions = !c.histogram_path.empty();
  const auto rep = verify_cover(cover, m, vo);
  report["verification"] = report_to_json(rep);
  if (!c.histogram_path.empty()) write_text(c.histogram_path, distortion_histogram_csv(rep.pair_distortions));
  return rep.passed();
}

inline Json cover_summary(const TreeCover& cover) {
  Json j;
  j["kind"] = cover.kind == CoverKind::ramsey ? "ramsey" : "plain";
  j["num_trees"] = cover.trees.size();
  j["claimed_distortion"] = number(cover.claimed_distortion);
  return j;
}

inline bool run_gen(const RunConfig& c, const std::string& what, Json& report) {
  std::ostringstream text;
  Json result;
  if (what == "cycle") {
    auto m = cycle_metric(c.N);
    write_metric(text, m);
    result["points"] = m.size();
    result["diameter"] = m.max_distance();
  } else if (what == "composition") {
    auto m = composition_power(c.N, c.k, c.beta, c.size_cap);
    write_metric(text, m);
    result["points"] = m.size();
    result["diameter"] = m.max_distance();
  } else {
    auto g = recursive_cycle_graph(c.N, c.k, c.size_cap);
    write_graph(text, g.graph);
    result["vertices"] = g.graph.size();
    result["edges"] = g.graph.edges().size();
    result["inner_points"] = g.inner.size();
    result["s"] = g.s;
    result["t"] = g.t;
  }
  write_text(c.out, text.str());
  report["result"] = std::move(result);
  return true;
}

inline bool run_cover(const RunConfig& c, const std::string& algo, Json& report) {
  const auto in = load_input(c.input, c.size_cap, forced_kind(c));
  const FiniteMetric& m = in.metric;
  Json result;
  TreeCover cover;
  if (algo == "doubling") {
    auto r = build_doubling_cover(m, c.eps);
    cover = std::move(r.cover);
    result["eps_internal"] = r.stats.eps_internal;
    result["rescale"] = r.stats.rescale;
    result["escalations"] = r.stats.escalations;
    result["classes"] = r.stats.classes;
    result["residues"] = r.stats.residues;
    result["levels"] = r.stats.distinct_levels;
    Json idx = Json::array();
    for (auto [j, p] : r.tree_index) idx.push_back({j, p});
    result["tree_index"] = std::move(idx);
  } else if (algo == "planar") {
    if (!in.graph) throw Error(Errc::invalid_argument, "cover planar needs a graph input");
    SeparatorCoverOptions so;
    so.max_retries = c.retries;
    auto r = build_separator_cover(*in.graph, c.eps, c.C, c.seed, so);
    cover = std::move(r.cover);
    result["retries"] = r.retries;
    result["depth"] = r.depth;
    result["paths_per_level"] = r.paths_per_level;
    result["pieces_per_level"] = r.pieces_per_level;
    result["copies_per_path"] = r.copies_per_path;
    result["max_landmarks"] = r.max_landmarks;
    result["crossing_pairs_checked"] = r.crossing_pairs_checked;
  } else if (algo == "hpf") {
    auto r = assemble_family(m, c.alpha, c.seed);
    const auto failures = padding_failures(m, r.family);
    cover = cover_from_family(r.family, m);
    result["k"] = r.stats.k;
    result["B"] = r.stats.block;
    result["c"] = r.stats.c;
    result["c_prime"] = r.stats.c_prime;
    result["eta"] = r.stats.eta;
    result["lambda"] = r.stats.lambda;
    result["levels"] = r.stats.levels;
    result["blocks"] = r.stats.blocks;
    result["resampling_rounds"] = r.stats.rounds;
    result["resampled_events"] = r.stats.resampled_events;
    result["initial_witnesses"] = r.stats.initial_witnesses;
    result["final_witnesses"] = failures.size();
    if (!failures.empty()) throw Error(Errc::invariant_violation, "padding check failed after assembly");
  } else {
    auto r = build_ramsey_cover(m, c.k, c.seed);
    cover = std::move(r.cover);
    result["alpha"] = r.alpha;
    Json steps = Json::array();
    for (const auto& s : r.steps)
      steps.push_back({{"S", s.survivors}, {"Z", s.extracted}, {"alpha_actual", number(s.alpha_actual)},
                       {"threshold", s.threshold}, {"attempt", s.attempt}});
    result["steps"] = std::move(steps);
    result["last_set_size"] = r.last_set_size;
    result["last_set_distortion"] = r.last_set_distortion;
  }
  result["cover"] = cover_summary(cover);
  report["result"] = std::move(result);
  const bool ok = attach_verification(c, cover, m, report);
  write_cover(c.out, cover);
  return ok;
}

inline bool run_verify(const RunConfig& c, Json& report) {
  const auto in = load_input(c.input, c.size_cap, forced_kind(c));
  const auto cover = read_cover(c.cover_dir, in.metric.size());
  report["result"] = cover_summary(cover);
  return attach_verification(c, cover, in.metric, report);
}

inline bool run_stats(const RunConfig& c, Json& report) {
  const auto in = load_input(c.input, c.size_cap, forced_kind(c));
  const auto& m = in.metric;
  Json result;
  result["kind"] = in.kind == InputKind::graph ? "graph" : "metric";
  result["points"] = m.size();
  if (in.graph) result["edges"] = in.graph->edges().size();
  result["min_distance"] = m.min_distance();
  result["max_distance"] = m.max_distance();
  result["aspect_ratio"] = m.size() < 2 ? Json(nullptr) : Json(aspect_ratio(m));
  result["doubling_estimate"] = m.size() < 2 ? 1 : doubling_constant_estimate(m);
  if (m.size() <= 16) result["doubling_exact"] = doubling_constant_exact(m);
  result["triangle_violations"] = m.size() <= 300 ? Json(triangle_violations(m)) : Json(nullptr);
  report["result"] = std::move(result);
  return true;
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  RunConfig c;
  CLI::App app{"Tree covers of finite metrics: builders, gadgets and an exhaustive verifier"};
  app.require_subcommand(1);
  app.add_option("--threads", c.threads, "worker cap (0 = all cores)");
  app.add_option("--size-cap", c.size_cap, "largest accepted point or vertex count");
  app.set_version_flag("--version", tool_version);

  auto add_input = [&](CLI::App* s) {
    s->add_option("--input", c.input, "metric or graph text file")->required()->check(CLI::ExistingFile);
    s->add_option("--format", c.format, "input format")->check(CLI::IsMember({"auto", "metric", "graph"}));
  };
  auto add_hist = [&](CLI::App* s) {
    s->add_option("--histogram", c.histogram_path, "CSV histogram of per-pair distortions");
  };

  auto* gen = app.add_subcommand("gen", "write a gadget metric or graph");
  gen->require_subcommand(1);
  std::string gen_what;
  for (const char* name : {"cycle", "composition", "recursive-cycle"}) {
    auto* s = gen->add_subcommand(name);
    s->add_option("--n,-N", c.N, "cycle size N")->required();
    if (std::string(name) != "cycle") s->add_option("--k", c.k, "depth")->required();
    if (std::string(name) == "composition") s->add_option("--beta", c.beta, "composition beta");
    s->add_option("--out", c.out, "output file")->required();
    s->callback([&, name] { gen_what = name; });
  }

  auto* cover = app.add_subcommand("cover", "build and verify a tree cover");
  cover->require_subcommand(1);
  std::string algo;
  for (const char* name : {"doubling", "planar", "hpf", "ramsey"}) {
    auto* s = cover->add_subcommand(name);
    add_input(s);
    s->add_option("--out", c.out, "output directory")->required();
    add_hist(s);
    const std::string n = name;
    if (n == "doubling" || n == "planar") s->add_option("--eps", c.eps, "target stretch 1 + eps")->required();
    if (n == "planar") {
      s->add_option("--C", c.C, "copies factor");
      s->add_option("--retries", c.retries, "seeded rebuilds after a failed verification");
    }
    if (n == "hpf") s->add_option("--alpha", c.alpha, "partition parameter (>= 2)")->required();
    if (n == "ramsey") s->add_option("--k", c.k, "number of trees")->required();
    if (n != "doubling") s->add_option("--seed", c.seed, "random seed")->required();
    s->callback([&, n] { algo = n; });
  }

  auto* verify = app.add_subcommand("verify", "re-verify a cover directory against a metric");
  verify->add_option("--cover", c.cover_dir, "cover directory")->required()->check(CLI::ExistingDirectory);
  add_input(verify);
  verify->add_option("--report", c.report_path, "report file (default: <cover>/verify.json)");
  add_hist(verify);

  auto* stats = app.add_subcommand("stats", "aspect ratio and doubling estimate");
  add_input(stats);
  stats->add_option("--report", c.report_path, "also write the report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_usage;
  }

  if (gen->parsed()) c.command = "gen " + gen_what;
  if (cover->parsed()) c.command = "cover " + algo;
  if (verify->parsed()) c.command = "verify";
  if (stats->parsed()) c.command = "stats";
  set_thread_count(c.threads);

  std::string report_file = c.report_path;
  if (cover->parsed()) report_file = (std::filesystem::path(c.out) / "report.json").string();
  if (verify->parsed() && report_file.empty()) report_file = (std::filesystem::path(c.cover_dir) / "verify.json").string();

  Json report;
  report["schema"] = report_schema;
  report["tool"] = "treecover";
  report["version"] = tool_version;
  report["config"] = c.to_json();
  int status = exit_ok;
  try {
    bool ok = true;
    if (gen->parsed()) ok = detail::run_gen(c, gen_what, report);
    if (cover->parsed()) ok = detail::run_cover(c, algo, report);
    if (verify->parsed()) ok = detail::run_verify(c, report);
    if (stats->parsed()) ok = detail::run_stats(c, report);
    report["ok"] = ok;
    if (!ok) {
      status = exit_failed;
      err << "error: verification failed\n";
    }
  } catch (const Error& e) {
    report["ok"] = false;
    report["error"] = {{"code", detail::errc_name(e.code())}, {"message", e.what()}};
    if (const auto* re = dynamic_cast<const ResamplingError*>(&e)) report["error"]["witnesses"] = re->witnesses().size();
    err << "error: " << e.what() << '\n';
    status = detail::exit_code_for(e.code());
  } catch (const std::exception& e) {
    report["ok"] = false;
    report["error"] = {{"code", "internal"}, {"message", e.what()}};
    err << "error: " << e.what() << '\n';
    status = exit_failed;
  }

  const std::string text = report.dump(2) + "\n";
  out << text;
  if (!report_file.empty()) {
    try {
      detail::write_text(report_file, text);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      if (status == exit_ok) status = exit_failed;
    }
  }
  return status;
}

}  // namespace treecover::app
