#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "support/instances.hpp"
#include "treecover/doubling_cover.hpp"
#include "treecover/io.hpp"
#include "treecover/ramsey_cover.hpp"

using namespace treecover;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("treecover_io_test_" + name);
  fs::remove_all(p);
  return p;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST(FormatDouble, RoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.678, 2.0})
    EXPECT_EQ(std::stod(format_double(v)), v);
  EXPECT_EQ(format_double(2.0), "2");
}

TEST(MetricText, RoundTripIsExact) {
  Rng rng(1);
  auto m = testkit::random_small_metric(9, rng);
  std::stringstream ss;
  write_metric(ss, m);
  auto back = read_metric(ss);
  EXPECT_EQ(back.data(), m.data());
}

TEST(MetricText, ParsesCommentsAndFreeLayout) {
  std::istringstream in("# three points\n3\n0 1 2\n1 0 1  2 1 0\n");
  auto m = read_metric(in);
  EXPECT_EQ(m.size(), 3u);
  EXPECT_EQ(m(2, 0), 2.0);
}

TEST(MetricText, Errors) {
  auto code = [](const std::string& text) {
    std::istringstream in(text);
    try {
      read_metric(in, 10);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::invariant_violation;  // no error at all
  };
  EXPECT_EQ(code("2\n0 1\n1\n"), Errc::parse_error);
  EXPECT_EQ(code("2\n0 1\n1 x\n"), Errc::parse_error);
  EXPECT_EQ(code("2\n0 1\n1 0 7\n"), Errc::parse_error);
  EXPECT_EQ(code("2\n0 1\n2 0\n"), Errc::invalid_metric);
  EXPECT_EQ(code("11\n"), Errc::size_cap);
  std::istringstream in("2\n0 1\nq 0\n");
  try {
    read_metric(in, 10, "m.txt");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("m.txt: line 3"), std::string::npos) << e.what();
  }
}

TEST(GraphText, RoundTrip) {
  auto g = testkit::grid_graph(3, 4);
  std::stringstream ss;
  write_graph(ss, g);
  auto back = read_graph(ss);
  ASSERT_EQ(back.size(), g.size());
  ASSERT_EQ(back.edges().size(), g.edges().size());
  for (std::size_t i = 0; i < g.edges().size(); ++i) {
    EXPECT_EQ(back.edges()[i].u, g.edges()[i].u);
    EXPECT_EQ(back.edges()[i].v, g.edges()[i].v);
    EXPECT_EQ(back.edges()[i].w, g.edges()[i].w);
  }
}

TEST(LoadInput, DetectsKindFromHeader) {
  auto dir = scratch("detect");
  fs::create_directories(dir);
  write_file(dir / "m.txt", "3\n0 1 1\n1 0 1\n1 1 0\n");
  write_file(dir / "g.txt", "3 2\n0 1 2\n1 2 3\n");
  write_file(dir / "bad.txt", "3 2 1\n");
  auto m = load_input(dir / "m.txt");
  EXPECT_EQ(m.kind, InputKind::metric);
  EXPECT_FALSE(m.graph);
  auto g = load_input(dir / "g.txt");
  EXPECT_EQ(g.kind, InputKind::graph);
  ASSERT_TRUE(g.graph);
  EXPECT_EQ(g.metric(0, 2), 5.0);
  EXPECT_THROW(load_input(dir / "bad.txt"), Error);
  EXPECT_THROW(load_input(dir / "missing.txt"), Error);
  write_file(dir / "split.txt", "3 1\n0 1 1\n");
  try {
    load_input(dir / "split.txt");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::disconnected);
  }
  fs::remove_all(dir);
}

TEST(TreeText, RoundTripKeepsDistances) {
  auto m = testkit::uniform_metric(5, 2.0);
  auto t = hst_to_tree(hst_from_ultrametric(m));
  std::stringstream ss;
  write_tree(ss, t);
  auto back = read_tree(ss, 5);
  EXPECT_EQ(back.node_count(), t.node_count());
  for (int x = 0; x < 5; ++x) EXPECT_EQ(back.distances_from(x), t.distances_from(x));
}

TEST(TreeText, MissingPointIsAMismatch) {
  std::istringstream in("2 1\n0 point 0\n1 steiner\n0 1 1\n");
  try {
    read_tree(in, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::cover_mismatch);
    EXPECT_NE(std::string(e.what()).find("cover/metric mismatch"), std::string::npos);
  }
  std::istringstream bad("1 0\n0 leaf 0\n");
  EXPECT_THROW(read_tree(bad, 1), Error);
}

TEST(CoverDirectory, PlainRoundTripVerifiesIdentically) {
  auto m = testkit::line_metric(16);
  auto built = build_doubling_cover(m, 0.25);
  auto dir = scratch("plain");
  write_cover(dir, built.cover);
  auto back = read_cover(dir, m.size());
  auto a = verify_cover(built.cover, m);
  auto b = verify_cover(back, m);
  EXPECT_EQ(a.plain_distortion, b.plain_distortion);
  EXPECT_EQ(back.claimed_distortion, built.cover.claimed_distortion);
  EXPECT_THROW(read_cover(dir, 15), Error);
  fs::remove_all(dir);
}

TEST(CoverDirectory, RamseyKeepsHomeTrees) {
  Rng rng(3);
  auto m = testkit::random_graph_metric(20, rng);
  auto built = build_ramsey_cover(m, 2, 4);
  auto dir = scratch("ramsey");
  write_cover(dir, built.cover);
  auto back = read_cover(dir);
  EXPECT_EQ(back.kind, CoverKind::ramsey);
  EXPECT_EQ(back.home_tree, built.cover.home_tree);
  EXPECT_EQ(*verify_cover(back, m).ramsey_distortion, *built.report.ramsey_distortion);
  fs::remove_all(dir);
}

TEST(ReportJson, FieldsAndOrder) {
  auto m = testkit::line_metric(4);
  TreeCover cover;
  cover.trees.push_back(TreeEmbedding::on_points(4, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}}));
  auto j = report_to_json(verify_cover(cover, m));
  EXPECT_EQ(j["plain_distortion"], 1.0);
  EXPECT_EQ(j["domination_ok"], true);
  EXPECT_EQ(j["num_trees"], 1);
  EXPECT_FALSE(j.contains("ramsey_distortion"));
  EXPECT_TRUE(j["worst_pairs"].is_array());
  EXPECT_EQ(j.begin().key(), "num_points");
}

TEST(Histogram, CountsEveryValue) {
  auto csv = distortion_histogram_csv({1.0, 1.0, 2.0, 3.0}, 2);
  EXPECT_EQ(csv, "low,high,count\n1,2,2\n2,3,2\n");
  EXPECT_EQ(distortion_histogram_csv({1.0}, 1), "low,high,count\n1,2,1\n");
  EXPECT_THROW(distortion_histogram_csv({}, 0), Error);
}
