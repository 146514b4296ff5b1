#pragma once

#include <vector>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/boyer_myrvold_planar_test.hpp>
#include <boost/graph/make_biconnected_planar.hpp>
#include <boost/graph/planar_face_traversal.hpp>
#include <boost/property_map/property_map.hpp>

#include "treecover/common.hpp"
#include "treecover/metric.hpp"

namespace treecover {

namespace planar_detail {

using Graph = boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS,
                                    boost::property<boost::vertex_index_t, int>,
                                    boost::property<boost::edge_index_t, int>>;
using EdgeDesc = boost::graph_traits<Graph>::edge_descriptor;
using EmbeddingStorage = std::vector<std::vector<EdgeDesc>>;
using Embedding = boost::iterator_property_map<EmbeddingStorage::iterator,
                                               boost::property_map<Graph, boost::vertex_index_t>::type>;

inline Graph to_boost(const WeightedGraph& g) {
  Graph bg(g.size());
  for (const Edge& e : g.edges()) boost::add_edge(e.u, e.v, bg);
  return bg;
}

inline void reindex_edges(Graph& bg) {
  int i = 0;
  auto index = boost::get(boost::edge_index, bg);
  for (auto [it, end] = boost::edges(bg); it != end; ++it) boost::put(index, *it, i++);
}

inline bool embed(Graph& bg, EmbeddingStorage& storage) {
  reindex_edges(bg);
  storage.assign(boost::num_vertices(bg), {});
  Embedding emb(storage.begin(), boost::get(boost::vertex_index, bg));
  return boost::boyer_myrvold_planarity_test(boost::boyer_myrvold_params::graph = bg,
                                             boost::boyer_myrvold_params::embedding = emb);
}

struct FaceCollector : public boost::planar_face_traversal_visitor {
  std::vector<std::vector<int>>* faces = nullptr;
  void begin_face() { faces->emplace_back(); }
  template <class Vertex>
  void next_vertex(Vertex v) {
    faces->back().push_back(static_cast<int>(v));
  }
};

}  // namespace planar_detail

inline bool is_planar(const WeightedGraph& g) {
  auto bg = planar_detail::to_boost(g);
  planar_detail::EmbeddingStorage storage;
  return planar_detail::embed(bg, storage);
}

// Face boundaries of a planar embedding of g after augmenting it to be
// biconnected (augmenting edges are planar and only used for face shapes).
// Requires a connected graph with at least 3 vertices.
inline std::vector<std::vector<int>> planar_faces(const WeightedGraph& g) {
  using namespace planar_detail;
  auto bg = to_boost(g);
  EmbeddingStorage storage;
  if (!embed(bg, storage)) throw Error(Errc::non_planar, "non-planar input");
  std::vector<std::vector<int>> faces;
  if (g.size() < 3) return faces;
  Embedding emb(storage.begin(), boost::get(boost::vertex_index, bg));
  boost::make_biconnected_planar(bg, emb);
  if (!embed(bg, storage)) throw Error(Errc::non_planar, "non-planar input");
  Embedding emb2(storage.begin(), boost::get(boost::vertex_index, bg));
  FaceCollector visitor;
  visitor.faces = &faces;
  boost::planar_face_traversal(bg, emb2, visitor);
  return faces;
}

}  // namespace treecover
