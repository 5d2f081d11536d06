#pragma once

#include <vector>

#include "ehrlab/graph.hpp"
#include "oracles/oracles.hpp"

namespace testing_support {

inline ehrlab::Graph to_graph(int n, const oracle::EdgeList& edges) {
  std::vector<ehrlab::Edge> e;
  for (auto [u, v] : edges) e.emplace_back(static_cast<ehrlab::Vertex>(u), static_cast<ehrlab::Vertex>(v));
  return ehrlab::Graph(static_cast<std::size_t>(n), e);
}

inline ehrlab::Graph cycle_graph(int s) {
  oracle::EdgeList e;
  for (int i = 0; i < s; ++i) e.emplace_back(i, (i + 1) % s);
  return to_graph(s, e);
}

inline ehrlab::Graph path_graph(int n) {
  oracle::EdgeList e;
  for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return to_graph(n, e);
}

inline ehrlab::Graph complete_graph(int n) {
  oracle::EdgeList e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return to_graph(n, e);
}

inline ehrlab::Graph star_graph(int leaves) {
  oracle::EdgeList e;
  for (int i = 1; i <= leaves; ++i) e.emplace_back(0, i);
  return to_graph(leaves + 1, e);
}

inline ehrlab::Graph tree_from_parents(const std::vector<int>& parent) {
  oracle::EdgeList e;
  for (std::size_t i = 1; i < parent.size(); ++i) e.emplace_back(parent[i], static_cast<int>(i));
  return to_graph(static_cast<int>(parent.size()), e);
}

}  // namespace testing_support
