#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ehrlab {

using Vertex = std::uint32_t;
using Edge = std::pair<Vertex, Vertex>;

// Graph distance with an explicit infinite value for disconnected pairs.
class Distance {
 public:
  constexpr explicit Distance(std::size_t value) : value_(value), finite_(true) {}
  static constexpr Distance infinite() { return Distance(); }

  constexpr bool is_finite() const { return finite_; }
  std::size_t value() const;

  // Finite distance compared against a bound; infinite is never within.
  constexpr bool within(std::size_t bound) const { return finite_ && value_ <= bound; }

  constexpr bool operator==(const Distance& other) const {
    return finite_ == other.finite_ && (!finite_ || value_ == other.value_);
  }
  constexpr std::strong_ordering operator<=>(const Distance& other) const {
    if (finite_ != other.finite_) return finite_ ? std::strong_ordering::less : std::strong_ordering::greater;
    if (!finite_) return std::strong_ordering::equal;
    return value_ <=> other.value_;
  }

 private:
  constexpr Distance() : value_(0), finite_(false) {}
  std::size_t value_;
  bool finite_;
};

// Immutable simple undirected graph on vertices 0..n-1, adjacency in CSR form
// with sorted neighbour lists.
class Graph {
 public:
  Graph() = default;
  explicit Graph(std::size_t n);
  // Throws InvalidGraph on self-loops, duplicate edges or out-of-range endpoints.
  Graph(std::size_t n, std::span<const Edge> edges);

  std::size_t vertex_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const { return adjacency_.size() / 2; }
  std::span<const Vertex> neighbors(Vertex v) const {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  std::size_t degree(Vertex v) const { return offsets_[v + 1] - offsets_[v]; }
  bool adjacent(Vertex u, Vertex v) const;
  bool contains(Vertex v) const { return v < vertex_count(); }

  // Edges with u < v, lexicographically sorted.
  std::vector<Edge> edges() const;

  // Image of the graph under the vertex map v -> perm[v].
  Graph relabeled(std::span<const Vertex> perm) const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.offsets_ == b.offsets_ && a.adjacency_ == b.adjacency_;
  }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<Vertex> adjacency_;
};

// Accumulates vertices and edges; build() validates.
class GraphBuilder {
 public:
  Vertex add_vertex() { return static_cast<Vertex>(n_++); }
  Vertex add_vertices(std::size_t count) {
    Vertex first = static_cast<Vertex>(n_);
    n_ += count;
    return first;
  }
  void add_edge(Vertex u, Vertex v) { edges_.emplace_back(u, v); }
  // Appends a disjoint copy of g; returns the offset of its vertex 0.
  Vertex add_graph(const Graph& g);
  std::size_t vertex_count() const { return n_; }
  Graph build() const { return Graph(n_, edges_); }

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
};

enum class ComponentKind { Tree, Unicyclic, Complex };

const char* to_string(ComponentKind kind);

struct Component {
  std::vector<Vertex> vertices;  // sorted
  ComponentKind kind = ComponentKind::Tree;
  std::size_t edge_count = 0;
  std::vector<Vertex> cycle;  // consecutive cycle vertices; empty unless Unicyclic
};

struct Decomposition {
  std::vector<Component> components;          // ordered by smallest vertex
  std::vector<std::uint32_t> component_of;    // vertex -> index into components
};

std::vector<Component> decompose(const Graph& g);
Decomposition decompose_indexed(const Graph& g);

// Rooted tree over a subset of graph vertices. Vertices are stored in BFS
// order, so the children of each node form a contiguous run and every prefix
// closed under depth is a truncation.
class RootedTreeView {
 public:
  // parent[i] is the parent of vertex i (ignored for the root, conventionally -1).
  static RootedTreeView from_parent_array(std::span<const int> parent);
  // Whole connected component of root as a tree; NotTreelike if it has a cycle.
  static RootedTreeView from_component(const Graph& g, Vertex root);
  // BFS tree rooted at root over vertices in 'allowed' (if non-null), truncated at max_depth.
  static RootedTreeView bfs(const Graph& g, Vertex root, std::size_t max_depth,
                            const std::vector<bool>* allowed = nullptr);

  Vertex root() const { return order_.front(); }
  std::size_t size() const { return order_.size(); }
  std::span<const Vertex> vertices() const { return order_; }
  bool contains(Vertex v) const { return index_.count(v) != 0; }
  std::size_t index_of(Vertex v) const;
  Vertex vertex_at(std::size_t i) const { return order_[i]; }

  std::optional<Vertex> parent(Vertex v) const;
  std::size_t depth(Vertex v) const { return depth_[index_of(v)]; }
  std::size_t depth_at(std::size_t i) const { return depth_[i]; }
  std::int64_t parent_index(std::size_t i) const { return parent_[i]; }
  std::span<const Vertex> children(Vertex v) const;
  std::pair<std::size_t, std::size_t> child_range(std::size_t i) const {
    return {child_begin_[i], child_end_[i]};
  }
  std::size_t height() const { return depth_.empty() ? 0 : depth_.back(); }

  // Ancestor of v at the given depth (<= depth(v)).
  Vertex ancestor_at_depth(Vertex v, std::size_t d) const;
  bool is_descendant(Vertex v, Vertex ancestor) const;
  // Tree distance between two vertices of the view.
  std::size_t distance(Vertex a, Vertex b) const;

 private:
  friend RootedTreeView truncate(const RootedTreeView& t, std::size_t n);
  RootedTreeView() = default;
  void finish();  // builds index_ and child ranges from order_/parent_/depth_

  std::vector<Vertex> order_;
  std::vector<std::int64_t> parent_;  // local indices, -1 for root
  std::vector<std::size_t> depth_;
  std::vector<std::size_t> child_begin_, child_end_;
  std::unordered_map<Vertex, std::uint32_t> index_;
};

RootedTreeView truncate(const RootedTreeView& t, std::size_t n);

// BFS tree of radius r around u; NotTreelike if the ball contains a cycle.
RootedTreeView rooted_ball(const Graph& g, Vertex u, std::size_t r);

class UnicyclicView {
 public:
  std::size_t cycle_length() const { return cycle_.size(); }
  std::span<const Vertex> cycle() const { return cycle_; }
  const RootedTreeView& hanging_tree(std::size_t i) const { return hanging_[i]; }
  std::size_t position_of(Vertex v) const;  // index of an(v) on the cycle
  Vertex cycle_ancestor(Vertex v) const { return cycle_[position_of(v)]; }
  std::size_t depth(Vertex v) const { return hanging_[position_of(v)].depth(v); }
  bool contains(Vertex v) const { return position_.count(v) != 0; }
  bool is_cycle_vertex(Vertex v) const;
  std::size_t max_depth() const;
  std::size_t vertex_count() const { return position_.size(); }

 private:
  friend UnicyclicView unicyclic_view(const Graph& g, const Component& comp);
  std::vector<Vertex> cycle_;
  std::vector<RootedTreeView> hanging_;
  std::unordered_map<Vertex, std::uint32_t> position_;
};

// NotUnicyclic if comp.kind differs.
UnicyclicView unicyclic_view(const Graph& g, const Component& comp);

Distance distance(const Graph& g, Vertex u, Vertex v);
// Distances from source to every vertex (infinite outside its component).
std::vector<Distance> bfs_distances(const Graph& g, Vertex source);

}  // namespace ehrlab
