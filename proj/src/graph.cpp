#include "ehrlab/graph.hpp"

#include <algorithm>
#include <deque>
#include <string>

#include "ehrlab/error.hpp"

namespace ehrlab {

std::size_t Distance::value() const {
  if (!finite_) throw InvalidArgument("value() of infinite distance");
  return value_;
}

Graph::Graph(std::size_t n) : offsets_(n + 1, 0) {}

Graph::Graph(std::size_t n, std::span<const Edge> edges) : offsets_(n + 1, 0) {
  for (auto [u, v] : edges) {
    if (u >= n || v >= n)
      throw InvalidGraph("edge (" + std::to_string(u) + "," + std::to_string(v) +
                         ") out of range for n=" + std::to_string(n));
    if (u == v) throw InvalidGraph("self-loop at vertex " + std::to_string(u));
    ++offsets_[u + 1];
    ++offsets_[v + 1];
  }
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
  adjacency_.resize(offsets_[n]);
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (auto [u, v] : edges) {
    adjacency_[fill[u]++] = v;
    adjacency_[fill[v]++] = u;
  }
  for (std::size_t v = 0; v < n; ++v) {
    auto first = adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[v]);
    auto last = adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[v + 1]);
    std::sort(first, last);
    auto dup = std::adjacent_find(first, last);
    if (dup != last)
      throw InvalidGraph("duplicate edge (" + std::to_string(v) + "," + std::to_string(*dup) + ")");
  }
}

bool Graph::adjacent(Vertex u, Vertex v) const {
  if (degree(u) > degree(v)) std::swap(u, v);
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count());
  for (Vertex u = 0; u < vertex_count(); ++u)
    for (Vertex v : neighbors(u))
      if (u < v) out.emplace_back(u, v);
  return out;
}

Graph Graph::relabeled(std::span<const Vertex> perm) const {
  if (perm.size() != vertex_count()) throw InvalidArgument("permutation size mismatch");
  std::vector<Edge> mapped;
  mapped.reserve(edge_count());
  for (auto [u, v] : edges()) mapped.emplace_back(perm[u], perm[v]);
  return Graph(vertex_count(), mapped);
}

Vertex GraphBuilder::add_graph(const Graph& g) {
  Vertex base = add_vertices(g.vertex_count());
  for (auto [u, v] : g.edges()) add_edge(base + u, base + v);
  return base;
}

const char* to_string(ComponentKind kind) {
  switch (kind) {
    case ComponentKind::Tree: return "tree";
    case ComponentKind::Unicyclic: return "unicyclic";
    case ComponentKind::Complex: return "complex";
  }
  return "?";
}

namespace {

// Cycle of a unicyclic component: peel leaves, then walk the remaining 2-core.
std::vector<Vertex> extract_cycle(const Graph& g, const std::vector<Vertex>& vertices) {
  std::unordered_map<Vertex, std::size_t> deg;
  std::vector<Vertex> stack;
  for (Vertex v : vertices) {
    deg[v] = g.degree(v);
    if (g.degree(v) <= 1) stack.push_back(v);
  }
  while (!stack.empty()) {
    Vertex v = stack.back();
    stack.pop_back();
    if (deg[v] == 0) continue;
    deg[v] = 0;
    for (Vertex w : g.neighbors(v))
      if (deg[w] > 0 && --deg[w] == 1) stack.push_back(w);
  }
  Vertex start = 0;
  bool found = false;
  for (Vertex v : vertices)
    if (deg[v] >= 2) { start = v; found = true; break; }
  if (!found) return {};
  std::vector<Vertex> cycle{start};
  Vertex prev = start, cur = start;
  // First step goes to the smaller core neighbour for determinism.
  for (Vertex w : g.neighbors(start))
    if (deg[w] >= 2) { cur = w; break; }
  while (cur != start) {
    cycle.push_back(cur);
    Vertex next = cur;
    for (Vertex w : g.neighbors(cur))
      if (deg[w] >= 2 && w != prev) { next = w; break; }
    prev = cur;
    cur = next;
  }
  return cycle;
}

}  // namespace

Decomposition decompose_indexed(const Graph& g) {
  const std::size_t n = g.vertex_count();
  constexpr std::uint32_t kUnset = ~std::uint32_t{0};
  Decomposition d;
  d.component_of.assign(n, kUnset);
  std::vector<Vertex> queue;
  for (Vertex s = 0; s < n; ++s) {
    if (d.component_of[s] != kUnset) continue;
    auto id = static_cast<std::uint32_t>(d.components.size());
    Component comp;
    queue.assign(1, s);
    d.component_of[s] = id;
    std::size_t degree_sum = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      Vertex v = queue[head];
      degree_sum += g.degree(v);
      for (Vertex w : g.neighbors(v))
        if (d.component_of[w] == kUnset) {
          d.component_of[w] = id;
          queue.push_back(w);
        }
    }
    comp.vertices = queue;
    std::sort(comp.vertices.begin(), comp.vertices.end());
    comp.edge_count = degree_sum / 2;
    const std::size_t nv = comp.vertices.size();
    if (comp.edge_count + 1 == nv) {
      comp.kind = ComponentKind::Tree;
    } else if (comp.edge_count == nv) {
      comp.kind = ComponentKind::Unicyclic;
      comp.cycle = extract_cycle(g, comp.vertices);
    } else {
      comp.kind = ComponentKind::Complex;
    }
    d.components.push_back(std::move(comp));
  }
  return d;
}

std::vector<Component> decompose(const Graph& g) { return decompose_indexed(g).components; }

// --- RootedTreeView -------------------------------------------------------

void RootedTreeView::finish() {
  const std::size_t n = order_.size();
  index_.clear();
  index_.reserve(n * 2);
  for (std::size_t i = 0; i < n; ++i) index_.emplace(order_[i], static_cast<std::uint32_t>(i));
  child_begin_.assign(n, 0);
  child_end_.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) child_begin_[i] = child_end_[i] = n;
  for (std::size_t i = 1; i < n; ++i) {
    auto p = static_cast<std::size_t>(parent_[i]);
    if (child_begin_[p] == n) child_begin_[p] = i;
    child_end_[p] = i + 1;
  }
  for (std::size_t i = 0; i < n; ++i)
    if (child_begin_[i] == n) child_begin_[i] = child_end_[i] = n;
}

RootedTreeView RootedTreeView::from_parent_array(std::span<const int> parent) {
  const std::size_t n = parent.size();
  if (n == 0) throw InvalidArgument("empty parent array");
  std::vector<std::vector<Vertex>> kids(n);
  int root = -1;
  for (std::size_t i = 0; i < n; ++i) {
    if (parent[i] < 0) {
      if (root >= 0) throw InvalidArgument("parent array has two roots");
      root = static_cast<int>(i);
    } else {
      if (static_cast<std::size_t>(parent[i]) >= n) throw InvalidArgument("parent out of range");
      kids[static_cast<std::size_t>(parent[i])].push_back(static_cast<Vertex>(i));
    }
  }
  if (root < 0) throw InvalidArgument("parent array has no root");
  RootedTreeView t;
  t.order_.push_back(static_cast<Vertex>(root));
  t.parent_.push_back(-1);
  t.depth_.push_back(0);
  for (std::size_t head = 0; head < t.order_.size(); ++head) {
    for (Vertex c : kids[t.order_[head]]) {
      t.order_.push_back(c);
      t.parent_.push_back(static_cast<std::int64_t>(head));
      t.depth_.push_back(t.depth_[head] + 1);
    }
  }
  if (t.order_.size() != n) throw InvalidArgument("parent array is not a tree");
  t.finish();
  return t;
}

RootedTreeView RootedTreeView::bfs(const Graph& g, Vertex root, std::size_t max_depth,
                                   const std::vector<bool>* allowed) {
  if (!g.contains(root)) throw InvalidArgument("root out of range");
  RootedTreeView t;
  t.order_.push_back(root);
  t.parent_.push_back(-1);
  t.depth_.push_back(0);
  std::unordered_map<Vertex, std::uint32_t> seen{{root, 0}};
  for (std::size_t head = 0; head < t.order_.size(); ++head) {
    Vertex v = t.order_[head];
    const bool expand = t.depth_[head] < max_depth;
    const Vertex par = t.parent_[head] < 0 ? v : t.order_[static_cast<std::size_t>(t.parent_[head])];
    for (Vertex w : g.neighbors(v)) {
      if (allowed && !(*allowed)[w]) continue;
      if (w == par && t.parent_[head] >= 0) continue;
      auto it = seen.find(w);
      if (it != seen.end()) {
        // An edge to an already placed vertex other than the parent closes a cycle.
        throw NotTreelike("cycle within radius " + std::to_string(max_depth) + " of vertex " +
                          std::to_string(root));
      }
      if (!expand) continue;
      seen.emplace(w, static_cast<std::uint32_t>(t.order_.size()));
      t.order_.push_back(w);
      t.parent_.push_back(static_cast<std::int64_t>(head));
      t.depth_.push_back(t.depth_[head] + 1);
    }
  }
  t.finish();
  return t;
}

RootedTreeView RootedTreeView::from_component(const Graph& g, Vertex root) {
  return bfs(g, root, g.vertex_count());
}

std::size_t RootedTreeView::index_of(Vertex v) const {
  auto it = index_.find(v);
  if (it == index_.end()) throw InvalidArgument("vertex " + std::to_string(v) + " not in tree");
  return it->second;
}

std::optional<Vertex> RootedTreeView::parent(Vertex v) const {
  auto p = parent_[index_of(v)];
  if (p < 0) return std::nullopt;
  return order_[static_cast<std::size_t>(p)];
}

std::span<const Vertex> RootedTreeView::children(Vertex v) const {
  auto i = index_of(v);
  return {order_.data() + child_begin_[i], order_.data() + child_end_[i]};
}

Vertex RootedTreeView::ancestor_at_depth(Vertex v, std::size_t d) const {
  std::size_t i = index_of(v);
  if (d > depth_[i]) throw InvalidArgument("ancestor depth exceeds vertex depth");
  while (depth_[i] > d) i = static_cast<std::size_t>(parent_[i]);
  return order_[i];
}

bool RootedTreeView::is_descendant(Vertex v, Vertex ancestor) const {
  std::size_t i = index_of(v);
  std::size_t a = index_of(ancestor);
  if (depth_[i] < depth_[a]) return false;
  while (depth_[i] > depth_[a]) i = static_cast<std::size_t>(parent_[i]);
  return i == a;
}

std::size_t RootedTreeView::distance(Vertex a, Vertex b) const {
  std::size_t i = index_of(a), j = index_of(b), steps = 0;
  while (depth_[i] > depth_[j]) { i = static_cast<std::size_t>(parent_[i]); ++steps; }
  while (depth_[j] > depth_[i]) { j = static_cast<std::size_t>(parent_[j]); ++steps; }
  while (i != j) {
    i = static_cast<std::size_t>(parent_[i]);
    j = static_cast<std::size_t>(parent_[j]);
    steps += 2;
  }
  return steps;
}

RootedTreeView truncate(const RootedTreeView& t, std::size_t n) {
  std::size_t keep = 0;
  while (keep < t.order_.size() && t.depth_[keep] <= n) ++keep;
  RootedTreeView out;
  out.order_.assign(t.order_.begin(), t.order_.begin() + static_cast<std::ptrdiff_t>(keep));
  out.parent_.assign(t.parent_.begin(), t.parent_.begin() + static_cast<std::ptrdiff_t>(keep));
  out.depth_.assign(t.depth_.begin(), t.depth_.begin() + static_cast<std::ptrdiff_t>(keep));
  out.finish();
  return out;
}

RootedTreeView rooted_ball(const Graph& g, Vertex u, std::size_t r) {
  return RootedTreeView::bfs(g, u, r);
}

// --- UnicyclicView --------------------------------------------------------

std::size_t UnicyclicView::position_of(Vertex v) const {
  auto it = position_.find(v);
  if (it == position_.end()) throw InvalidArgument("vertex " + std::to_string(v) + " not in component");
  return it->second;
}

bool UnicyclicView::is_cycle_vertex(Vertex v) const {
  auto it = position_.find(v);
  return it != position_.end() && cycle_[it->second] == v;
}

std::size_t UnicyclicView::max_depth() const {
  std::size_t h = 0;
  for (const auto& t : hanging_) h = std::max(h, t.height());
  return h;
}

UnicyclicView unicyclic_view(const Graph& g, const Component& comp) {
  if (comp.kind != ComponentKind::Unicyclic)
    throw NotUnicyclic(std::string("component is ") + to_string(comp.kind));
  UnicyclicView view;
  view.cycle_ = comp.cycle;
  std::vector<bool> allowed(g.vertex_count(), false);
  for (Vertex v : comp.vertices) allowed[v] = true;
  for (Vertex c : comp.cycle) allowed[c] = false;
  for (std::size_t i = 0; i < comp.cycle.size(); ++i) {
    Vertex c = comp.cycle[i];
    allowed[c] = true;
    view.hanging_.push_back(RootedTreeView::bfs(g, c, g.vertex_count(), &allowed));
    allowed[c] = false;
    for (Vertex v : view.hanging_.back().vertices())
      view.position_.emplace(v, static_cast<std::uint32_t>(i));
  }
  return view;
}

// --- distances ------------------------------------------------------------

std::vector<Distance> bfs_distances(const Graph& g, Vertex source) {
  std::vector<Distance> dist(g.vertex_count(), Distance::infinite());
  std::vector<Vertex> queue{source};
  dist[source] = Distance(0);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    Vertex v = queue[head];
    std::size_t dv = dist[v].value();
    for (Vertex w : g.neighbors(v))
      if (!dist[w].is_finite()) {
        dist[w] = Distance(dv + 1);
        queue.push_back(w);
      }
  }
  return dist;
}

Distance distance(const Graph& g, Vertex u, Vertex v) {
  if (u == v) return Distance(0);
  std::unordered_map<Vertex, std::size_t> seen{{u, 0}};
  std::vector<Vertex> queue{u};
  for (std::size_t head = 0; head < queue.size(); ++head) {
    Vertex x = queue[head];
    std::size_t dx = seen[x];
    for (Vertex w : g.neighbors(x)) {
      if (seen.count(w)) continue;
      if (w == v) return Distance(dx + 1);
      seen.emplace(w, dx + 1);
      queue.push_back(w);
    }
  }
  return Distance::infinite();
}

}  // namespace ehrlab
