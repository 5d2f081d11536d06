#include "ehrlab/theory.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>

#include "ehrlab/error.hpp"

namespace ehrlab {

namespace {

constexpr long kNeg = std::numeric_limits<long>::min() / 4;
constexpr std::size_t kSubsetBudget = 2'000'000;

// Best edges-minus-vertices over induced subsets of each size 0..cap.
std::vector<long> complex_profile(const Graph& g, const Component& comp, std::size_t cap) {
  const std::size_t n = comp.vertices.size();
  cap = std::min(cap, n);
  std::vector<long> best(cap + 1, kNeg);
  best[0] = 0;
  std::unordered_map<Vertex, std::uint32_t> local;
  for (std::size_t i = 0; i < n; ++i) local[comp.vertices[i]] = static_cast<std::uint32_t>(i);
  std::vector<std::vector<std::uint32_t>> adj(n);
  for (std::size_t i = 0; i < n; ++i)
    for (Vertex w : g.neighbors(comp.vertices[i])) adj[i].push_back(local.at(w));

  if (n <= 20) {
    std::vector<std::uint32_t> mask_adj(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (auto j : adj[i]) mask_adj[i] |= 1u << j;
    std::vector<std::uint16_t> edges(std::size_t{1} << n, 0);
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
      int low = __builtin_ctz(mask);
      std::uint32_t rest = mask & (mask - 1);
      edges[mask] = static_cast<std::uint16_t>(edges[rest] + __builtin_popcount(mask_adj[low] & rest));
      auto size = static_cast<std::size_t>(__builtin_popcount(mask));
      if (size <= cap) best[size] = std::max(best[size], static_cast<long>(edges[mask]) - static_cast<long>(size));
    }
    return best;
  }

  double subsets = 0, binom = 1;
  for (std::size_t t = 1; t <= cap && subsets <= kSubsetBudget; ++t) {
    binom = binom * static_cast<double>(n - t + 1) / static_cast<double>(t);
    subsets += binom;
  }
  if (subsets <= kSubsetBudget) {
    std::vector<bool> chosen(n, false);
    std::function<void(std::size_t, std::size_t, long)> rec = [&](std::size_t next, std::size_t size, long e) {
      best[size] = std::max(best[size], e - static_cast<long>(size));
      if (size == cap) return;
      for (std::size_t v = next; v < n; ++v) {
        long add = 0;
        for (auto w : adj[v]) add += chosen[w];
        chosen[v] = true;
        rec(v + 1, size + 1, e + add);
        chosen[v] = false;
      }
    };
    rec(0, 0, 0);
    return best;
  }

  // Greedy peeling: repeatedly drop a minimum-degree vertex. Lower bound only.
  std::vector<long> degree(n);
  long e = 0;
  for (std::size_t i = 0; i < n; ++i) {
    degree[i] = static_cast<long>(adj[i].size());
    e += degree[i];
  }
  e /= 2;
  std::vector<bool> alive(n, true);
  std::set<std::pair<long, std::size_t>> queue;
  for (std::size_t i = 0; i < n; ++i) queue.insert({degree[i], i});
  for (std::size_t size = n; size >= 1; --size) {
    if (size <= cap) best[size] = std::max(best[size], e - static_cast<long>(size));
    auto [d, v] = *queue.begin();
    queue.erase(queue.begin());
    alive[v] = false;
    e -= d;
    for (auto w : adj[v])
      if (alive[w]) {
        queue.erase({degree[w], w});
        queue.insert({--degree[w], w});
      }
  }
  return best;
}

void combine(std::vector<long>& dp, const std::vector<long>& profile) {
  std::vector<long> next(dp.size(), kNeg);
  for (std::size_t a = 0; a < dp.size(); ++a) {
    if (dp[a] == kNeg) continue;
    for (std::size_t b = 0; b < profile.size() && a + b < dp.size(); ++b)
      if (profile[b] != kNeg) next[a + b] = std::max(next[a + b], dp[a] + profile[b]);
  }
  dp = std::move(next);
}

}  // namespace

bool check_no_ell(const Graph& g, std::size_t ell) {
  if (ell == 0 || ell > g.vertex_count()) return true;
  auto comps = decompose(g);
  if (std::none_of(comps.begin(), comps.end(), [](const Component& c) { return c.kind == ComponentKind::Complex; }))
    return true;

  std::vector<long> dp(ell + 1, kNeg);
  dp[0] = 0;
  std::vector<std::size_t> tree_sizes;
  for (const Component& comp : comps) {
    const std::size_t size = comp.vertices.size();
    if (comp.kind == ComponentKind::Tree) {
      tree_sizes.push_back(size);
      continue;
    }
    std::vector<long> profile;
    if (comp.kind == ComponentKind::Unicyclic) {
      profile.assign(std::min(ell, size) + 1, -1);
      profile[0] = 0;
      for (std::size_t t = comp.cycle.size(); t < profile.size(); ++t) profile[t] = 0;
    } else {
      profile = complex_profile(g, comp, ell);
    }
    combine(dp, profile);
  }
  // Filling r vertices from trees costs one per tree touched; biggest first.
  std::sort(tree_sizes.rbegin(), tree_sizes.rend());
  std::vector<long> pool(ell + 1, kNeg);
  pool[0] = 0;
  std::size_t covered = 0, used = 0;
  for (std::size_t r = 1; r <= ell; ++r) {
    while (covered < r && used < tree_sizes.size()) covered += tree_sizes[used++];
    if (covered >= r) pool[r] = -static_cast<long>(used);
  }
  combine(dp, pool);
  return dp[ell] < 1;
}

std::map<TreeTypeId, std::size_t> tree_component_type_counts(const Graph& g, std::size_t m, TypeTable& table) {
  std::map<TreeTypeId, std::size_t> counts;
  for (const Component& comp : decompose(g)) {
    if (comp.kind != ComponentKind::Tree) continue;
    std::set<TreeTypeId> seen;
    for (Vertex r : comp.vertices) seen.insert(tree_type(RootedTreeView::bfs(g, r, m), m, table));
    for (TreeTypeId t : seen) ++counts[t];
  }
  return counts;
}

bool check_yes_sigma(const Graph& g, TreeTypeId sigma, std::size_t m, TypeTable& table) {
  auto counts = tree_component_type_counts(g, m, table);
  auto it = counts.find(sigma);
  return it != counts.end() && it->second >= table.cutoff();
}

TheoryReport verify_T_finite(const Graph& g, std::size_t ell_max,
                             const std::vector<std::pair<TreeTypeId, std::size_t>>& sigmas, TypeTable& table) {
  TheoryReport report;
  for (std::size_t ell = 1; ell <= ell_max; ++ell) {
    bool ok = check_no_ell(g, ell);
    report.no_ell.push_back({ell, ok});
    report.holds = report.holds && ok;
  }
  std::map<std::size_t, std::map<TreeTypeId, std::size_t>> by_depth;
  for (auto [sigma, m] : sigmas) {
    if (!by_depth.count(m)) by_depth[m] = tree_component_type_counts(g, m, table);
    auto& counts = by_depth[m];
    std::size_t found = counts.count(sigma) ? counts[sigma] : 0;
    bool ok = found >= table.cutoff();
    report.yes.push_back({sigma, m, found, ok});
    report.holds = report.holds && ok;
  }
  return report;
}

nlohmann::json theory_report_to_json(const TheoryReport& r, const TypeTable& table) {
  nlohmann::json no_ell = nlohmann::json::array(), yes = nlohmann::json::array();
  for (const auto& e : r.no_ell) no_ell.push_back({{"ell", e.ell}, {"holds", e.holds}});
  for (const auto& e : r.yes)
    yes.push_back({{"sigma", table.serialization(e.sigma)},
                   {"m", e.m},
                   {"k", table.cutoff()},
                   {"components", e.components},
                   {"holds", e.holds}});
  return {{"holds", r.holds}, {"no_ell", std::move(no_ell)}, {"yes_sigma", std::move(yes)}};
}

// --- pictures --------------------------------------------------------------

namespace {

// Rooted tree decoded from a bracket string, nodes in preorder.
struct ParsedTree {
  std::vector<int> parent;
  std::vector<std::size_t> depth;
};

ParsedTree parse_tree_form(const std::string& text) {
  ParsedTree t;
  std::vector<int> stack;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '(') {
      if (!t.parent.empty() && stack.empty()) throw ParseError("tree form has more than one root: " + text);
      t.parent.push_back(stack.empty() ? -1 : stack.back());
      t.depth.push_back(stack.size());
      stack.push_back(static_cast<int>(t.parent.size()) - 1);
    } else if (text[i] == ')') {
      if (stack.empty()) throw ParseError("unbalanced tree form: " + text);
      stack.pop_back();
    } else {
      throw ParseError("unexpected character in tree form: " + text);
    }
  }
  if (t.parent.empty() || !stack.empty()) throw ParseError("unbalanced tree form: " + text);
  return t;
}

std::string canonical_from_parents(const std::vector<int>& parent) {
  const std::size_t n = parent.size();
  std::vector<std::vector<std::string>> parts(n);
  std::vector<std::string> form(n);
  // Preorder puts children after parents, so reverse order finishes children first.
  for (std::size_t i = n; i-- > 0;) {
    std::sort(parts[i].begin(), parts[i].end());
    form[i] = "(";
    for (auto& p : parts[i]) form[i] += p;
    form[i] += ")";
    if (parent[i] >= 0) parts[static_cast<std::size_t>(parent[i])].push_back(std::move(form[i]));
  }
  return form[0];
}

long double log_factorial(std::size_t n) { return std::lgamma(static_cast<long double>(n) + 1); }

PictureComponent make_component(const std::vector<std::string>& trees, std::uint32_t M2) {
  PictureComponent c;
  c.cycle_length = static_cast<std::uint32_t>(trees.size());
  c.trees = dihedral_minimum<std::string>(trees);
  const std::size_t s = trees.size();
  std::size_t stabilizer = 0;
  for (int refl = 0; refl < 2; ++refl)
    for (std::size_t off = 0; off < s; ++off) {
      DihedralMap g{off, refl == 1};
      bool fixed = true;
      for (std::size_t i = 0; i < s && fixed; ++i) fixed = c.trees[g.apply(i, s)] == c.trees[i];
      stabilizer += fixed;
    }
  c.log_automorphisms = std::log(static_cast<long double>(stabilizer));
  for (const std::string& form : c.trees) {
    ParsedTree t = parse_tree_form(form);
    c.vertex_count += t.parent.size();
    for (std::size_t d : t.depth) {
      if (d > M2) throw InvalidArgument("picture tree deeper than M2");
      c.boundary_count += d == M2;
    }
    c.log_automorphisms += log_tree_automorphisms(form);
  }
  return c;
}

Picture assemble(std::uint32_t M1, std::uint32_t M2, std::vector<PictureComponent> comps) {
  Picture h;
  h.M1 = M1;
  h.M2 = M2;
  std::sort(comps.begin(), comps.end(), [](const PictureComponent& a, const PictureComponent& b) {
    if (a.cycle_length != b.cycle_length) return a.cycle_length < b.cycle_length;
    return a.trees < b.trees;
  });
  for (std::size_t i = 0; i < comps.size();) {
    std::size_t j = i;
    while (j < comps.size() && comps[j].cycle_length == comps[i].cycle_length && comps[j].trees == comps[i].trees) ++j;
    h.log_automorphisms += log_factorial(j - i) + static_cast<long double>(j - i) * comps[i].log_automorphisms;
    i = j;
  }
  for (const auto& c : comps) {
    h.M_H += c.vertex_count;
    h.L_H += c.boundary_count;
  }
  h.components = std::move(comps);
  return h;
}

}  // namespace

std::string canonical_tree_form(const RootedTreeView& t, std::size_t max_depth) {
  std::vector<int> parent;
  for (std::size_t i = 0; i < t.size() && t.depth_at(i) <= max_depth; ++i)
    parent.push_back(static_cast<int>(t.parent_index(i)));
  // BFS order also lists parents first, which is all canonical_from_parents needs.
  return canonical_from_parents(parent);
}

long double log_tree_automorphisms(const std::string& canonical) {
  ParsedTree t = parse_tree_form(canonical);
  const std::size_t n = t.parent.size();
  std::vector<std::vector<std::size_t>> children(n);
  for (std::size_t i = 1; i < n; ++i) children[static_cast<std::size_t>(t.parent[i])].push_back(i);
  std::vector<std::string> form(n);
  std::vector<long double> log_aut(n, 0);
  for (std::size_t i = n; i-- > 0;) {
    std::vector<std::string> parts;
    for (std::size_t c : children[i]) {
      parts.push_back(form[c]);
      log_aut[i] += log_aut[c];
    }
    std::sort(parts.begin(), parts.end());
    for (std::size_t a = 0; a < parts.size();) {
      std::size_t b = a;
      while (b < parts.size() && parts[b] == parts[a]) ++b;
      log_aut[i] += log_factorial(b - a);
      a = b;
    }
    form[i] = "(";
    for (auto& p : parts) form[i] += p;
    form[i] += ")";
  }
  return log_aut[0];
}

std::string PictureComponent::serialization() const {
  std::string out = std::to_string(cycle_length) + ":[";
  for (std::size_t i = 0; i < trees.size(); ++i) {
    if (i) out += ',';
    out += trees[i];
  }
  return out + "]";
}

long double Picture::log_C_H() const { return log_factorial(M_H) - log_automorphisms; }
double Picture::C_H() const { return static_cast<double>(std::round(std::exp(log_C_H()))); }
double Picture::automorphisms() const { return static_cast<double>(std::round(std::exp(log_automorphisms))); }

std::string Picture::serialization() const {
  std::string out = "{";
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (i) out += ';';
    out += components[i].serialization();
  }
  return out + "}";
}

Picture extract_picture(const Graph& g, std::uint32_t M1, std::uint32_t M2, std::size_t max_vertices) {
  if (M1 < 3) throw InvalidArgument("M1 must be >= 3");
  std::vector<PictureComponent> comps;
  std::size_t total = 0;
  for (const Component& comp : decompose(g)) {
    if (comp.kind != ComponentKind::Unicyclic || comp.cycle.size() > M1) continue;
    UnicyclicView view = unicyclic_view(g, comp);
    std::vector<std::string> trees;
    for (std::size_t i = 0; i < view.cycle_length(); ++i) {
      const RootedTreeView& t = view.hanging_tree(i);
      for (std::size_t j = 0; j < t.size() && t.depth_at(j) <= M2; ++j) ++total;
      if (total > max_vertices)
        throw PictureTooLarge("picture exceeds " + std::to_string(max_vertices) + " vertices");
      trees.push_back(canonical_tree_form(t, M2));
    }
    comps.push_back(make_component(trees, M2));
  }
  return assemble(M1, M2, std::move(comps));
}

Graph picture_graph(const Picture& h) {
  GraphBuilder b;
  for (const PictureComponent& c : h.components) {
    const Vertex base = b.add_vertices(c.cycle_length);
    for (std::uint32_t i = 0; i < c.cycle_length; ++i) b.add_edge(base + i, base + (i + 1) % c.cycle_length);
    for (std::uint32_t i = 0; i < c.cycle_length; ++i) {
      ParsedTree t = parse_tree_form(c.trees[i]);
      std::vector<Vertex> id(t.parent.size());
      id[0] = base + i;
      for (std::size_t j = 1; j < t.parent.size(); ++j) {
        id[j] = b.add_vertex();
        b.add_edge(id[static_cast<std::size_t>(t.parent[j])], id[j]);
      }
    }
  }
  return b.build();
}

nlohmann::json picture_to_json(const Picture& h) {
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& c : h.components)
    comps.push_back({{"s", c.cycle_length},
                     {"trees", c.trees},
                     {"vertices", c.vertex_count},
                     {"boundary", c.boundary_count},
                     {"automorphisms", static_cast<double>(std::round(std::exp(c.log_automorphisms)))}});
  return {{"M1", h.M1},
          {"M2", h.M2},
          {"M_H", h.M_H},
          {"L_H", h.L_H},
          {"C_H", h.C_H()},
          {"log_C_H", static_cast<double>(h.log_C_H())},
          {"automorphisms", h.automorphisms()},
          {"serialization", h.serialization()},
          {"components", std::move(comps)}};
}

Picture picture_from_json(const nlohmann::json& j) {
  try {
    auto M1 = j.at("M1").get<std::uint32_t>();
    auto M2 = j.at("M2").get<std::uint32_t>();
    if (M1 < 3) throw ParseError("M1 must be >= 3");
    std::vector<PictureComponent> comps;
    for (const auto& c : j.at("components")) {
      std::vector<std::string> trees;
      for (const auto& t : c.at("trees")) {
        ParsedTree parsed = parse_tree_form(t.get<std::string>());
        trees.push_back(canonical_from_parents(parsed.parent));
      }
      if (trees.size() < 3 || trees.size() > M1) throw ParseError("picture cycle length outside 3..M1");
      if (c.contains("s") && c.at("s").get<std::size_t>() != trees.size())
        throw ParseError("picture component length differs from its tree count");
      comps.push_back(make_component(trees, M2));
    }
    return assemble(M1, M2, std::move(comps));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed picture: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what());
  }
}

bool satisfies_completion(const Graph& g, const CompletionVector& v, TypeTable& table) {
  return completion_vector(g, v.M1(), v.M2(), table) == v;
}

}  // namespace ehrlab
