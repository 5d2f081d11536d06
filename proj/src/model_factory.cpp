#include "ehrlab/model_factory.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "ehrlab/error.hpp"
#include "ehrlab/theory.hpp"

namespace ehrlab {

namespace {

void hang(GraphBuilder& b, Vertex at, TreeTypeId sigma, const TypeTable& table) {
  for (const Branch& br : table.payload(sigma))
    for (std::uint32_t c = 0; c < br.count; ++c) {
      Vertex child = b.add_vertex();
      b.add_edge(at, child);
      hang(b, child, br.child, table);
    }
}

Graph tree_graph(const std::vector<int>& parent) {
  std::vector<Edge> edges;
  for (std::size_t i = 1; i < parent.size(); ++i) {
    if (parent[i] < 0 || static_cast<std::size_t>(parent[i]) >= i)
      throw InvalidArgument("generator parent arrays need 0 <= parent[i] < i");
    edges.emplace_back(static_cast<Vertex>(parent[i]), static_cast<Vertex>(i));
  }
  return Graph(parent.size(), edges);
}

}  // namespace

Graph realize_tree_type(TreeTypeId sigma, const TypeTable& table) {
  GraphBuilder b;
  hang(b, b.add_vertex(), sigma, table);
  return b.build();
}

Graph realize_cycle_type(CycleTypeId gamma, const TypeTable& table) {
  auto word = table.word(gamma);
  const std::size_t s = word.size();
  GraphBuilder b;
  b.add_vertices(s);
  for (std::size_t i = 0; i < s; ++i) b.add_edge(static_cast<Vertex>(i), static_cast<Vertex>((i + 1) % s));
  for (std::size_t i = 0; i < s; ++i) hang(b, static_cast<Vertex>(i), word[i], table);
  return b.build();
}

std::vector<std::vector<int>> all_rooted_trees(std::size_t max_vertices) {
  std::vector<std::vector<int>> out;
  if (max_vertices == 0) return out;
  std::vector<std::vector<int>> level{{-1}};
  for (std::size_t n = 1; n <= max_vertices; ++n) {
    out.insert(out.end(), level.begin(), level.end());
    if (n == max_vertices) break;
    std::map<std::string, std::vector<int>> next;
    for (const auto& p : level)
      for (std::size_t at = 0; at < p.size(); ++at) {
        auto q = p;
        q.push_back(static_cast<int>(at));
        next.emplace(canonical_tree_form(RootedTreeView::from_parent_array(q), q.size()), q);
      }
    level.clear();
    for (auto& [form, q] : next) level.push_back(std::move(q));
  }
  return out;
}

ModelSpec default_model_spec(const CompletionVector& v, std::size_t richness) {
  ModelSpec spec(v);
  spec.richness = richness;
  spec.generators = all_rooted_trees(5);
  return spec;
}

Graph with_copies(const Graph& g, const Graph& part, std::size_t copies) {
  GraphBuilder b;
  b.add_graph(g);
  for (std::size_t i = 0; i < copies; ++i) b.add_graph(part);
  return b.build();
}

Graph build_model(const ModelSpec& spec, TypeTable& table) {
  const CompletionVector& v = spec.completion;
  if (!check_consistency(v, table).ok) throw InconsistentSpec("completion vector is not consistent");
  if (spec.richness < v.k()) throw InvalidArgument("richness must be at least k");
  GraphBuilder b;
  for (const auto& [key, n] : v.counts()) {
    if (key.m != v.M2() || n == 0) continue;
    std::size_t copies = n;
    if (n == v.k()) {
      auto it = spec.extra_unicyclic.find(key.type);
      copies += it == spec.extra_unicyclic.end() ? spec.extra : it->second;
    }
    Graph one = realize_cycle_type(key.type, table);
    for (std::size_t c = 0; c < copies; ++c) b.add_graph(one);
  }
  for (const auto& p : spec.generators) {
    Graph tree = tree_graph(p);
    for (std::size_t c = 0; c < spec.richness; ++c) b.add_graph(tree);
  }
  return b.build();
}

nlohmann::json model_spec_to_json(const ModelSpec& spec, const TypeTable& table) {
  nlohmann::json extra = nlohmann::json::array();
  for (const auto& [type, n] : spec.extra_unicyclic)
    extra.push_back({{"type", table.cycle_serialization(type)}, {"extra", n}});
  return {{"completion", completion_to_json(spec.completion, table)},
          {"richness", spec.richness},
          {"generators", spec.generators},
          {"extra", spec.extra},
          {"extra_unicyclic", extra}};
}

ModelSpec model_spec_from_json(const nlohmann::json& j, TypeTable& table) {
  try {
    ModelSpec spec(completion_from_json(j.at("completion"), table));
    spec.richness = j.value("richness", static_cast<std::size_t>(spec.completion.k()));
    if (j.contains("generators"))
      spec.generators = j.at("generators").get<std::vector<std::vector<int>>>();
    else
      spec.generators = all_rooted_trees(5);
    spec.extra = j.value("extra", static_cast<std::size_t>(0));
    if (j.contains("extra_unicyclic"))
      for (const auto& e : j.at("extra_unicyclic"))
        spec.extra_unicyclic[table.parse_cycle(e.at("type").get<std::string>())] = e.at("extra").get<std::size_t>();
    for (const auto& p : spec.generators)
      if (p.empty() || p[0] != -1) throw ParseError("generator parent arrays start with -1");
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad model spec: ") + e.what());
  }
}

}  // namespace ehrlab
