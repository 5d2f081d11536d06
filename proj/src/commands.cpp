#include "ehrlab/commands.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>
#include <string>

#include "ehrlab/completion.hpp"
#include "ehrlab/error.hpp"
#include "ehrlab/graph_io.hpp"
#include "ehrlab/theory.hpp"
#include "ehrlab/types.hpp"

namespace ehrlab {

std::size_t node_budget_from_env() {
  const char* text = std::getenv("EHRLAB_BUDGET");
  if (!text || !*text) return kDefaultNodeBudget;
  std::size_t value = 0;
  const char* end = text + std::strlen(text);
  auto [ptr, ec] = std::from_chars(text, end, value);
  if (ec != std::errc{} || ptr != end || value == 0)
    throw InvalidArgument(std::string("EHRLAB_BUDGET must be a positive integer, got '") + text + "'");
  return value;
}

nlohmann::json classify_json(const Graph& g) {
  nlohmann::json comps = nlohmann::json::array();
  std::size_t trees = 0, unicyclic = 0, complex = 0;
  std::size_t index = 0;
  for (const auto& c : decompose(g)) {
    nlohmann::json entry{{"index", index++},
                         {"kind", to_string(c.kind)},
                         {"vertices", c.vertices.size()},
                         {"edges", c.edge_count},
                         {"smallest_vertex", c.vertices.front()}};
    if (c.kind == ComponentKind::Unicyclic) entry["cycle_length"] = c.cycle.size();
    comps.push_back(std::move(entry));
    switch (c.kind) {
      case ComponentKind::Tree: ++trees; break;
      case ComponentKind::Unicyclic: ++unicyclic; break;
      case ComponentKind::Complex: ++complex; break;
    }
  }
  return {{"n", g.vertex_count()},
          {"edges", g.edge_count()},
          {"components", std::move(comps)},
          {"counts", {{"tree", trees}, {"unicyclic", unicyclic}, {"complex", complex}}}};
}

nlohmann::json types_json(const Graph& g, std::size_t m, std::uint32_t k, std::optional<std::size_t> s) {
  if (k == 0) throw InvalidArgument("k must be positive");
  TypeTable table(k);
  nlohmann::json comps = nlohmann::json::array();
  std::size_t index = 0;
  for (const auto& c : decompose(g)) {
    nlohmann::json entry{{"index", index++}, {"kind", to_string(c.kind)}, {"vertices", c.vertices.size()}};
    switch (c.kind) {
      case ComponentKind::Tree: {
        Vertex root = c.vertices.front();
        entry["root"] = root;
        entry["type"] = table.serialization(tree_type(RootedTreeView::from_component(g, root), m, table));
        break;
      }
      case ComponentKind::Unicyclic:
        entry["cycle_length"] = c.cycle.size();
        if (!s || c.cycle.size() <= *s)
          entry["type"] = table.cycle_serialization(cycle_type(unicyclic_view(g, c), m, table).type);
        else
          entry["type"] = nullptr;
        break;
      case ComponentKind::Complex:
        entry["type"] = nullptr;
        break;
    }
    comps.push_back(std::move(entry));
  }
  nlohmann::json counts = nlohmann::json::array();
  for (auto [sigma, n] : tree_component_type_counts(g, m, table))
    counts.push_back({{"type", table.serialization(sigma)}, {"components", n}});
  nlohmann::json out{{"m", m}, {"k", k}, {"components", std::move(comps)}, {"tree_type_counts", std::move(counts)}};
  out["s"] = s ? nlohmann::json(*s) : nlohmann::json(nullptr);
  return out;
}

nlohmann::json completion_json(const Graph& g, std::uint32_t k, std::uint32_t M1, std::uint32_t M2) {
  if (k == 0) throw InvalidArgument("k must be positive");
  TypeTable table(k);
  auto cv = completion_vector(g, M1, M2, table);
  return {{"completion", completion_to_json(cv, table)},
          {"consistency", consistency_to_json(check_consistency(cv, table), table)}};
}

nlohmann::json verify_theory_json(const Graph& g, std::size_t ell_max, std::size_t m, std::uint32_t k) {
  if (k == 0) throw InvalidArgument("k must be positive");
  TypeTable table(k);
  std::vector<std::pair<TreeTypeId, std::size_t>> sigmas;
  for (TreeTypeId sigma : enumerate_tree_types(m, table)) sigmas.emplace_back(sigma, m);
  auto out = theory_report_to_json(verify_T_finite(g, ell_max, sigmas, table), table);
  out["ell_max"] = ell_max;
  out["m"] = m;
  out["k"] = k;
  return out;
}

nlohmann::json solve_json(const Graph& left, const Graph& right, std::size_t rounds, bool dehr,
                          std::size_t node_budget) {
  GameConfig cfg;
  if (dehr) {
    auto as_tree = [](const Graph& g, const char* name) {
      if (g.vertex_count() == 0) throw InvalidArgument(std::string(name) + " graph is empty");
      auto t = RootedTreeView::from_component(g, 0);
      if (t.size() != g.vertex_count()) throw NotTreelike(std::string(name) + " graph is not connected");
      return t;
    };
    cfg = GameConfig{Arena::from_tree(as_tree(left, "left")), Arena::from_tree(as_tree(right, "right")), rounds,
                     {{0, 0}}, Variant::DEHR};
  } else {
    cfg = GameConfig{Arena::from_graph(left), Arena::from_graph(right), rounds, {}, Variant::EHR};
  }
  GameSolver solver(cfg, node_budget);
  Winner w = solver.winner();
  return {{"variant", to_string(cfg.variant)},
          {"rounds", rounds},
          {"winner", to_string(w)},
          {"nodes", solver.nodes()},
          {"budget", node_budget}};
}

SampleConfig sample_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("request must be a JSON object");
  for (const char* key : {"n", "c", "seed"})
    if (!j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
  SampleConfig cfg;
  try {
    cfg.n = j.at("n").get<std::size_t>();
    cfg.c = j.at("c").get<double>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.trials = j.value("trials", std::size_t{1});
    cfg.workers = j.value("workers", std::size_t{1});
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad sampling parameters: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

nlohmann::json sample_json(const SampleConfig& cfg, std::size_t trial) {
  cfg.validate();
  Graph g = sample_gnp(cfg, trial);
  return {{"n", cfg.n},
          {"c", cfg.c},
          {"seed", cfg.seed},
          {"trial", trial},
          {"edges", g.edge_count()},
          {"graph", graph_to_json(g)}};
}

nlohmann::json estimate_json(const nlohmann::json& request) {
  SampleConfig cfg = sample_config_from_json(request);
  if (!request.contains("event") || !request.at("event").is_string())
    throw ParseError("missing field 'event'");
  if (!request.contains("trials")) throw ParseError("missing field 'trials'");
  nlohmann::json params = request.value("params", nlohmann::json::object());
  if (!params.is_object()) throw ParseError("'params' must be an object");
  bool keep = false;
  try {
    keep = request.value("per_trial", false);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad 'per_trial': ") + e.what());
  }
  Event event = make_event(request.at("event").get<std::string>(), params);
  auto report = estimate_event(cfg, event, keep);
  auto out = report_to_json(report);
  out["params"] = params;
  if (keep) out["per_trial"] = report.per_trial;
  return out;
}

}  // namespace ehrlab
