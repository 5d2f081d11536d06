#include "ehrlab/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <memory>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include <boost/math/special_functions/gamma.hpp>

#include "ehrlab/completion.hpp"
#include "ehrlab/error.hpp"
#include "ehrlab/graph_io.hpp"
#include "ehrlab/types.hpp"

namespace ehrlab {

// --- sampling -------------------------------------------------------------

void SampleConfig::validate() const {
  if (trials == 0) throw InvalidArgument("trials must be at least 1");
  if (!(c >= 0) || !std::isfinite(c)) throw InvalidArgument("c must be a non-negative number");
  if (c > 0 && !(c < static_cast<double>(n))) throw InvalidArgument("c must be smaller than n");
}

std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial) {
  // splitmix64 of the pair
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(trial) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Graph sample_gnp(const SampleConfig& cfg, std::size_t trial) {
  cfg.validate();
  const std::size_t n = cfg.n;
  if (n < 2 || cfg.c == 0) return Graph(n);
  const double p = cfg.c / static_cast<double>(n);
  std::mt19937_64 rng(trial_seed(cfg.seed, trial));
  std::geometric_distribution<std::uint64_t> skip(p);
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(cfg.c * static_cast<double>(n) / 2 * 1.2) + 16);
  std::uint64_t v = 1, w = 0;
  bool first = true;
  while (v < n) {
    std::uint64_t jump = skip(rng) + (first ? 0 : 1);
    first = false;
    w += jump;
    while (w >= v && v < n) {
      w -= v;
      ++v;
    }
    if (v < n) edges.emplace_back(static_cast<Vertex>(w), static_cast<Vertex>(v));
  }
  return Graph(n, edges);
}

// --- closed forms -----------------------------------------------------------

LimitPair no_short_cycle_limit(double c, std::uint32_t M1) {
  if (M1 < 3) throw InvalidArgument("M1 must be >= 3");
  double paper = 0, standard = 0;
  for (std::uint32_t i = 3; i <= M1; ++i) {
    const double ci = std::pow(c, i);
    paper += ci / std::tgamma(i + 1.0);
    standard += ci / (2.0 * i);
  }
  return {std::exp(-paper), std::exp(-standard)};
}

double no_short_cycle_limit(double c, std::uint32_t M1, CycleFormula formula) {
  LimitPair p = no_short_cycle_limit(c, M1);
  return formula == CycleFormula::Paper ? p.paper : p.standard;
}

double expected_cycles(double c, std::uint32_t s) {
  if (s < 3) throw InvalidArgument("cycle length must be >= 3");
  return std::pow(c, s) / (2.0 * s);
}

double expected_keys(double c, std::uint32_t s, std::uint32_t d, std::uint32_t W) {
  if (s < 3) throw InvalidArgument("cycle length must be >= 3");
  return std::pow(c, s + d + W) / (2.0 * std::tgamma(W + 1.0));
}

double picture_limit(const Picture& h, double c, std::uint32_t M1, CycleFormula formula) {
  const double tail = no_short_cycle_limit(c, M1, formula);
  if (h.M_H == 0) return tail;
  if (c == 0) return 0;
  const long double log_term = static_cast<long double>(h.M_H) * std::log(static_cast<long double>(c)) -
                               h.log_automorphisms -
                               static_cast<long double>(c) * static_cast<long double>(h.M_H - h.L_H);
  return static_cast<double>(std::exp(log_term)) * tail;
}

namespace {

void require_tree(const Graph& t) {
  if (t.vertex_count() == 0) throw InvalidArgument("tree must be nonempty");
  if (t.edge_count() + 1 != t.vertex_count() || decompose(t).size() != 1)
    throw InvalidArgument("graph is not a tree");
}

// Centre(s) of the tree component containing the given vertices.
std::vector<Vertex> centres(const Graph& g, const std::vector<Vertex>& vertices) {
  if (vertices.size() <= 2) return vertices;
  std::unordered_map<Vertex, std::size_t> degree;
  std::vector<Vertex> layer;
  for (Vertex v : vertices) {
    degree[v] = g.degree(v);
    if (g.degree(v) <= 1) layer.push_back(v);
  }
  std::size_t remaining = vertices.size();
  while (remaining > 2) {
    remaining -= layer.size();
    std::vector<Vertex> next;
    for (Vertex v : layer)
      for (Vertex w : g.neighbors(v))
        if (--degree[w] == 1) next.push_back(w);
    layer = std::move(next);
  }
  std::sort(layer.begin(), layer.end());
  return layer;
}

std::string component_form(const Graph& g, const std::vector<Vertex>& vertices) {
  std::string best;
  for (Vertex c : centres(g, vertices)) {
    std::string f = canonical_tree_form(RootedTreeView::from_component(g, c), vertices.size());
    if (best.empty() || f < best) best = std::move(f);
  }
  return best;
}

}  // namespace

std::string unrooted_tree_form(const Graph& tree) {
  require_tree(tree);
  std::vector<Vertex> all(tree.vertex_count());
  for (Vertex v = 0; v < all.size(); ++v) all[v] = v;
  return component_form(tree, all);
}

long double log_unrooted_tree_automorphisms(const Graph& tree) {
  require_tree(tree);
  std::vector<Vertex> all(tree.vertex_count());
  for (Vertex v = 0; v < all.size(); ++v) all[v] = v;
  auto cs = centres(tree, all);
  std::string f0 = canonical_tree_form(RootedTreeView::from_component(tree, cs[0]), all.size());
  long double out = log_tree_automorphisms(f0);
  if (cs.size() == 2 &&
      canonical_tree_form(RootedTreeView::from_component(tree, cs[1]), all.size()) == f0)
    out += std::log(2.0L);
  return out;
}

double expected_tree_copies(const Graph& tree, double c) {
  require_tree(tree);
  const double l = static_cast<double>(tree.vertex_count());
  if (c == 0) return l == 1 ? 1.0 : 0.0;
  return std::exp((l - 1) * std::log(c) - l * c - static_cast<double>(log_unrooted_tree_automorphisms(tree)));
}

// --- graph statistics -------------------------------------------------------

namespace {

// Calls f(cycle) once per s-cycle, the cycle starting at its smallest vertex
// and oriented towards the smaller of its two neighbours.
template <typename F>
void for_each_cycle(const Graph& g, std::uint32_t s, F&& f) {
  if (s < 3) throw InvalidArgument("cycle length must be >= 3");
  std::vector<Vertex> path;
  std::vector<char> on_path(g.vertex_count(), 0);
  std::function<void(Vertex)> extend = [&](Vertex start) {
    const Vertex last = path.back();
    if (path.size() == s) {
      if (g.adjacent(last, start) && path[1] < last) f(std::as_const(path));
      return;
    }
    for (Vertex w : g.neighbors(last)) {
      if (w <= start || on_path[w]) continue;
      path.push_back(w);
      on_path[w] = 1;
      extend(start);
      on_path[w] = 0;
      path.pop_back();
    }
  };
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    if (g.degree(v) < 2) continue;
    path.assign(1, v);
    on_path[v] = 1;
    extend(v);
    on_path[v] = 0;
  }
}

double binomial(std::size_t n, std::size_t r) {
  if (r > n) return 0;
  double out = 1;
  for (std::size_t i = 0; i < r; ++i) out = out * static_cast<double>(n - i) / static_cast<double>(i + 1);
  return out;
}

}  // namespace

std::size_t count_cycles(const Graph& g, std::uint32_t s) {
  std::size_t count = 0;
  for_each_cycle(g, s, [&](const std::vector<Vertex>&) { ++count; });
  return count;
}

bool has_cycle_up_to(const Graph& g, std::uint32_t M1) {
  // Only components with a cycle can host one.
  for (const Component& comp : decompose(g)) {
    if (comp.kind == ComponentKind::Tree) continue;
    if (comp.kind == ComponentKind::Unicyclic) {
      if (comp.cycle.size() <= M1) return true;
      continue;
    }
    GraphBuilder b;
    std::unordered_map<Vertex, Vertex> id;
    for (Vertex v : comp.vertices) id[v] = b.add_vertex();
    for (Vertex v : comp.vertices)
      for (Vertex w : g.neighbors(v))
        if (v < w) b.add_edge(id[v], id[w]);
    Graph sub = b.build();
    for (std::uint32_t s = 3; s <= M1; ++s)
      if (count_cycles(sub, s) > 0) return true;
  }
  return false;
}

std::size_t count_keys(const Graph& g, std::uint32_t s, std::uint32_t d, std::uint32_t W) {
  double total = 0;
  std::vector<char> used(g.vertex_count(), 0);
  std::vector<Vertex> path;
  std::function<void(Vertex)> walk = [&](Vertex at) {
    if (path.size() == d + 1) {
      std::size_t free = 0;
      for (Vertex w : g.neighbors(at)) free += used[w] == 0;
      total += binomial(free, W);
      return;
    }
    for (Vertex w : g.neighbors(at)) {
      if (used[w]) continue;
      used[w] = 1;
      path.push_back(w);
      walk(w);
      path.pop_back();
      used[w] = 0;
    }
  };
  for_each_cycle(g, s, [&](const std::vector<Vertex>& cycle) {
    for (Vertex c : cycle) used[c] = 1;
    for (Vertex u : cycle) {
      path.assign(1, u);
      walk(u);
    }
    for (Vertex c : cycle) used[c] = 0;
  });
  return static_cast<std::size_t>(std::llround(total));
}

std::size_t short_unicyclic_count(const Graph& g, std::uint32_t M1) {
  std::size_t out = 0;
  for (const Component& comp : decompose(g))
    out += comp.kind == ComponentKind::Unicyclic && comp.cycle.size() <= M1;
  return out;
}

std::size_t isolated_copies(const Graph& g, const Graph& tree) {
  const std::string target = unrooted_tree_form(tree);
  std::size_t out = 0;
  for (const Component& comp : decompose(g)) {
    if (comp.kind != ComponentKind::Tree || comp.vertices.size() != tree.vertex_count()) continue;
    out += component_form(g, comp.vertices) == target;
  }
  return out;
}

// --- events -----------------------------------------------------------------

Event event_no_short_cycles(std::uint32_t M1) {
  if (M1 < 3) throw InvalidArgument("M1 must be >= 3");
  Event e;
  e.name = "no-short-cycles(M1=" + std::to_string(M1) + ")";
  e.statistic = [M1](const Graph& g) { return has_cycle_up_to(g, M1) ? 0.0 : 1.0; };
  e.analytic = [M1](const SampleConfig& cfg) {
    LimitPair p = no_short_cycle_limit(cfg.c, M1);
    return std::vector<AnalyticValue>{{"paper", p.paper}, {"standard", p.standard}};
  };
  return e;
}

Event event_picture(const Picture& h) {
  Event e;
  e.name = "picture(" + h.serialization() + ")";
  e.statistic = [h](const Graph& g) {
    try {
      return extract_picture(g, h.M1, h.M2) == h ? 1.0 : 0.0;
    } catch (const PictureTooLarge&) {
      return 0.0;
    }
  };
  e.analytic = [h](const SampleConfig& cfg) {
    return std::vector<AnalyticValue>{{"paper", picture_limit(h, cfg.c, h.M1, CycleFormula::Paper)},
                                      {"standard", picture_limit(h, cfg.c, h.M1, CycleFormula::Standard)}};
  };
  return e;
}

Event event_completion(const nlohmann::json& completion) {
  auto k = completion.at("k").get<std::uint32_t>();
  auto table = std::make_shared<TypeTable>(k);
  auto v = std::make_shared<CompletionVector>(completion_from_json(completion, *table));
  Event e;
  e.name = "completion(k=" + std::to_string(k) + ",M1=" + std::to_string(v->M1()) + ",M2=" + std::to_string(v->M2()) + ")";
  e.statistic = [table, v](const Graph& g) { return satisfies_completion(g, *v, *table) ? 1.0 : 0.0; };
  e.analytic = [](const SampleConfig&) { return std::vector<AnalyticValue>{}; };
  return e;
}

Event event_completion_partition(std::uint32_t k, std::uint32_t M1, std::uint32_t M2) {
  auto table = std::make_shared<TypeTable>(k);
  auto all = std::make_shared<std::vector<CompletionVector>>(enumerate_completion_vectors(M1, M2, *table));
  Event e;
  e.name = "completion-partition(k=" + std::to_string(k) + ",M1=" + std::to_string(M1) + ",M2=" + std::to_string(M2) + ")";
  e.statistic = [table, all](const Graph& g) {
    std::size_t hits = 0;
    for (const auto& v : *all) hits += satisfies_completion(g, v, *table);
    return hits == 1 ? 1.0 : 0.0;
  };
  e.analytic = [](const SampleConfig&) { return std::vector<AnalyticValue>{{"exclusive", 1.0}}; };
  return e;
}

Event event_many(std::uint32_t W, std::uint32_t M1) {
  Event e;
  e.name = "many(W=" + std::to_string(W) + ",M1=" + std::to_string(M1) + ")";
  e.statistic = [W, M1](const Graph& g) {
    return short_unicyclic_count(g, M1) > static_cast<std::size_t>(W) * M1 ? 1.0 : 0.0;
  };
  e.analytic = [](const SampleConfig&) { return std::vector<AnalyticValue>{}; };
  return e;
}

Event event_bu(std::uint32_t s, std::uint32_t d, std::uint32_t W) {
  Event e;
  e.name = "bu(s=" + std::to_string(s) + ",d=" + std::to_string(d) + ",W=" + std::to_string(W) + ")";
  e.statistic = [s, d, W](const Graph& g) { return count_keys(g, s, d, W) > 0 ? 1.0 : 0.0; };
  e.analytic = [s, d, W](const SampleConfig& cfg) {
    return std::vector<AnalyticValue>{{"markov-bound", std::min(1.0, expected_keys(cfg.c, s, d, W))}};
  };
  return e;
}

Event event_cycle_count(std::uint32_t s) {
  Event e;
  e.name = "cycle-count(s=" + std::to_string(s) + ")";
  e.kind = Event::Kind::Mean;
  e.statistic = [s](const Graph& g) { return static_cast<double>(count_cycles(g, s)); };
  e.analytic = [s](const SampleConfig& cfg) {
    return std::vector<AnalyticValue>{{"expected", expected_cycles(cfg.c, s)}};
  };
  return e;
}

Event event_key_count(std::uint32_t s, std::uint32_t d, std::uint32_t W) {
  Event e;
  e.name = "key-count(s=" + std::to_string(s) + ",d=" + std::to_string(d) + ",W=" + std::to_string(W) + ")";
  e.kind = Event::Kind::Mean;
  e.statistic = [s, d, W](const Graph& g) { return static_cast<double>(count_keys(g, s, d, W)); };
  e.analytic = [s, d, W](const SampleConfig& cfg) {
    return std::vector<AnalyticValue>{{"expected", expected_keys(cfg.c, s, d, W)}};
  };
  return e;
}

Event event_tree_copies(const Graph& tree) {
  require_tree(tree);
  Event e;
  e.name = "tree-copies(" + unrooted_tree_form(tree) + ")";
  e.kind = Event::Kind::Mean;
  e.statistic = [tree](const Graph& g) {
    return g.vertex_count() == 0 ? 0.0
                                 : static_cast<double>(isolated_copies(g, tree)) / static_cast<double>(g.vertex_count());
  };
  e.analytic = [tree](const SampleConfig& cfg) {
    return std::vector<AnalyticValue>{{"rate", expected_tree_copies(tree, cfg.c)}};
  };
  return e;
}

Event event_edge_count() {
  Event e;
  e.name = "edge-count";
  e.kind = Event::Kind::Mean;
  e.statistic = [](const Graph& g) { return static_cast<double>(g.edge_count()); };
  e.analytic = [](const SampleConfig& cfg) {
    return std::vector<AnalyticValue>{{"expected", cfg.c * (static_cast<double>(cfg.n) - 1) / 2}};
  };
  return e;
}

Event event_edge_present(Vertex u, Vertex v) {
  if (u == v) throw InvalidArgument("an edge needs two distinct vertices");
  Event e;
  e.name = "edge-present(" + std::to_string(u) + "," + std::to_string(v) + ")";
  e.statistic = [u, v](const Graph& g) {
    return g.contains(u) && g.contains(v) && g.adjacent(u, v) ? 1.0 : 0.0;
  };
  e.analytic = [](const SampleConfig& cfg) {
    return std::vector<AnalyticValue>{{"exact", cfg.n == 0 ? 0.0 : cfg.c / static_cast<double>(cfg.n)}};
  };
  return e;
}

std::vector<std::string> event_names() {
  return {"no-short-cycles", "picture",    "completion", "completion-partition", "many",         "bu",
          "cycle-count",     "key-count",  "tree-copies", "edge-count",          "edge-present"};
}

Event make_event(const std::string& name, const nlohmann::json& params) {
  auto u32 = [&](const char* key, std::uint32_t fallback) {
    return params.contains(key) ? params.at(key).get<std::uint32_t>() : fallback;
  };
  try {
    if (name == "no-short-cycles") return event_no_short_cycles(u32("M1", 3));
    if (name == "picture") {
      if (params.contains("picture")) return event_picture(picture_from_json(params.at("picture")));
      // Default: one bare triangle.
      Graph tri(3, std::vector<Edge>{{0, 1}, {1, 2}, {0, 2}});
      return event_picture(extract_picture(tri, u32("M1", 3), u32("M2", 0)));
    }
    if (name == "completion") return event_completion(params.at("completion"));
    if (name == "completion-partition") return event_completion_partition(u32("k", 1), u32("M1", 3), u32("M2", 1));
    if (name == "many") return event_many(u32("W", 1), u32("M1", 3));
    if (name == "bu") return event_bu(u32("s", 3), u32("d", 1), u32("W", 2));
    if (name == "cycle-count") return event_cycle_count(u32("s", 3));
    if (name == "key-count") return event_key_count(u32("s", 3), u32("d", 1), u32("W", 2));
    if (name == "tree-copies") {
      std::vector<int> parent = params.contains("tree") ? params.at("tree").get<std::vector<int>>() : std::vector<int>{-1};
      std::vector<Edge> edges;
      for (std::size_t i = 1; i < parent.size(); ++i) {
        if (parent[i] < 0 || static_cast<std::size_t>(parent[i]) >= parent.size())
          throw ParseError("tree parent out of range");
        edges.emplace_back(static_cast<Vertex>(parent[i]), static_cast<Vertex>(i));
      }
      return event_tree_copies(Graph(parent.size(), edges));
    }
    if (name == "edge-count") return event_edge_count();
    if (name == "edge-present") return event_edge_present(u32("u", 0), u32("v", 1));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad event parameters: ") + e.what());
  } catch (const InvalidGraph& e) {
    throw ParseError(std::string("bad event tree: ") + e.what());
  }
  throw InvalidArgument("unknown event '" + name + "'");
}

// --- estimation -------------------------------------------------------------

namespace {

constexpr double kZ95 = 1.959963984540054;
constexpr double kZ99 = 2.5758293035489004;

std::pair<double, double> wilson(double p, double t, double z) {
  const double z2 = z * z;
  const double centre = (p + z2 / (2 * t)) / (1 + z2 / t);
  const double half = z / (1 + z2 / t) * std::sqrt(p * (1 - p) / t + z2 / (4 * t * t));
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

}  // namespace

EstimateReport estimate_event(const SampleConfig& cfg, const Event& event, bool keep_trials) {
  cfg.validate();
  std::vector<double> values(cfg.trials);
  const std::size_t workers = std::max<std::size_t>(1, std::min(cfg.workers, cfg.trials));
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&](std::size_t w) {
    try {
      for (std::size_t t = w; t < cfg.trials; t += workers) values[t] = event.statistic(sample_gnp(cfg, t));
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  EstimateReport r;
  r.event = event.name;
  r.kind = event.kind;
  r.n = cfg.n;
  r.c = cfg.c;
  r.trials = cfg.trials;
  r.seed = cfg.seed;
  const double t = static_cast<double>(cfg.trials);
  double sum = 0;
  for (double v : values) sum += v;
  r.point = sum / t;
  if (event.kind == Event::Kind::Probability) {
    r.std_error = std::sqrt(r.point * (1 - r.point) / t);
    if (r.point <= 5 / t || r.point >= 1 - 5 / t) {
      std::tie(r.ci95_low, r.ci95_high) = wilson(r.point, t, kZ95);
      std::tie(r.ci99_low, r.ci99_high) = wilson(r.point, t, kZ99);
    } else {
      r.ci95_low = std::max(0.0, r.point - kZ95 * r.std_error);
      r.ci95_high = std::min(1.0, r.point + kZ95 * r.std_error);
      r.ci99_low = std::max(0.0, r.point - kZ99 * r.std_error);
      r.ci99_high = std::min(1.0, r.point + kZ99 * r.std_error);
    }
    r.ci95 = (r.ci95_high - r.ci95_low) / 2;
  } else {
    double ss = 0;
    for (double v : values) ss += (v - r.point) * (v - r.point);
    const double var = cfg.trials > 1 ? ss / (t - 1) : 0;
    r.std_error = std::sqrt(var / t);
    r.ci95 = kZ95 * r.std_error;
    r.ci95_low = r.point - r.ci95;
    r.ci95_high = r.point + r.ci95;
    r.ci99_low = r.point - kZ99 * r.std_error;
    r.ci99_high = r.point + kZ99 * r.std_error;
  }
  if (event.analytic)
    for (const auto& a : event.analytic(cfg))
      r.analytic.push_back({a.tag, a.value, r.std_error > 0 ? (a.value - r.point) / r.std_error : 0.0,
                            a.value >= r.ci99_low && a.value <= r.ci99_high});
  if (keep_trials) r.per_trial = std::move(values);
  return r;
}

nlohmann::json report_to_json(const EstimateReport& r) {
  nlohmann::json analytic = nlohmann::json::array();
  for (const auto& a : r.analytic)
    analytic.push_back({{"tag", a.tag}, {"value", a.value}, {"z", a.z}, {"inside_ci99", a.inside_ci99}});
  return {{"event", r.event},
          {"kind", r.kind == Event::Kind::Probability ? "probability" : "mean"},
          {"n", r.n},
          {"c", r.c},
          {"trials", r.trials},
          {"seed", r.seed},
          {"point", r.point},
          {"std_error", r.std_error},
          {"ci95", r.ci95},
          {"ci95_interval", {r.ci95_low, r.ci95_high}},
          {"ci99_interval", {r.ci99_low, r.ci99_high}},
          {"analytic", analytic}};
}

std::string per_trial_csv(const EstimateReport& r) {
  if (r.per_trial.size() != r.trials) throw InvalidArgument("per-trial values were not kept");
  std::ostringstream out;
  out.precision(17);
  out << "trial,value\n";
  for (std::size_t i = 0; i < r.per_trial.size(); ++i) out << i << ',' << r.per_trial[i] << '\n';
  return out.str();
}

ChiSquareResult poisson_goodness_of_fit(const std::vector<double>& observations, double lambda) {
  if (observations.empty()) throw InvalidArgument("no observations");
  if (!(lambda > 0)) throw InvalidArgument("lambda must be positive");
  std::vector<double> observed;
  for (double x : observations) {
    if (x < 0 || x != std::floor(x)) throw InvalidArgument("observations must be non-negative integers");
    auto i = static_cast<std::size_t>(x);
    if (observed.size() <= i) observed.resize(i + 1, 0);
    observed[i] += 1;
  }
  const double total = static_cast<double>(observations.size());
  // Single bins 0..B-1 while both the bin and the remaining tail expect >= 5; one tail bin after.
  std::vector<double> probs;
  double pk = std::exp(-lambda), head = 0;
  for (std::size_t i = 0; total * pk >= 5 && total * (1 - head - pk) >= 5; ++i) {
    probs.push_back(pk);
    head += pk;
    pk *= lambda / static_cast<double>(i + 1);
  }
  const std::size_t bins = probs.size() + 1;
  ChiSquareResult res;
  double tail_obs = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (i < probs.size()) {
      const double expect = total * probs[i];
      res.statistic += (observed[i] - expect) * (observed[i] - expect) / expect;
    } else {
      tail_obs += observed[i];
    }
  }
  for (std::size_t i = observed.size(); i < probs.size(); ++i) res.statistic += total * probs[i];
  const double tail_expect = total * (1 - head);
  if (tail_expect > 0) res.statistic += (tail_obs - tail_expect) * (tail_obs - tail_expect) / tail_expect;
  res.dof = bins > 1 ? bins - 1 : 0;
  res.p_value = res.dof == 0 ? 1.0 : boost::math::gamma_q(static_cast<double>(res.dof) / 2, res.statistic / 2);
  return res;
}

}  // namespace ehrlab
