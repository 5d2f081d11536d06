// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ehrlab/completion.hpp"
#include "ehrlab/game.hpp"
#include "ehrlab/model_factory.hpp"
#include "ehrlab/montecarlo.hpp"
#include "ehrlab/strategy.hpp"
#include "ehrlab/theory.hpp"
#include "ehrlab/tree_strategy.hpp"
#include "ehrlab/types.hpp"
#include "oracles/oracles.hpp"
#include "strategy_support.hpp"
#include "support.hpp"

using namespace ehrlab;
using testing_support::to_graph;

namespace {

// Pinned tolerances and sizes.
constexpr double kTypeCountsSeconds = 1;
constexpr double kCanonicalSeconds = 30;
constexpr double kGameSanitySeconds = 120;
constexpr double kTreeLemmaSeconds = 600;
constexpr double kSoundnessSeconds = 1200;
constexpr double kNoCycleSeconds = 300;
constexpr double kExpectationSeconds = 300;
constexpr double kPictureSeconds = 300;
constexpr double kIsolatedSeconds = 180;

constexpr double kNoCycleTolerance = 0.03;
constexpr double kSigmas = 3.0;
constexpr std::size_t kMinSoundnessPairs = 200;
constexpr std::size_t kOracleVertexCap = 15;
constexpr std::size_t kOracleBudget = 20'000'000;
constexpr std::size_t kMinOracleDecided = 20;

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(const char* name, double limit_seconds, const std::function<Outcome()>& body) {
  auto start = Clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (secs > limit_seconds) {
    out.pass = false;
    out.detail += "; over time limit";
  }
  std::printf("%s %s (%.2fs, limit %.0fs): %s\n", out.pass ? "PASS" : "FAIL", name, secs, limit_seconds,
              out.detail.c_str());
  std::fflush(stdout);
  failures += !out.pass;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// --- type enumeration counts -----------------------------------------------

Outcome type_counts() {
  Outcome out;
  std::ostringstream msg;
  auto brute = [](int m, int k, int max_n) {
    std::set<std::string> classes;
    for (int n = 1; n <= max_n; ++n)
      for (auto& p : oracle::rooted_tree_classes(n)) classes.insert(oracle::capped_class(p, m, k));
    return classes.size();
  };
  auto expect = [&](const std::string& what, std::size_t lib, std::size_t oracle_count, std::size_t want) {
    msg << what << "=" << lib << " ";
    if (lib != want || oracle_count != want) {
      out.pass = false;
      msg << "(oracle " << oracle_count << ", expected " << want << ") ";
    }
  };
  for (std::uint32_t k = 1; k <= 4; ++k) {
    TypeTable t(k);
    expect("S0," + std::to_string(k), enumerate_tree_types(0, t).size(), brute(0, static_cast<int>(k), 6), 1);
    expect("S1," + std::to_string(k), enumerate_tree_types(1, t).size(), brute(1, static_cast<int>(k), 6), k + 1);
  }
  TypeTable t1(1);
  const std::size_t s21 = brute(2, 1, 7);
  expect("S2,1", enumerate_tree_types(2, t1).size(), s21, 4);
  const std::size_t letters = brute(1, 1, 6);
  expect("G3,1,1", enumerate_cycle_types(3, 1, t1).size(), oracle::bracelet_count(3, static_cast<int>(letters)), 4);
  for (int s = 4; s <= 6; ++s) {
    const std::size_t b = oracle::bracelet_count(s, static_cast<int>(letters));
    expect("G" + std::to_string(s) + ",1,1", enumerate_cycle_types(static_cast<std::size_t>(s), 1, t1).size(), b, b);
  }
  out.detail = msg.str();
  return out;
}

// --- canonicalization ---------------------------------------------------------

Outcome canonicalization() {
  Outcome out;
  TypeTable table(7);
  std::map<std::string, TreeTypeId> by_class;
  std::map<TreeTypeId, std::string> by_type;
  std::size_t trees = 0, mismatches = 0;
  for (int n = 1; n <= 7; ++n)
    for (auto& p : oracle::parent_arrays(n)) {
      ++trees;
      TreeTypeId id = tree_type(RootedTreeView::from_parent_array(p), 7, table);
      const std::string cls = oracle::iso_class(p);
      auto [a, fresh_a] = by_class.emplace(cls, id);
      auto [b, fresh_b] = by_type.emplace(id, cls);
      if (a->second != id || b->second != cls) ++mismatches;
    }
  std::mt19937_64 rng(2024);
  std::size_t word_mismatches = 0;
  constexpr int kWords = 10'000;
  for (int i = 0; i < kWords; ++i) {
    const std::size_t s = 1 + rng() % 8;
    const int q = 1 + static_cast<int>(rng() % 4);
    std::vector<int> w(s);
    for (auto& x : w) x = static_cast<int>(rng() % static_cast<std::uint64_t>(q));
    auto images = oracle::dihedral_images(w);
    if (dihedral_minimum(std::span<const int>(w)) != *std::min_element(images.begin(), images.end())) ++word_mismatches;
  }
  out.pass = mismatches == 0 && word_mismatches == 0 && by_class.size() == by_type.size();
  std::ostringstream msg;
  msg << trees << " labelled trees in " << by_class.size() << " classes, " << mismatches << " type/class mismatches; "
      << kWords << " words, " << word_mismatches << " dihedral mismatches";
  out.detail = msg.str();
  return out;
}

// --- game oracle sanity -------------------------------------------------------

Winner ehr_winner(const Graph& a, const Graph& b, std::size_t k) {
  return brute_force_winner(GameConfig{Arena::from_graph(a), Arena::from_graph(b), k, {}, Variant::EHR});
}

Outcome game_sanity() {
  Outcome out;
  std::mt19937_64 rng(77);
  std::size_t self_ok = 0, oracle_ok = 0;
  constexpr int kGraphs = 100;
  for (int i = 0; i < kGraphs; ++i) {
    const int n = 1 + static_cast<int>(rng() % 8);
    const double p = 0.1 + 0.6 * static_cast<double>(rng() % 1000) / 1000.0;
    Graph g = to_graph(n, oracle::random_edges(n, p, rng));
    std::vector<Vertex> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Graph h = g.relabeled(perm);
    const std::size_t k = 1 + rng() % 3;
    self_ok += ehr_winner(g, h, k) == Winner::Duplicator;
    oracle::EdgeList eg, eh;
    for (auto [u, v] : g.edges()) eg.emplace_back(u, v);
    for (auto [u, v] : h.edges()) eh.emplace_back(u, v);
    oracle_ok += oracle::ehr_duplicator_wins(n, eg, n, eh, static_cast<int>(k));
  }
  const bool k3p3 = ehr_winner(testing_support::complete_graph(3), testing_support::path_graph(3), 2) == Winner::Spoiler;
  const bool c5c6 = ehr_winner(testing_support::cycle_graph(5), testing_support::cycle_graph(6), 3) == Winner::Spoiler;
  const bool k3p3_oracle = !oracle::ehr_duplicator_wins(3, {{0, 1}, {1, 2}, {0, 2}}, 3, {{0, 1}, {1, 2}}, 2);
  out.pass = self_ok == kGraphs && oracle_ok == kGraphs && k3p3 && c5c6 && k3p3_oracle;
  std::ostringstream msg;
  msg << "EHR(G, relabelled G) Duplicator " << self_ok << "/" << kGraphs << " (oracle " << oracle_ok
      << "); K3/P3 k=2 " << (k3p3 ? "Spoiler" : "Duplicator") << "; C5/C6 k=3 " << (c5c6 ? "Spoiler" : "Duplicator");
  out.detail = msg.str();
  return out;
}

// --- tree-strategy certification -----------------------------------------------

Outcome tree_lemma() {
  Outcome out;
  std::size_t pairs = 0, brute_dup = 0, strategy_ok = 0, groups_total = 0;
  for (std::uint32_t k = 1; k <= 2; ++k) {
    TypeTable table(k);
    for (int m = 0; m <= 3; ++m) {
      std::map<TreeTypeId, std::vector<std::vector<int>>> groups;
      std::map<TreeTypeId, std::set<std::string>> seen;
      for (int n = 1; n <= 8; ++n)
        for (auto& p : oracle::rooted_tree_classes(n)) {
          auto t = oracle::truncate_parents(p, m);
          TreeTypeId id = tree_type(RootedTreeView::from_parent_array(t), static_cast<std::size_t>(m), table);
          if (seen[id].insert(oracle::iso_class(t)).second) groups[id].push_back(t);
        }
      groups_total += groups.size();
      for (auto& [id, trees] : groups)
        for (auto& x : trees)
          for (auto& y : trees) {
            ++pairs;
            auto a = RootedTreeView::from_parent_array(x), b = RootedTreeView::from_parent_array(y);
            GameConfig cfg{Arena::from_tree(a), Arena::from_tree(b), k, {{0, 0}}, Variant::DEHR};
            brute_dup += brute_force_winner(cfg) == Winner::Duplicator;
            // Every Spoiler sequence, which covers the minimax-optimal one.
            strategy_ok += testing_support::exhaustive_tree_strategy(x, y, static_cast<std::size_t>(m), k, table) > 0;
          }
    }
  }
  out.pass = pairs > 0 && brute_dup == pairs && strategy_ok == pairs;
  std::ostringstream msg;
  msg << pairs << " same-type pairs in " << groups_total << " classes (k<=2, m<=3, <=8 vertices); DEHR brute force "
      << "Duplicator on " << brute_dup << ", strategy survived every Spoiler line on " << strategy_ok;
  out.detail = msg.str();
  return out;
}

// --- strategy soundness ----------------------------------------------------------

struct SoundnessTally {
  std::size_t pairs = 0, games = 0, lost = 0, violations = 0, exhausted = 0;
  std::size_t oracle_decided = 0, oracle_dup = 0, oracle_skipped = 0;
  std::size_t minimax_games = 0, minimax_lost = 0;
  std::string first_problem;
};

void run_pair(const Graph& left, const Graph& right, const Thresholds& th, TypeTable& table, std::mt19937_64& rng,
              SoundnessTally& t, bool with_oracle) {
  ++t.pairs;
  for (int s = 0; s < 2; ++s) {
    const std::uint64_t seed = rng();
    auto make = [&]() -> std::unique_ptr<Spoiler> {
      if (s == 1) return std::make_unique<AdversarialSpoiler>(seed);
      return std::make_unique<RandomSpoiler>(seed);
    };
    ++t.games;
    try {
      auto game = testing_support::play_enriched(left, right, th, table, make);
      if (!game.won) ++t.lost;
      for (const auto& r : game.state.rounds)
        for (const auto& v : r.audit) {
          ++t.violations;
          if (t.first_problem.empty()) t.first_problem = v.condition + ": " + v.detail;
        }
    } catch (const ResourceExhausted& e) {
      ++t.exhausted;
      if (t.first_problem.empty()) t.first_problem = e.what();
    }
  }
  if (!with_oracle) return;
  if (left.vertex_count() > kOracleVertexCap || right.vertex_count() > kOracleVertexCap) {
    ++t.oracle_skipped;
    return;
  }
  try {
    GameConfig cfg{Arena::from_graph(left), Arena::from_graph(right), th.k, {}, Variant::EHR};
    Winner w = brute_force_winner(cfg, kOracleBudget);
    ++t.oracle_decided;
    t.oracle_dup += w == Winner::Duplicator;
    if (w != Winner::Duplicator && t.first_problem.empty()) t.first_problem = "oracle says Spoiler";
  } catch (const BudgetExceeded&) {
    ++t.oracle_skipped;
    return;
  }
  ++t.minimax_games;
  try {
    auto game = testing_support::play_enriched(left, right, th, table,
                                               [] { return std::make_unique<MinimaxSpoiler>(kOracleBudget); });
    bool clean = game.won;
    for (const auto& r : game.state.rounds) clean = clean && r.audit.empty();
    t.minimax_lost += !clean;
  } catch (const Error&) {
    ++t.minimax_lost;
  }
}

Outcome soundness() {
  SoundnessTally t;
  std::mt19937_64 rng(31337);
  // Scaled thresholds (base 3, shift 2): short cycles <= 2*3^(k+1).
  const std::pair<std::size_t, int> plan[] = {{1, 60}, {2, 80}, {3, 40}};
  for (auto [k, count] : plan) {
    TypeTable table(static_cast<std::uint32_t>(k));
    auto th = Thresholds::make(k, 3, 2);
    for (int i = 0; i < count; ++i) {
      Graph src = testing_support::random_cyclic_structure(3 + static_cast<int>(rng() % 10),
                                                           static_cast<int>(rng() % 3), 8, rng);
      auto [left, right] = testing_support::model_pair(src, th, table, rng);
      if (rng() % 2) std::swap(left, right);
      run_pair(left, right, th, table, rng, t, false);
    }
  }
  // Unscaled thresholds for one round, small components.
  {
    TypeTable table(1);
    auto th = Thresholds::make(1);
    for (int i = 0; i < 30; ++i) {
      Graph src = testing_support::random_cyclic_structure(3 + static_cast<int>(rng() % 6), 0, 12, rng);
      auto [left, right] = testing_support::model_pair(src, th, table, rng);
      run_pair(left, right, th, table, rng, t, false);
    }
  }
  // Oracle-sized pairs: one short cycle plus a few tiny trees.
  for (std::size_t k = 1; k <= 3; ++k) {
    TypeTable table(static_cast<std::uint32_t>(k));
    auto th = Thresholds::make(k, 3, 2);
    for (int i = 0; i < 12; ++i) {
      Graph src = testing_support::random_cyclic_structure(1 + static_cast<int>(rng() % 2), 0, 5, rng);
      ModelSpec spec(completion_vector(src, static_cast<std::uint32_t>(th.short_bound()),
                                       static_cast<std::uint32_t>(th.depth_bound()), table));
      spec.generators = all_rooted_trees(k == 3 ? 1 : 2);
      spec.richness = k;
      Graph left = build_model(spec, table);
      spec.richness = k + 1;
      spec.extra = i % 2;
      Graph right = build_model(spec, table);
      run_pair(left, right, th, table, rng, t, true);
    }
  }
  Outcome out;
  out.pass = t.pairs >= kMinSoundnessPairs && t.lost == 0 && t.violations == 0 && t.exhausted == 0 &&
             t.oracle_decided >= kMinOracleDecided && t.oracle_dup == t.oracle_decided && t.minimax_lost == 0;
  std::ostringstream msg;
  msg << t.pairs << " pairs, " << t.games << " games: " << t.lost << " lost, " << t.violations << " audit violations, "
      << t.exhausted << " exhausted; oracle decided " << t.oracle_decided << " (Duplicator " << t.oracle_dup
      << ", skipped " << t.oracle_skipped << "); minimax games " << t.minimax_games << ", lost " << t.minimax_lost;
  if (!t.first_problem.empty()) msg << "; first problem: " << t.first_problem;
  out.detail = msg.str();
  return out;
}

// --- mutual exclusivity ------------------------------------------------------------

Outcome exclusivity() {
  TypeTable table(1);
  auto all = enumerate_completion_vectors(3, 1, table);
  std::size_t exactly_one = 0, own_match = 0;
  constexpr std::size_t kSamples = 1000;
  for (std::size_t t = 0; t < kSamples; ++t) {
    // Mix of regimes so that both zero and non-zero entries occur.
    SampleConfig cfg{200, 0.5 + 0.2 * static_cast<double>(t % 10), 1, 4242, 1};
    Graph g = sample_gnp(cfg, t);
    std::size_t hits = 0;
    const CompletionVector* hit = nullptr;
    for (const auto& v : all)
      if (satisfies_completion(g, v, table)) {
        ++hits;
        hit = &v;
      }
    exactly_one += hits == 1;
    own_match += hits == 1 && *hit == completion_vector(g, 3, 1, table);
  }
  Outcome out;
  out.pass = exactly_one == kSamples && own_match == kSamples;
  out.detail = std::to_string(all.size()) + " consistent vectors for (k=1, M1=3, M2=1); exactly one satisfied on " +
               std::to_string(exactly_one) + "/" + std::to_string(kSamples) + " samples, equal to the graph's own on " +
               std::to_string(own_match);
  return out;
}

// --- Monte Carlo criteria ---------------------------------------------------------

const AnalyticCheck* find_check(const EstimateReport& r, const std::string& tag) {
  for (const auto& a : r.analytic)
    if (a.tag == tag) return &a;
  return nullptr;
}

Outcome no_short_cycles() {
  Outcome out;
  SampleConfig cfg{3000, 1.0, 2000, 7, 1};
  auto m3 = estimate_event(cfg, event_no_short_cycles(3));
  const double target = std::exp(-1.0 / 6.0);
  const bool near = std::abs(m3.point - target) <= kNoCycleTolerance;

  cfg.seed = 8;
  auto m4 = estimate_event(cfg, event_no_short_cycles(4));
  const auto* paper = find_check(m4, "paper");
  const auto* standard = find_check(m4, "standard");
  bool flags_consistent = paper && standard;
  int inside = 0;
  for (const auto* a : {paper, standard}) {
    if (!a) continue;
    const bool in = a->value >= m4.ci99_low && a->value <= m4.ci99_high;
    flags_consistent = flags_consistent && in == a->inside_ci99;
    inside += in;
  }
  out.pass = near && flags_consistent && inside == 1;
  std::string verdict = !paper || !standard ? "missing"
                        : inside != 1       ? "undecided"
                        : paper->inside_ci99 ? "paper formula consistent, standard formula flagged"
                                             : "standard formula consistent, paper formula flagged";
  out.detail = fmt("M1=3 point %.4f vs %.4f; M1=4 point %.4f, 99%% CI [%.4f, ", m3.point, target, m4.point,
                   m4.ci99_low) +
               fmt("%.4f], paper %.4f, standard %.4f: ", m4.ci99_high, paper ? paper->value : NAN,
                   standard ? standard->value : NAN) +
               verdict;
  return out;
}

Outcome cycle_key_expectations() {
  Outcome out;
  std::ostringstream msg;
  struct Case {
    const char* name;
    Event event;
    double want;
    std::uint64_t seed;
  };
  Case cases[] = {{"triangles", event_cycle_count(3), 1.0 / 6.0, 11},
                  {"4-cycles", event_cycle_count(4), 1.0 / 8.0, 12},
                  {"(3,1,2)-keys", event_key_count(3, 1, 2), 1.0 / 4.0, 13}};
  for (auto& c : cases) {
    auto r = estimate_event(SampleConfig{2000, 1.0, 2000, c.seed, 1}, c.event);
    const double z = (r.point - c.want) / r.std_error;
    const bool ok = std::abs(z) <= kSigmas;
    out.pass = out.pass && ok;
    msg << c.name << fmt(" %.4f+-%.4f vs %.4f (z=%.2f)", r.point, r.std_error, c.want, z) << (ok ? "" : " OUT") << "; ";
  }
  out.detail = msg.str();
  return out;
}

Outcome picture_limit_check() {
  Graph tri = testing_support::cycle_graph(3);
  Picture h = extract_picture(tri, 3, 0);
  const double want = std::exp(-1.0 / 6.0) / 6.0;
  const double formula = picture_limit(h, 1.0, 3);
  auto r = estimate_event(SampleConfig{3000, 1.0, 4000, 21, 1}, event_picture(h));
  // Diagnostic only: same samples, one triangle anywhere, complex components included.
  Event one_triangle{"one-triangle", Event::Kind::Probability,
                     [](const Graph& g) { return count_cycles(g, 3) == 1 ? 1.0 : 0.0; }, {}};
  auto any = estimate_event(SampleConfig{3000, 1.0, 4000, 21, 1}, one_triangle);
  Outcome out;
  out.pass = std::abs(formula - want) < 1e-12 && want >= r.ci99_low && want <= r.ci99_high;
  out.detail = fmt("estimate %.4f, 99%% CI [%.4f, %.4f], limit %.4f", r.point, r.ci99_low, r.ci99_high, want) +
               fmt("; exactly one triangle in any component: %.4f, CI [%.4f, %.4f]", any.point, any.ci99_low,
                   any.ci99_high);
  return out;
}

Outcome isolated_copy_rates() {
  Outcome out;
  std::ostringstream msg;
  struct Case {
    const char* name;
    Graph tree;
    double want;
  };
  Case cases[] = {{"vertex", Graph(1, {}), std::exp(-1.0)},
                  {"edge", testing_support::path_graph(2), std::exp(-2.0) / 2},
                  {"P3", testing_support::path_graph(3), std::exp(-3.0) / 2}};
  std::uint64_t seed = 31;
  for (auto& c : cases) {
    auto r = estimate_event(SampleConfig{3000, 1.0, 1000, seed++, 1}, event_tree_copies(c.tree));
    const double z = (r.point - c.want) / r.std_error;
    const bool ok = std::abs(z) <= kSigmas && std::abs(expected_tree_copies(c.tree, 1.0) - c.want) < 1e-12;
    out.pass = out.pass && ok;
    msg << c.name << fmt(" %.5f+-%.5f vs %.5f (z=%.2f)", r.point, r.std_error, c.want, z) << (ok ? "" : " OUT")
        << "; ";
  }
  out.detail = msg.str();
  return out;
}

}  // namespace

int main() {
  report("type-enumeration-counts", kTypeCountsSeconds, type_counts);
  report("canonicalization-oracle", kCanonicalSeconds, canonicalization);
  report("game-oracle-sanity", kGameSanitySeconds, game_sanity);
  report("tree-strategy-certification", kTreeLemmaSeconds, tree_lemma);
  report("strategy-soundness", kSoundnessSeconds, soundness);
  report("completion-mutual-exclusivity", kExpectationSeconds, exclusivity);
  report("no-short-cycle-limit", kNoCycleSeconds, no_short_cycles);
  report("cycle-and-key-expectations", kExpectationSeconds, cycle_key_expectations);
  report("picture-limit", kPictureSeconds, picture_limit_check);
  report("isolated-copy-rates", kIsolatedSeconds, isolated_copy_rates);
  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
