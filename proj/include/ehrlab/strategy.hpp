#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ehrlab/error.hpp"
#include "ehrlab/game.hpp"
#include "ehrlab/graph.hpp"
#include "ehrlab/types.hpp"

namespace ehrlab {

// Distance thresholds of the k-round strategy. With E = k + 3 - shift:
//   short cycles have length <= 2 b^E and completion depth is b^E;
//   x_i, x_j are close when within 2 b^(E-1-max(i,j));
//   x_i is shallow when within 2 b^(E-1-i) of its cycle.
// base 3 and shift 0 give the unscaled values. The proof's inequalities need
// base >= 3; shift <= 2 keeps every threshold integral.
struct Thresholds {
  std::size_t k = 1;
  std::size_t base = 3;
  std::size_t shift = 0;

  static Thresholds make(std::size_t k, std::size_t base = 3, std::size_t shift = 0);  // InvalidArgument

  std::size_t exponent() const { return k + 3 - shift; }
  std::size_t power(std::size_t e) const;
  std::size_t short_bound() const { return 2 * power(exponent()); }
  std::size_t depth_bound() const { return power(exponent()); }
  std::size_t close(std::size_t i, std::size_t j) const;
  std::size_t shallow(std::size_t i) const;
  // Depth of the hanging trees matched for a cycle first touched in round beta.
  std::size_t cycle_depth(std::size_t beta) const;
  // Radius of the ball around an anchor first used in round i.
  std::size_t ball_radius(std::size_t i) const;
  // Allowed distance between x_i and its anchor.
  std::size_t cycle_slack(std::size_t beta, std::size_t i) const;
  std::size_t tree_slack(std::size_t beta, std::size_t i) const;

  nlohmann::json to_json() const;
};

// The two structures and everything derived from them. Caches make a context
// unsuitable for concurrent use; give each game its own.
class StrategyContext {
 public:
  StrategyContext(Graph left, Graph right, Thresholds th, TypeTable& table);

  const Graph& graph(Side s) const { return side(s).graph; }
  const Thresholds& thresholds() const { return th_; }
  TypeTable& table() const { return table_; }
  std::size_t rounds() const { return th_.k; }

  std::uint32_t component_of(Side s, Vertex v) const { return side(s).dec.component_of[v]; }
  const Component& component(Side s, std::uint32_t c) const { return side(s).dec.components[c]; }
  std::size_t component_count(Side s) const { return side(s).dec.components.size(); }
  // Unicyclic view of v's component if it is short, else null.
  const UnicyclicView* short_cycle(Side s, Vertex v) const;
  bool is_short_cycle_vertex(Side s, Vertex v) const;
  bool shallow(Side s, Vertex v, std::size_t round) const;
  Distance distance(Side s, Vertex a, Vertex b) const;

  // Hanging-tree types at depth m in cycle order.
  const std::vector<TreeTypeId>& hanging_types(Side s, std::uint32_t comp, std::size_t m) const;
  CycleTypeId cycle_type_at(Side s, std::uint32_t comp, std::size_t m) const;
  // Tree-component vertices w with type(component rooted at w, r) = sigma, ascending.
  const std::vector<Vertex>& tree_roots_of_type(Side s, TreeTypeId sigma, std::size_t r) const;

 private:
  struct SideData {
    Graph graph;
    Decomposition dec;
    std::unordered_map<std::uint32_t, UnicyclicView> cycles;  // short unicyclic components
    mutable std::unordered_map<Vertex, std::vector<Distance>> dist;
    mutable std::map<std::pair<std::uint32_t, std::size_t>, std::vector<TreeTypeId>> hanging;
    mutable std::map<std::size_t, std::map<TreeTypeId, std::vector<Vertex>>> roots;
  };
  const SideData& side(Side s) const { return s == Side::Left ? left_ : right_; }

  SideData left_, right_;
  Thresholds th_;
  TypeTable& table_;
};

enum class StrategyCase { Repeat, CloseShallow, CloseDeep, FarShallow, FarDeep };
const char* to_string(StrategyCase c);

struct Violation {
  std::string condition;
  std::string detail;
};

struct StrategyRound {
  Side side = Side::Left;  // side of Spoiler's pick
  Vertex x = 0;            // left vertex
  Vertex y = 0;            // right vertex
  Vertex u = 0;            // left anchor
  Vertex v = 0;            // right anchor
  StrategyCase label = StrategyCase::FarDeep;
  std::vector<Violation> audit;  // filled by play() after the round
};

// Rounds are 1-based in the accessors below.
struct StrategyState {
  std::vector<StrategyRound> rounds;

  PlayHistory history() const;
  std::vector<VertexPair> auxiliary() const;
  // Round indices grouped by shared anchor on one side.
  std::map<Vertex, std::vector<std::size_t>> clusters(Side s) const;
  // Short unicyclic component -> rounds whose anchor is one of its cycle vertices.
  std::map<std::uint32_t, std::vector<std::size_t>> occupancy(const StrategyContext& ctx, Side s) const;
  std::optional<std::size_t> first_touch(const StrategyContext& ctx, Side s, std::uint32_t comp) const;
};

// Thrown when the finite structure lacks a free tree component realizing the
// ball around Spoiler's pick. 'ball' is that ball (a realization of the
// missing type) and 'needed_on' the side that lacks it.
class MissingTreeComponent : public ResourceExhausted {
 public:
  MissingTreeComponent(const std::string& message, Graph ball, Side needed_on)
      : ResourceExhausted(message), ball_(std::move(ball)), side_(needed_on) {}
  const Graph& ball() const { return ball_; }
  Side needed_on() const { return side_; }

 private:
  Graph ball_;
  Side side_;
};

// Duplicator's reply to Spoiler picking 'pick' on 'side'. Appends the round to
// the state and returns it. InvalidArgument for an illegal move or a finished
// game, ResourceExhausted when a required free component is missing,
// ContractViolation when the state cannot have come from this strategy.
const StrategyRound& respond(const StrategyContext& ctx, StrategyState& state, Side side, Vertex pick);

// Every invariant of the strategy that fails on the current state.
std::vector<Violation> audit(const StrategyContext& ctx, const StrategyState& state,
                             std::size_t node_budget = kDefaultNodeBudget);

class Spoiler {
 public:
  virtual ~Spoiler() = default;
  virtual std::pair<Side, Vertex> next(const StrategyContext& ctx, const StrategyState& state) = 0;
};

class RandomSpoiler : public Spoiler {
 public:
  explicit RandomSpoiler(std::uint64_t seed) : rng_(seed) {}
  std::pair<Side, Vertex> next(const StrategyContext& ctx, const StrategyState& state) override;

 private:
  std::mt19937_64 rng_;
};

// Favours moves on the strategy's boundaries: distances just inside or outside
// the close threshold of earlier picks, depths at the shallow threshold, cycle
// vertices and repeats.
class AdversarialSpoiler : public Spoiler {
 public:
  explicit AdversarialSpoiler(std::uint64_t seed) : rng_(seed) {}
  std::pair<Side, Vertex> next(const StrategyContext& ctx, const StrategyState& state) override;

 private:
  std::mt19937_64 rng_;
};

// Plays a winning Spoiler move of the exhaustive search when one exists,
// otherwise the lowest move. Only for structures small enough to solve.
class MinimaxSpoiler : public Spoiler {
 public:
  explicit MinimaxSpoiler(std::size_t node_budget = kDefaultNodeBudget) : budget_(node_budget) {}
  std::pair<Side, Vertex> next(const StrategyContext& ctx, const StrategyState& state) override;

 private:
  std::size_t budget_;
  std::unique_ptr<GameSolver> solver_;
  const StrategyContext* solved_for_ = nullptr;
};

// Plays all rounds; audits after every round when requested.
StrategyState play(const StrategyContext& ctx, Spoiler& spoiler, bool audit_rounds = true,
                   std::size_t node_budget = kDefaultNodeBudget);
// EHR win check on the moves of the state.
bool strategy_won(const StrategyContext& ctx, const StrategyState& state);

nlohmann::json transcript_to_json(const StrategyContext& ctx, const StrategyState& state);
StrategyState transcript_from_json(const nlohmann::json& j);

}  // namespace ehrlab
