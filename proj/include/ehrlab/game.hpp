#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ehrlab/graph.hpp"

namespace ehrlab {

enum class Variant { EHR, DEHR };
enum class Side { Left, Right };
enum class Winner { Spoiler, Duplicator };

const char* to_string(Variant v);
const char* to_string(Side s);
const char* to_string(Winner w);
Side other(Side s);

// A structure a game is played on. Vertex ids are those of the source graph
// or tree view; internally they are mapped to dense local indices.
class Arena {
 public:
  static Arena from_graph(const Graph& g);
  // Rooted tree: adjacency is the parent relation, distances are tree distances.
  static Arena from_tree(const RootedTreeView& t);

  bool is_tree() const { return tree_; }
  std::size_t size() const { return ids_.size(); }
  bool contains(Vertex v) const;
  std::size_t local(Vertex v) const;  // InvalidArgument if absent
  Vertex vertex(std::size_t i) const { return ids_[i]; }
  std::span<const Vertex> vertices() const { return ids_; }

  bool adjacent_local(std::size_t a, std::size_t b) const;
  // Tree arenas only. -1 for the root.
  std::int64_t parent_local(std::size_t a) const { return parent_[a]; }
  std::size_t distance_local(std::size_t a, std::size_t b) const;

 private:
  bool tree_ = false;
  std::vector<Vertex> ids_;
  std::unordered_map<Vertex, std::uint32_t> index_;
  std::vector<std::vector<std::uint32_t>> adj_;  // sorted local adjacency
  std::vector<std::int64_t> parent_;
  std::vector<std::uint32_t> depth_;
  std::vector<std::uint16_t> dist_;  // dense all-pairs table for small trees
};

using VertexPair = std::pair<Vertex, Vertex>;  // (left, right)

struct GameConfig {
  Arena left;
  Arena right;
  std::size_t rounds = 0;
  std::vector<VertexPair> designated;
  Variant variant = Variant::EHR;
};

struct Move {
  Side side;
  Vertex left;
  Vertex right;
};

struct PlayHistory {
  std::vector<Move> moves;
};

// Win conditions over designated and played pairs.
bool ehr_win_check(const GameConfig& cfg, const PlayHistory& h);
bool dehr_win_check(const GameConfig& cfg, const PlayHistory& h);
bool win_check(const GameConfig& cfg, const PlayHistory& h);

inline constexpr std::size_t kDefaultNodeBudget = 20'000'000;

// Exhaustive minimax with memoization on (pair set, rounds left).
// BudgetExceeded once more than node_budget positions have been expanded.
class GameSolver {
 public:
  GameSolver(const GameConfig& cfg, std::size_t node_budget = kDefaultNodeBudget);

  Winner winner();
  // Does Duplicator win from designated + extra pairs with the given rounds?
  bool duplicator_wins(const std::vector<VertexPair>& extra, std::size_t rounds);
  // A Spoiler move that wins against every reply, if one exists.
  std::optional<std::pair<Side, Vertex>> winning_spoiler_move(const std::vector<VertexPair>& extra, std::size_t rounds);
  // Replies to Spoiler's pick that keep the position winning with rounds-1 left, ascending by id.
  std::vector<Vertex> winning_replies(const std::vector<VertexPair>& extra, std::size_t rounds, Side side, Vertex pick);

  std::size_t nodes() const { return nodes_; }

 private:
  using LocalPair = std::pair<std::uint32_t, std::uint32_t>;
  bool consistent(const std::vector<LocalPair>& pairs, LocalPair p) const;
  bool win(std::vector<LocalPair>& pairs, std::size_t rounds);
  bool reply_wins(std::vector<LocalPair>& pairs, std::size_t rounds, LocalPair p);
  std::vector<LocalPair> to_local(const std::vector<VertexPair>& extra) const;
  std::string key(const std::vector<LocalPair>& pairs, std::size_t rounds) const;

  GameConfig cfg_;
  std::size_t budget_;
  std::size_t nodes_ = 0;
  std::unordered_map<std::string, bool> memo_;
};

Winner brute_force_winner(const GameConfig& cfg, std::size_t node_budget = kDefaultNodeBudget);
bool winnable(const GameConfig& cfg, std::size_t node_budget = kDefaultNodeBudget);
// Every y with designated + (x, y) winnable for rounds-1, ascending. NotWinnable
// if the configuration itself is not winnable.
std::vector<Vertex> corresponding_vertices(const GameConfig& cfg, Vertex x, Side side = Side::Left,
                                           std::size_t node_budget = kDefaultNodeBudget);

}  // namespace ehrlab
