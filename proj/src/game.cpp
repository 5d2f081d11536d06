#include "ehrlab/game.hpp"

#include <algorithm>

#include "ehrlab/error.hpp"

namespace ehrlab {

const char* to_string(Variant v) { return v == Variant::EHR ? "EHR" : "DEHR"; }
const char* to_string(Side s) { return s == Side::Left ? "left" : "right"; }
const char* to_string(Winner w) { return w == Winner::Spoiler ? "Spoiler" : "Duplicator"; }
Side other(Side s) { return s == Side::Left ? Side::Right : Side::Left; }

namespace {
constexpr std::size_t kDenseDistanceLimit = 1024;
}

Arena Arena::from_graph(const Graph& g) {
  Arena a;
  const std::size_t n = g.vertex_count();
  a.ids_.resize(n);
  a.adj_.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    a.ids_[v] = static_cast<Vertex>(v);
    a.index_[static_cast<Vertex>(v)] = static_cast<std::uint32_t>(v);
    for (Vertex w : g.neighbors(static_cast<Vertex>(v))) a.adj_[v].push_back(w);
  }
  return a;
}

Arena Arena::from_tree(const RootedTreeView& t) {
  Arena a;
  a.tree_ = true;
  const std::size_t n = t.size();
  a.ids_.assign(t.vertices().begin(), t.vertices().end());
  a.adj_.resize(n);
  a.parent_.resize(n);
  a.depth_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    a.index_[a.ids_[i]] = static_cast<std::uint32_t>(i);
    a.parent_[i] = t.parent_index(i);
    a.depth_[i] = static_cast<std::uint32_t>(t.depth_at(i));
    if (a.parent_[i] >= 0) {
      auto p = static_cast<std::size_t>(a.parent_[i]);
      a.adj_[i].push_back(static_cast<std::uint32_t>(p));
      a.adj_[p].push_back(static_cast<std::uint32_t>(i));
    }
  }
  for (auto& list : a.adj_) std::sort(list.begin(), list.end());
  if (n <= kDenseDistanceLimit) {
    a.dist_.assign(n * n, 0);
    // BFS order: the parent's row is complete before the child's row is filled.
    for (std::size_t i = 1; i < n; ++i) {
      auto p = static_cast<std::size_t>(a.parent_[i]);
      for (std::size_t j = 0; j < i; ++j) {
        std::uint16_t d = static_cast<std::uint16_t>(a.dist_[p * n + j] + 1);
        a.dist_[i * n + j] = a.dist_[j * n + i] = d;
      }
    }
  }
  return a;
}

bool Arena::contains(Vertex v) const { return index_.count(v) != 0; }

std::size_t Arena::local(Vertex v) const {
  auto it = index_.find(v);
  if (it == index_.end()) throw InvalidArgument("vertex " + std::to_string(v) + " is not in the arena");
  return it->second;
}

bool Arena::adjacent_local(std::size_t a, std::size_t b) const {
  return std::binary_search(adj_[a].begin(), adj_[a].end(), static_cast<std::uint32_t>(b));
}

std::size_t Arena::distance_local(std::size_t a, std::size_t b) const {
  if (!tree_) throw InvalidArgument("distances are only defined on tree arenas");
  const std::size_t n = ids_.size();
  if (!dist_.empty()) return dist_[a * n + b];
  std::size_t d = 0;
  while (a != b) {
    if (depth_[a] >= depth_[b])
      a = static_cast<std::size_t>(parent_[a]);
    else
      b = static_cast<std::size_t>(parent_[b]);
    ++d;
  }
  return d;
}

namespace {

// Pairwise condition between two pebble pairs (local indices).
bool pair_ok(const GameConfig& cfg, std::size_t x1, std::size_t y1, std::size_t x2, std::size_t y2) {
  if ((x1 == x2) != (y1 == y2)) return false;
  if (cfg.variant == Variant::EHR)
    return cfg.left.adjacent_local(x1, x2) == cfg.right.adjacent_local(y1, y2);
  if (cfg.left.distance_local(x1, x2) != cfg.right.distance_local(y1, y2)) return false;
  auto lp = [&](std::size_t c, std::size_t p) { return cfg.left.parent_local(c) == static_cast<std::int64_t>(p); };
  auto rp = [&](std::size_t c, std::size_t p) { return cfg.right.parent_local(c) == static_cast<std::int64_t>(p); };
  return lp(x2, x1) == rp(y2, y1) && lp(x1, x2) == rp(y1, y2);
}

void require_variant(const GameConfig& cfg, Variant v) {
  if (cfg.variant != v) throw InvalidArgument(std::string("configuration is not a ") + to_string(v) + " game");
  if (v == Variant::DEHR && !(cfg.left.is_tree() && cfg.right.is_tree()))
    throw InvalidArgument("DEHR needs rooted-tree arenas on both sides");
}

bool all_pairs_ok(const GameConfig& cfg, const PlayHistory& h) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (auto [x, y] : cfg.designated) pairs.emplace_back(cfg.left.local(x), cfg.right.local(y));
  for (const Move& m : h.moves) pairs.emplace_back(cfg.left.local(m.left), cfg.right.local(m.right));
  for (std::size_t i = 0; i < pairs.size(); ++i)
    for (std::size_t j = i + 1; j < pairs.size(); ++j)
      if (!pair_ok(cfg, pairs[i].first, pairs[i].second, pairs[j].first, pairs[j].second)) return false;
  return true;
}

}  // namespace

bool ehr_win_check(const GameConfig& cfg, const PlayHistory& h) {
  require_variant(cfg, Variant::EHR);
  return all_pairs_ok(cfg, h);
}

bool dehr_win_check(const GameConfig& cfg, const PlayHistory& h) {
  require_variant(cfg, Variant::DEHR);
  return all_pairs_ok(cfg, h);
}

bool win_check(const GameConfig& cfg, const PlayHistory& h) {
  return cfg.variant == Variant::EHR ? ehr_win_check(cfg, h) : dehr_win_check(cfg, h);
}

GameSolver::GameSolver(const GameConfig& cfg, std::size_t node_budget) : cfg_(cfg), budget_(node_budget) {
  require_variant(cfg_, cfg_.variant);
}

std::vector<GameSolver::LocalPair> GameSolver::to_local(const std::vector<VertexPair>& extra) const {
  std::vector<LocalPair> out;
  for (auto [x, y] : cfg_.designated)
    out.emplace_back(static_cast<std::uint32_t>(cfg_.left.local(x)), static_cast<std::uint32_t>(cfg_.right.local(y)));
  for (auto [x, y] : extra)
    out.emplace_back(static_cast<std::uint32_t>(cfg_.left.local(x)), static_cast<std::uint32_t>(cfg_.right.local(y)));
  return out;
}

bool GameSolver::consistent(const std::vector<LocalPair>& pairs, LocalPair p) const {
  for (const auto& q : pairs)
    if (!pair_ok(cfg_, q.first, q.second, p.first, p.second)) return false;
  return true;
}

std::string GameSolver::key(const std::vector<LocalPair>& pairs, std::size_t rounds) const {
  std::vector<LocalPair> sorted = pairs;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::string k;
  k.reserve(sorted.size() * 8 + 1);
  k.push_back(static_cast<char>(rounds));
  for (auto [a, b] : sorted) {
    k.append(reinterpret_cast<const char*>(&a), sizeof a);
    k.append(reinterpret_cast<const char*>(&b), sizeof b);
  }
  return k;
}

bool GameSolver::reply_wins(std::vector<LocalPair>& pairs, std::size_t rounds, LocalPair p) {
  if (!consistent(pairs, p)) return false;
  pairs.push_back(p);
  bool ok = win(pairs, rounds);
  pairs.pop_back();
  return ok;
}

bool GameSolver::win(std::vector<LocalPair>& pairs, std::size_t rounds) {
  if (rounds == 0) return true;
  std::string k = key(pairs, rounds);
  if (auto it = memo_.find(k); it != memo_.end()) return it->second;
  if (++nodes_ > budget_) throw BudgetExceeded("game search exceeded " + std::to_string(budget_) + " positions");

  bool result = true;
  for (Side side : {Side::Left, Side::Right}) {
    const Arena& mine = side == Side::Left ? cfg_.left : cfg_.right;
    const Arena& theirs = side == Side::Left ? cfg_.right : cfg_.left;
    std::vector<bool> pebbled(mine.size(), false);
    for (auto [a, b] : pairs) pebbled[side == Side::Left ? a : b] = true;
    for (std::uint32_t a = 0; a < mine.size() && result; ++a) {
      // A repeated pick only passes a round, which never helps Spoiler.
      if (pebbled[a]) continue;
      bool answered = false;
      for (std::uint32_t b = 0; b < theirs.size() && !answered; ++b)
        answered = reply_wins(pairs, rounds - 1, side == Side::Left ? LocalPair{a, b} : LocalPair{b, a});
      result = answered;
    }
    if (!result) break;
  }
  memo_.emplace(std::move(k), result);
  return result;
}

bool GameSolver::duplicator_wins(const std::vector<VertexPair>& extra, std::size_t rounds) {
  auto pairs = to_local(extra);
  for (std::size_t i = 0; i < pairs.size(); ++i)
    for (std::size_t j = i + 1; j < pairs.size(); ++j)
      if (!pair_ok(cfg_, pairs[i].first, pairs[i].second, pairs[j].first, pairs[j].second)) return false;
  return win(pairs, rounds);
}

Winner GameSolver::winner() { return duplicator_wins({}, cfg_.rounds) ? Winner::Duplicator : Winner::Spoiler; }

std::optional<std::pair<Side, Vertex>> GameSolver::winning_spoiler_move(const std::vector<VertexPair>& extra,
                                                                       std::size_t rounds) {
  if (rounds == 0) return std::nullopt;
  for (Side side : {Side::Left, Side::Right}) {
    const Arena& mine = side == Side::Left ? cfg_.left : cfg_.right;
    for (Vertex v : mine.vertices())
      if (winning_replies(extra, rounds, side, v).empty()) return std::make_pair(side, v);
  }
  return std::nullopt;
}

std::vector<Vertex> GameSolver::winning_replies(const std::vector<VertexPair>& extra, std::size_t rounds, Side side,
                                                Vertex pick) {
  if (rounds == 0) throw InvalidArgument("no rounds left to reply in");
  auto pairs = to_local(extra);
  const Arena& mine = side == Side::Left ? cfg_.left : cfg_.right;
  const Arena& theirs = side == Side::Left ? cfg_.right : cfg_.left;
  auto a = static_cast<std::uint32_t>(mine.local(pick));
  std::vector<Vertex> out;
  for (std::uint32_t b = 0; b < theirs.size(); ++b)
    if (reply_wins(pairs, rounds - 1, side == Side::Left ? LocalPair{a, b} : LocalPair{b, a}))
      out.push_back(theirs.vertex(b));
  std::sort(out.begin(), out.end());
  return out;
}

Winner brute_force_winner(const GameConfig& cfg, std::size_t node_budget) {
  return GameSolver(cfg, node_budget).winner();
}

bool winnable(const GameConfig& cfg, std::size_t node_budget) {
  return brute_force_winner(cfg, node_budget) == Winner::Duplicator;
}

std::vector<Vertex> corresponding_vertices(const GameConfig& cfg, Vertex x, Side side, std::size_t node_budget) {
  GameSolver solver(cfg, node_budget);
  if (cfg.rounds == 0) throw InvalidArgument("corresponding vertices need at least one round");
  if (solver.winner() != Winner::Duplicator) throw NotWinnable("configuration is not winnable");
  return solver.winning_replies({}, cfg.rounds, side, x);
}

}  // namespace ehrlab
