#include "ehrlab/strategy.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "ehrlab/tree_strategy.hpp"

namespace ehrlab {

// --- thresholds ------------------------------------------------------------

Thresholds Thresholds::make(std::size_t k, std::size_t base, std::size_t shift) {
  if (k == 0) throw InvalidArgument("the game needs at least one round");
  if (base < 2) throw InvalidArgument("threshold base must be at least 2");
  if (shift > 2) throw InvalidArgument("threshold shift must be at most 2");
  Thresholds t{k, base, shift};
  std::size_t p = 1;
  for (std::size_t e = 0; e < t.exponent(); ++e) {
    if (p > std::numeric_limits<std::size_t>::max() / (2 * base)) throw InvalidArgument("thresholds overflow");
    p *= base;
  }
  return t;
}

std::size_t Thresholds::power(std::size_t e) const {
  std::size_t p = 1;
  for (std::size_t i = 0; i < e; ++i) p *= base;
  return p;
}

namespace {
void check_round(const Thresholds& t, std::size_t i) {
  if (i == 0 || i > t.k) throw InvalidArgument("round index " + std::to_string(i) + " outside 1.." + std::to_string(t.k));
}
}  // namespace

std::size_t Thresholds::close(std::size_t i, std::size_t j) const {
  check_round(*this, i);
  check_round(*this, j);
  return 2 * power(exponent() - 1 - std::max(i, j));
}

std::size_t Thresholds::shallow(std::size_t i) const {
  check_round(*this, i);
  return 2 * power(exponent() - 1 - i);
}

std::size_t Thresholds::cycle_depth(std::size_t beta) const {
  check_round(*this, beta);
  return power(exponent() - beta);
}

std::size_t Thresholds::ball_radius(std::size_t i) const {
  check_round(*this, i);
  return power(exponent() - 1 - i);
}

std::size_t Thresholds::cycle_slack(std::size_t beta, std::size_t i) const {
  if (beta > i) throw InvalidArgument("first touch after the round");
  return cycle_depth(beta) - ball_radius(i);
}

std::size_t Thresholds::tree_slack(std::size_t beta, std::size_t i) const {
  if (beta > i) throw InvalidArgument("first touch after the round");
  return ball_radius(beta) - ball_radius(i);
}

nlohmann::json Thresholds::to_json() const {
  return {{"k", k}, {"base", base}, {"shift", shift}, {"short_bound", short_bound()}, {"depth_bound", depth_bound()}};
}

// --- context ----------------------------------------------------------------

StrategyContext::StrategyContext(Graph left, Graph right, Thresholds th, TypeTable& table)
    : th_(th), table_(table) {
  if (table.cutoff() != th.k) throw InvalidArgument("type table cutoff must equal the number of rounds");
  for (Side s : {Side::Left, Side::Right}) {
    SideData& d = s == Side::Left ? left_ : right_;
    d.graph = std::move(s == Side::Left ? left : right);
    d.dec = decompose_indexed(d.graph);
    for (std::uint32_t c = 0; c < d.dec.components.size(); ++c) {
      const Component& comp = d.dec.components[c];
      if (comp.kind == ComponentKind::Complex)
        throw ContractViolation(std::string("the ") + to_string(s) + " structure has a component with two cycles");
      if (comp.kind == ComponentKind::Unicyclic && comp.cycle.size() <= th_.short_bound())
        d.cycles.emplace(c, unicyclic_view(d.graph, comp));
    }
  }
}

const UnicyclicView* StrategyContext::short_cycle(Side s, Vertex v) const {
  const SideData& d = side(s);
  auto it = d.cycles.find(d.dec.component_of[v]);
  return it == d.cycles.end() ? nullptr : &it->second;
}

bool StrategyContext::is_short_cycle_vertex(Side s, Vertex v) const {
  const UnicyclicView* u = short_cycle(s, v);
  return u && u->is_cycle_vertex(v);
}

bool StrategyContext::shallow(Side s, Vertex v, std::size_t round) const {
  const UnicyclicView* u = short_cycle(s, v);
  return u && u->depth(v) <= th_.shallow(round);
}

Distance StrategyContext::distance(Side s, Vertex a, Vertex b) const {
  const SideData& d = side(s);
  auto it = d.dist.find(a);
  if (it == d.dist.end()) it = d.dist.emplace(a, bfs_distances(d.graph, a)).first;
  return it->second[b];
}

const std::vector<TreeTypeId>& StrategyContext::hanging_types(Side s, std::uint32_t comp, std::size_t m) const {
  const SideData& d = side(s);
  auto key = std::make_pair(comp, m);
  auto it = d.hanging.find(key);
  if (it != d.hanging.end()) return it->second;
  auto cyc = d.cycles.find(comp);
  if (cyc == d.cycles.end()) throw InvalidArgument("component is not a short unicyclic component");
  std::vector<TreeTypeId> word;
  for (std::size_t p = 0; p < cyc->second.cycle_length(); ++p)
    word.push_back(tree_type(cyc->second.hanging_tree(p), m, table_));
  return d.hanging.emplace(key, std::move(word)).first->second;
}

CycleTypeId StrategyContext::cycle_type_at(Side s, std::uint32_t comp, std::size_t m) const {
  return canonical_cycle_type(hanging_types(s, comp, m), table_);
}

const std::vector<Vertex>& StrategyContext::tree_roots_of_type(Side s, TreeTypeId sigma, std::size_t r) const {
  static const std::vector<Vertex> none;
  const SideData& d = side(s);
  auto it = d.roots.find(r);
  if (it == d.roots.end()) {
    std::map<TreeTypeId, std::vector<Vertex>> by_type;
    for (const Component& comp : d.dec.components) {
      if (comp.kind != ComponentKind::Tree) continue;
      for (Vertex w : comp.vertices) by_type[tree_type(rooted_ball(d.graph, w, r), r, table_)].push_back(w);
    }
    for (auto& [type, list] : by_type) std::sort(list.begin(), list.end());
    it = d.roots.emplace(r, std::move(by_type)).first;
  }
  auto found = it->second.find(sigma);
  return found == it->second.end() ? none : found->second;
}

// --- state ----------------------------------------------------------------

const char* to_string(StrategyCase c) {
  switch (c) {
    case StrategyCase::Repeat: return "repeat";
    case StrategyCase::CloseShallow: return "close-shallow";
    case StrategyCase::CloseDeep: return "close-deep";
    case StrategyCase::FarShallow: return "far-shallow";
    case StrategyCase::FarDeep: return "far-deep";
  }
  return "?";
}

namespace {

StrategyCase parse_case(const std::string& s) {
  for (StrategyCase c : {StrategyCase::Repeat, StrategyCase::CloseShallow, StrategyCase::CloseDeep,
                         StrategyCase::FarShallow, StrategyCase::FarDeep})
    if (s == to_string(c)) return c;
  throw ParseError("unknown case label '" + s + "'");
}

Vertex pick_of(const StrategyRound& r, Side s) { return s == Side::Left ? r.x : r.y; }
Vertex anchor_of(const StrategyRound& r, Side s) { return s == Side::Left ? r.u : r.v; }

}  // namespace

PlayHistory StrategyState::history() const {
  PlayHistory h;
  for (const auto& r : rounds) h.moves.push_back({r.side, r.x, r.y});
  return h;
}

std::vector<VertexPair> StrategyState::auxiliary() const {
  std::vector<VertexPair> out;
  for (const auto& r : rounds) out.emplace_back(r.u, r.v);
  return out;
}

std::map<Vertex, std::vector<std::size_t>> StrategyState::clusters(Side s) const {
  std::map<Vertex, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < rounds.size(); ++i) out[anchor_of(rounds[i], s)].push_back(i + 1);
  return out;
}

std::map<std::uint32_t, std::vector<std::size_t>> StrategyState::occupancy(const StrategyContext& ctx, Side s) const {
  std::map<std::uint32_t, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < rounds.size(); ++i) {
    Vertex a = anchor_of(rounds[i], s);
    if (ctx.is_short_cycle_vertex(s, a)) out[ctx.component_of(s, a)].push_back(i + 1);
  }
  return out;
}

std::optional<std::size_t> StrategyState::first_touch(const StrategyContext& ctx, Side s, std::uint32_t comp) const {
  for (std::size_t i = 0; i < rounds.size(); ++i) {
    Vertex a = anchor_of(rounds[i], s);
    if (ctx.is_short_cycle_vertex(s, a) && ctx.component_of(s, a) == comp) return i + 1;
  }
  return std::nullopt;
}

// --- respond --------------------------------------------------------------

namespace {

// Dihedral correspondence between the cycles of c1 (side s) and c2 (other
// side) preserving hanging-tree types at depth m and the given position pairs.
std::optional<DihedralMap> align(const StrategyContext& ctx, Side s, std::uint32_t c1, std::uint32_t c2,
                                 std::size_t m, const std::vector<std::pair<std::size_t, std::size_t>>& fixed) {
  const auto& w1 = ctx.hanging_types(s, c1, m);
  const auto& w2 = ctx.hanging_types(other(s), c2, m);
  const std::size_t n = w1.size();
  if (w2.size() != n) return std::nullopt;
  for (int refl = 0; refl < 2; ++refl)
    for (std::size_t off = 0; off < n; ++off) {
      DihedralMap map{off, refl == 1};
      bool ok = true;
      for (std::size_t p = 0; p < n && ok; ++p) ok = w1[p] == w2[map.apply(p, n)];
      for (auto [p, q] : fixed) ok = ok && map.apply(p, n) == q;
      if (ok) return map;
    }
  return std::nullopt;
}

struct CycleMatch {
  const UnicyclicView* mine;
  const UnicyclicView* theirs;
  std::uint32_t their_comp;
  DihedralMap map;
  std::size_t depth;
};

// The partner of an occupied short cycle component, with an alignment that
// agrees with every anchor pair placed on it so far.
CycleMatch matched_cycle(const StrategyContext& ctx, const StrategyState& state, Side s, std::uint32_t comp,
                         std::size_t beta) {
  const Side t = other(s);
  const StrategyRound& first = state.rounds[beta - 1];
  Vertex partner = anchor_of(first, t);
  if (!ctx.is_short_cycle_vertex(t, partner))
    throw ContractViolation("anchor of round " + std::to_string(beta) + " is not matched with a cycle vertex");
  CycleMatch m;
  m.mine = ctx.short_cycle(s, anchor_of(first, s));
  m.theirs = ctx.short_cycle(t, partner);
  m.their_comp = ctx.component_of(t, partner);
  m.depth = ctx.thresholds().cycle_depth(beta);
  std::vector<std::pair<std::size_t, std::size_t>> fixed;
  for (const auto& r : state.rounds) {
    Vertex a = anchor_of(r, s);
    if (!ctx.is_short_cycle_vertex(s, a) || ctx.component_of(s, a) != comp) continue;
    Vertex b = anchor_of(r, t);
    if (!ctx.is_short_cycle_vertex(t, b) || ctx.component_of(t, b) != m.their_comp)
      throw ContractViolation("anchors on one cycle are matched with different components");
    fixed.emplace_back(m.mine->position_of(a), m.theirs->position_of(b));
  }
  auto map = align(ctx, s, comp, m.their_comp, m.depth, fixed);
  if (!map) throw ContractViolation("matched cycles have no type-preserving alignment");
  m.map = *map;
  return m;
}

// The earlier pairs anchored at a, oriented (mine, theirs); their partners
// must share the anchor b.
std::vector<VertexPair> cluster_pairs(const StrategyState& state, Side s, Vertex a, Vertex b) {
  std::vector<VertexPair> out;
  for (const auto& r : state.rounds) {
    if (anchor_of(r, s) != a) continue;
    if (anchor_of(r, other(s)) != b) throw ContractViolation("cluster anchors are not matched");
    out.emplace_back(pick_of(r, s), pick_of(r, other(s)));
  }
  return out;
}

Vertex tree_reply(const RootedTreeView& a, const RootedTreeView& b, std::size_t m, TypeTable& table,
                  const std::vector<VertexPair>& pairs, Vertex pick) {
  if (!a.contains(pick)) throw ContractViolation("pick lies outside its anchor's tree");
  try {
    return tree_strategy_respond(a, b, m, table, pairs, Side::Left, pick);
  } catch (const StrategyExhausted& e) {
    throw ContractViolation(std::string("anchored trees differ: ") + e.what());
  }
}

Graph tree_as_graph(const RootedTreeView& t) {
  std::vector<int> parent(t.size(), -1);
  for (std::size_t i = 1; i < t.size(); ++i) parent[i] = static_cast<int>(t.parent_index(i));
  std::vector<Edge> edges;
  for (std::size_t i = 1; i < t.size(); ++i) edges.emplace_back(static_cast<Vertex>(parent[i]), static_cast<Vertex>(i));
  return Graph(t.size(), edges);
}

}  // namespace

const StrategyRound& respond(const StrategyContext& ctx, StrategyState& state, Side side, Vertex pick) {
  const Thresholds& th = ctx.thresholds();
  const std::size_t i = state.rounds.size() + 1;
  if (i > th.k) throw InvalidArgument("all " + std::to_string(th.k) + " rounds have been played");
  if (!ctx.graph(side).contains(pick))
    throw InvalidArgument("vertex " + std::to_string(pick) + " is not in the " + to_string(side) + " structure");
  const Side s = side, t = other(side);

  StrategyRound out;
  out.side = side;
  Vertex reply = 0, u = 0, v = 0;

  auto repeat = std::find_if(state.rounds.begin(), state.rounds.end(),
                             [&](const StrategyRound& r) { return pick_of(r, s) == pick; });
  if (repeat != state.rounds.end()) {
    out.label = StrategyCase::Repeat;
    reply = pick_of(*repeat, t);
    u = anchor_of(*repeat, s);
    v = anchor_of(*repeat, t);
  } else {
    std::optional<std::size_t> alpha;
    for (std::size_t l = 1; l < i && !alpha; ++l)
      if (ctx.distance(s, pick, pick_of(state.rounds[l - 1], s)).within(th.close(l, i))) alpha = l;

    if (ctx.shallow(s, pick, i)) {
      out.label = alpha ? StrategyCase::CloseShallow : StrategyCase::FarShallow;
      const UnicyclicView& cyc = *ctx.short_cycle(s, pick);
      const std::uint32_t comp = ctx.component_of(s, pick);
      const std::size_t pos = cyc.position_of(pick);
      const UnicyclicView* theirs;
      std::size_t their_pos, depth;
      if (auto beta = state.first_touch(ctx, s, comp)) {
        CycleMatch m = matched_cycle(ctx, state, s, comp, *beta);
        theirs = m.theirs;
        their_pos = m.map.apply(pos, cyc.cycle_length());
        depth = m.depth;
      } else {
        if (alpha) throw ContractViolation("close shallow move in a free cycle component");
        depth = th.cycle_depth(i);
        const CycleTypeId gamma = ctx.cycle_type_at(s, comp, depth);
        std::optional<std::uint32_t> found;
        for (std::uint32_t c = 0; c < ctx.component_count(t) && !found; ++c) {
          const Component& cand = ctx.component(t, c);
          if (cand.kind != ComponentKind::Unicyclic || cand.cycle.size() != cyc.cycle_length()) continue;
          if (!ctx.short_cycle(t, cand.vertices.front()) || state.first_touch(ctx, t, c)) continue;
          if (ctx.cycle_type_at(t, c, depth) == gamma) found = c;
        }
        if (!found)
          throw ResourceExhausted("no free unicyclic component of type " + ctx.table().cycle_serialization(gamma) +
                                  " at depth " + std::to_string(depth) + " in the " + to_string(t) + " structure");
        theirs = ctx.short_cycle(t, ctx.component(t, *found).vertices.front());
        auto map = align(ctx, s, comp, *found, depth, {});
        their_pos = map->apply(pos, cyc.cycle_length());
      }
      u = cyc.cycle()[pos];
      v = theirs->cycle()[their_pos];
      reply = tree_reply(truncate(cyc.hanging_tree(pos), depth), truncate(theirs->hanging_tree(their_pos), depth),
                         depth, ctx.table(), cluster_pairs(state, s, u, v), pick);
    } else if (alpha) {
      out.label = StrategyCase::CloseDeep;
      const StrategyRound& near = state.rounds[*alpha - 1];
      u = anchor_of(near, s);
      v = anchor_of(near, t);
      auto pairs = cluster_pairs(state, s, u, v);
      if (ctx.is_short_cycle_vertex(s, u)) {
        const std::uint32_t comp = ctx.component_of(s, u);
        CycleMatch m = matched_cycle(ctx, state, s, comp, *state.first_touch(ctx, s, comp));
        const std::size_t pos = m.mine->position_of(u);
        const std::size_t their_pos = m.map.apply(pos, m.mine->cycle_length());
        if (m.theirs->cycle()[their_pos] != v) throw ContractViolation("anchor pair breaks the cycle alignment");
        reply = tree_reply(truncate(m.mine->hanging_tree(pos), m.depth),
                           truncate(m.theirs->hanging_tree(their_pos), m.depth), m.depth, ctx.table(), pairs, pick);
      } else {
        std::size_t first = i;
        for (std::size_t l = 1; l < i; ++l)
          if (anchor_of(state.rounds[l - 1], s) == u) first = std::min(first, l);
        const std::size_t r = th.ball_radius(first);
        try {
          reply = tree_reply(rooted_ball(ctx.graph(s), u, r), rooted_ball(ctx.graph(t), v, r), r, ctx.table(), pairs,
                             pick);
        } catch (const NotTreelike& e) {
          throw ContractViolation(std::string("anchor ball is not a tree: ") + e.what());
        }
      }
    } else {
      out.label = StrategyCase::FarDeep;
      const std::size_t r = th.ball_radius(i);
      RootedTreeView ball = [&] {
        try {
          return rooted_ball(ctx.graph(s), pick, r);
        } catch (const NotTreelike& e) {
          throw ContractViolation(std::string("ball around a deep pick is not a tree: ") + e.what());
        }
      }();
      const TreeTypeId sigma = tree_type(ball, r, ctx.table());
      std::set<std::uint32_t> used;
      for (const auto& rr : state.rounds) {
        used.insert(ctx.component_of(t, pick_of(rr, t)));
        used.insert(ctx.component_of(t, anchor_of(rr, t)));
      }
      std::optional<Vertex> root;
      for (Vertex w : ctx.tree_roots_of_type(t, sigma, r))
        if (!used.count(ctx.component_of(t, w))) {
          root = w;
          break;
        }
      if (!root)
        throw MissingTreeComponent("no free tree component of type " + ctx.table().serialization(sigma) +
                                       " at depth " + std::to_string(r) + " in the " + to_string(t) + " structure",
                                   tree_as_graph(ball), t);
      u = pick;
      v = reply = *root;
    }
  }

  out.x = s == Side::Left ? pick : reply;
  out.y = s == Side::Left ? reply : pick;
  out.u = s == Side::Left ? u : v;
  out.v = s == Side::Left ? v : u;
  state.rounds.push_back(std::move(out));
  return state.rounds.back();
}

// --- audit ----------------------------------------------------------------

std::vector<Violation> audit(const StrategyContext& ctx, const StrategyState& state, std::size_t node_budget) {
  std::vector<Violation> out;
  auto add = [&](const std::string& cond, const std::string& detail) { out.push_back({cond, detail}); };
  const Thresholds& th = ctx.thresholds();
  const auto& rs = state.rounds;
  const std::size_t j = rs.size();
  auto R = [](std::size_t i) { return "round " + std::to_string(i); };
  auto RR = [](std::size_t a, std::size_t b) { return "rounds " + std::to_string(a) + "," + std::to_string(b); };

  if (j > th.k) {
    add("state", "more rounds than the game has");
    return out;
  }
  for (std::size_t i = 1; i <= j; ++i) {
    const auto& r = rs[i - 1];
    if (!ctx.graph(Side::Left).contains(r.x) || !ctx.graph(Side::Left).contains(r.u) ||
        !ctx.graph(Side::Right).contains(r.y) || !ctx.graph(Side::Right).contains(r.v)) {
      add("state", R(i) + ": vertex out of range");
      return out;
    }
    if (ctx.component_of(Side::Left, r.x) != ctx.component_of(Side::Left, r.u))
      add("state", R(i) + ": left anchor outside the pick's component");
    if (ctx.component_of(Side::Right, r.y) != ctx.component_of(Side::Right, r.v))
      add("state", R(i) + ": right anchor outside the pick's component");
  }
  const Side sides[2] = {Side::Left, Side::Right};

  // Shallow picks are anchored at their cycle ancestor.
  for (std::size_t i = 1; i <= j; ++i)
    for (Side s : sides) {
      Vertex w = pick_of(rs[i - 1], s);
      if (ctx.shallow(s, w, i) && anchor_of(rs[i - 1], s) != ctx.short_cycle(s, w)->cycle_ancestor(w))
        add("anchor-shallow", R(i) + ": " + to_string(s) + " shallow pick not anchored at its cycle ancestor");
    }

  // Closeness agrees on both sides, with equal distances and shared anchors.
  auto shallow_apart = [&](Side s, std::size_t a, std::size_t b) {
    Vertex wa = pick_of(rs[a - 1], s), wb = pick_of(rs[b - 1], s);
    if (!ctx.shallow(s, wa, a) || !ctx.shallow(s, wb, b)) return false;
    if (ctx.component_of(s, wa) != ctx.component_of(s, wb)) return false;
    const UnicyclicView* c = ctx.short_cycle(s, wa);
    return c->cycle_ancestor(wa) != c->cycle_ancestor(wb);
  };
  for (std::size_t a = 1; a <= j; ++a)
    for (std::size_t b = a + 1; b <= j; ++b) {
      const std::size_t bound = th.close(a, b);
      Distance dx = ctx.distance(Side::Left, rs[a - 1].x, rs[b - 1].x);
      Distance dy = ctx.distance(Side::Right, rs[a - 1].y, rs[b - 1].y);
      if (dx.within(bound) != dy.within(bound)) {
        add("closeness", RR(a, b) + ": close on one side only");
        continue;
      }
      if (!dx.within(bound)) continue;
      if (dx != dy) add("closeness", RR(a, b) + ": close pairs at different distances");
      for (Side s : sides)
        if (!shallow_apart(s, a, b) && anchor_of(rs[a - 1], s) != anchor_of(rs[b - 1], s))
          add("closeness", RR(a, b) + ": close " + to_string(s) + " picks with different anchors");
    }

  // A far, deep pick anchors itself on both sides.
  for (std::size_t i = 1; i <= j; ++i) {
    bool fresh = false;
    for (Side s : sides) {
      Vertex w = pick_of(rs[i - 1], s);
      bool near = false;
      for (std::size_t l = 1; l < i && !near; ++l)
        near = ctx.distance(s, w, pick_of(rs[l - 1], s)).within(th.close(l, i));
      fresh = fresh || (!near && !ctx.shallow(s, w, i));
    }
    if (fresh && (rs[i - 1].u != rs[i - 1].x || rs[i - 1].v != rs[i - 1].y))
      add("fresh-anchor", R(i) + ": far deep pick not anchored at itself");
  }

  // Cycle anchors are matched component to component, position to position.
  for (std::size_t i = 1; i <= j; ++i)
    if (ctx.is_short_cycle_vertex(Side::Left, rs[i - 1].u) != ctx.is_short_cycle_vertex(Side::Right, rs[i - 1].v))
      add("cycle-matching", R(i) + ": only one anchor is a cycle vertex");
  auto both_cycle = [&](std::size_t i) {
    return ctx.is_short_cycle_vertex(Side::Left, rs[i - 1].u) && ctx.is_short_cycle_vertex(Side::Right, rs[i - 1].v);
  };
  for (std::size_t a = 1; a <= j; ++a)
    for (std::size_t b = a + 1; b <= j; ++b) {
      if (!both_cycle(a) || !both_cycle(b)) continue;
      bool same_l = ctx.component_of(Side::Left, rs[a - 1].u) == ctx.component_of(Side::Left, rs[b - 1].u);
      bool same_r = ctx.component_of(Side::Right, rs[a - 1].v) == ctx.component_of(Side::Right, rs[b - 1].v);
      if (same_l != same_r) add("cycle-matching", RR(a, b) + ": anchors share a cycle on one side only");
    }
  for (const auto& [comp, list] : state.occupancy(ctx, Side::Left)) {
    const std::size_t beta = list.front();
    if (!both_cycle(beta)) continue;
    const UnicyclicView* mine = ctx.short_cycle(Side::Left, rs[beta - 1].u);
    const UnicyclicView* theirs = ctx.short_cycle(Side::Right, rs[beta - 1].v);
    const std::uint32_t their_comp = ctx.component_of(Side::Right, rs[beta - 1].v);
    std::vector<std::pair<std::size_t, std::size_t>> fixed;
    bool usable = true;
    for (std::size_t i : list) {
      if (!both_cycle(i) || ctx.component_of(Side::Right, rs[i - 1].v) != their_comp) {
        usable = false;
        break;
      }
      fixed.emplace_back(mine->position_of(rs[i - 1].u), theirs->position_of(rs[i - 1].v));
    }
    if (!usable) continue;  // reported above
    const std::size_t depth = th.cycle_depth(beta);
    if (!align(ctx, Side::Left, comp, their_comp, depth, fixed))
      add("cycle-matching", R(beta) + ": matched cycles disagree at depth " + std::to_string(depth));
  }

  // Clusters correspond and their anchored trees stay winnable.
  auto cl = state.clusters(Side::Left);
  auto cr = state.clusters(Side::Right);
  std::set<std::vector<std::size_t>> gl, gr;
  for (auto& [a, list] : cl) gl.insert(list);
  for (auto& [a, list] : cr) gr.insert(list);
  if (gl != gr) add("cluster-winnable", "left and right clusters differ");
  for (const auto& [u, list] : cl) {
    const std::size_t r = list.size();
    const Vertex v = rs[list.front() - 1].v;
    if (!gr.count(list)) continue;
    std::optional<RootedTreeView> A, B;
    std::size_t depth = 0;
    std::string where = "cluster under left " + std::to_string(u);
    if (ctx.is_short_cycle_vertex(Side::Left, u)) {
      if (!ctx.is_short_cycle_vertex(Side::Right, v)) continue;  // reported above
      const std::size_t beta = *state.first_touch(ctx, Side::Left, ctx.component_of(Side::Left, u));
      depth = th.cycle_depth(beta);
      const UnicyclicView* c1 = ctx.short_cycle(Side::Left, u);
      const UnicyclicView* c2 = ctx.short_cycle(Side::Right, v);
      A = truncate(c1->hanging_tree(c1->position_of(u)), depth);
      B = truncate(c2->hanging_tree(c2->position_of(v)), depth);
    } else {
      depth = th.ball_radius(list.front());
      try {
        A = rooted_ball(ctx.graph(Side::Left), u, depth);
        B = rooted_ball(ctx.graph(Side::Right), v, depth);
      } catch (const NotTreelike&) {
        add("cluster-winnable", where + ": anchor ball is not a tree");
        continue;
      }
      if (tree_type(*A, depth, ctx.table()) != tree_type(*B, depth, ctx.table()))
        add("cluster-winnable", where + ": anchor balls have different types");
    }
    GameConfig cfg{Arena::from_tree(*A), Arena::from_tree(*B), ctx.rounds() - r, {{u, v}}, Variant::DEHR};
    bool inside = true;
    for (std::size_t i : list) {
      const auto& rr = rs[i - 1];
      if (!A->contains(rr.x) || !B->contains(rr.y)) inside = false;
      cfg.designated.emplace_back(rr.x, rr.y);
    }
    if (!inside) {
      add("cluster-winnable", where + ": a pick lies outside the anchored tree");
      continue;
    }
    if (!winnable(cfg, node_budget)) add("cluster-winnable", where + ": configuration is not winnable");
  }

  // Picks stay within the slack of their anchor.
  for (std::size_t i = 1; i <= j; ++i) {
    const auto& r = rs[i - 1];
    std::size_t bound;
    if (ctx.is_short_cycle_vertex(Side::Left, r.u)) {
      bound = th.cycle_slack(*state.first_touch(ctx, Side::Left, ctx.component_of(Side::Left, r.u)), i);
    } else {
      std::size_t beta = i;
      for (std::size_t l = 1; l <= i; ++l)
        if (rs[l - 1].u == r.u) {
          beta = l;
          break;
        }
      bound = th.tree_slack(beta, i);
    }
    if (!ctx.distance(Side::Left, r.u, r.x).within(bound))
      add("anchor-distance", R(i) + ": pick farther than " + std::to_string(bound) + " from its anchor");
  }

  // Distance bookkeeping: pick-to-anchor and within clusters.
  for (std::size_t i = 1; i <= j; ++i)
    if (ctx.distance(Side::Left, rs[i - 1].u, rs[i - 1].x) != ctx.distance(Side::Right, rs[i - 1].v, rs[i - 1].y))
      add("anchor-distance-transfer", R(i) + ": anchors at different distances");
  for (const auto& [u, list] : cl)
    for (std::size_t a = 0; a < list.size(); ++a)
      for (std::size_t b = a + 1; b < list.size(); ++b) {
        const auto& p = rs[list[a] - 1];
        const auto& q = rs[list[b] - 1];
        if (ctx.distance(Side::Left, p.x, q.x) != ctx.distance(Side::Right, p.y, q.y))
          add("cluster-distances", RR(list[a], list[b]) + ": cluster distances differ");
      }

  // Shallow picks are answered by shallow picks at the same depth.
  for (std::size_t i = 1; i <= j; ++i) {
    const auto& r = rs[i - 1];
    bool sl = ctx.shallow(Side::Left, r.x, i), sr = ctx.shallow(Side::Right, r.y, i);
    if (!sl && !sr) continue;
    if (sl != sr || ctx.short_cycle(Side::Left, r.x)->depth(r.x) != ctx.short_cycle(Side::Right, r.y)->depth(r.y))
      add("shallow-transfer", R(i) + ": shallow pick answered at a different depth");
  }

  // Occupied components agree in number per type at every depth still in use.
  for (std::size_t next = j + 1; next <= th.k; ++next) {
    const std::size_t m = th.cycle_depth(next);
    std::multiset<CycleTypeId> tl, tr;
    for (const auto& [comp, list] : state.occupancy(ctx, Side::Left)) tl.insert(ctx.cycle_type_at(Side::Left, comp, m));
    for (const auto& [comp, list] : state.occupancy(ctx, Side::Right))
      tr.insert(ctx.cycle_type_at(Side::Right, comp, m));
    if (tl != tr) add("occupied-count", "occupied cycle components differ in type at depth " + std::to_string(m));
  }
  return out;
}

// --- spoilers and play ----------------------------------------------------

namespace {

Side nonempty_side(const StrategyContext& ctx, Side s) {
  if (ctx.graph(s).vertex_count() > 0) return s;
  if (ctx.graph(other(s)).vertex_count() > 0) return other(s);
  throw InvalidArgument("both structures are empty");
}

}  // namespace

std::pair<Side, Vertex> RandomSpoiler::next(const StrategyContext& ctx, const StrategyState&) {
  Side s = nonempty_side(ctx, rng_() % 2 ? Side::Right : Side::Left);
  return {s, static_cast<Vertex>(rng_() % ctx.graph(s).vertex_count())};
}

std::pair<Side, Vertex> AdversarialSpoiler::next(const StrategyContext& ctx, const StrategyState& state) {
  const Thresholds& th = ctx.thresholds();
  const std::size_t i = state.rounds.size() + 1;
  std::vector<std::pair<Side, Vertex>> picks;
  for (Side s : {Side::Left, Side::Right}) {
    const Graph& g = ctx.graph(s);
    for (Vertex w = 0; w < g.vertex_count(); ++w) {
      bool edge = false;
      if (const UnicyclicView* c = ctx.short_cycle(s, w)) {
        std::size_t d = c->depth(w);
        edge = d == 0 || d == th.shallow(i) || d == th.shallow(i) + 1;
      }
      for (std::size_t l = 1; l < i && !edge; ++l) {
        Distance dist = ctx.distance(s, w, pick_of(state.rounds[l - 1], s));
        if (!dist.is_finite()) continue;
        std::size_t bound = th.close(l, i);
        edge = dist.value() + 1 >= bound && dist.value() <= bound + 1;
      }
      if (edge) picks.emplace_back(s, w);
    }
  }
  if (!state.rounds.empty() && rng_() % 8 == 0) {
    const auto& r = state.rounds[rng_() % state.rounds.size()];
    return rng_() % 2 ? std::make_pair(Side::Left, r.x) : std::make_pair(Side::Right, r.y);
  }
  if (picks.empty() || rng_() % 5 == 0) {
    Side s = nonempty_side(ctx, rng_() % 2 ? Side::Right : Side::Left);
    return {s, static_cast<Vertex>(rng_() % ctx.graph(s).vertex_count())};
  }
  return picks[rng_() % picks.size()];
}

std::pair<Side, Vertex> MinimaxSpoiler::next(const StrategyContext& ctx, const StrategyState& state) {
  if (!solver_ || solved_for_ != &ctx) {
    GameConfig cfg{Arena::from_graph(ctx.graph(Side::Left)), Arena::from_graph(ctx.graph(Side::Right)), ctx.rounds(),
                   {}, Variant::EHR};
    solver_ = std::make_unique<GameSolver>(cfg, budget_);
    solved_for_ = &ctx;
  }
  std::vector<VertexPair> pairs;
  for (const auto& r : state.rounds) pairs.emplace_back(r.x, r.y);
  if (auto move = solver_->winning_spoiler_move(pairs, ctx.rounds() - state.rounds.size())) return *move;
  return {nonempty_side(ctx, Side::Left), 0};
}

StrategyState play(const StrategyContext& ctx, Spoiler& spoiler, bool audit_rounds, std::size_t node_budget) {
  StrategyState state;
  while (state.rounds.size() < ctx.rounds()) {
    auto [side, pick] = spoiler.next(ctx, state);
    respond(ctx, state, side, pick);
    if (audit_rounds) state.rounds.back().audit = audit(ctx, state, node_budget);
  }
  return state;
}

bool strategy_won(const StrategyContext& ctx, const StrategyState& state) {
  GameConfig cfg{Arena::from_graph(ctx.graph(Side::Left)), Arena::from_graph(ctx.graph(Side::Right)), ctx.rounds(), {},
                 Variant::EHR};
  return ehr_win_check(cfg, state.history());
}

// --- transcripts ----------------------------------------------------------

nlohmann::json transcript_to_json(const StrategyContext& ctx, const StrategyState& state) {
  nlohmann::json rounds = nlohmann::json::array();
  for (std::size_t i = 0; i < state.rounds.size(); ++i) {
    const auto& r = state.rounds[i];
    nlohmann::json violations = nlohmann::json::array();
    for (const auto& v : r.audit) violations.push_back({{"condition", v.condition}, {"detail", v.detail}});
    rounds.push_back({{"round", i + 1},
                      {"side", to_string(r.side)},
                      {"x", r.x},
                      {"y", r.y},
                      {"u", r.u},
                      {"v", r.v},
                      {"case", to_string(r.label)},
                      {"audit", violations}});
  }
  return {{"thresholds", ctx.thresholds().to_json()},
          {"rounds", rounds},
          {"complete", state.rounds.size() == ctx.rounds()},
          {"duplicator_wins", strategy_won(ctx, state)}};
}

StrategyState transcript_from_json(const nlohmann::json& j) {
  StrategyState state;
  try {
    for (const auto& r : j.at("rounds")) {
      StrategyRound round;
      const std::string side = r.at("side").get<std::string>();
      if (side != "left" && side != "right") throw ParseError("unknown side '" + side + "'");
      round.side = side == "left" ? Side::Left : Side::Right;
      round.x = r.at("x").get<Vertex>();
      round.y = r.at("y").get<Vertex>();
      round.u = r.at("u").get<Vertex>();
      round.v = r.at("v").get<Vertex>();
      round.label = parse_case(r.at("case").get<std::string>());
      if (r.contains("audit"))
        for (const auto& v : r.at("audit"))
          round.audit.push_back({v.at("condition").get<std::string>(), v.at("detail").get<std::string>()});
      state.rounds.push_back(std::move(round));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad transcript: ") + e.what());
  }
  return state;
}

}  // namespace ehrlab
