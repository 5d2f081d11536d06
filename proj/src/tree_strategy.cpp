#include "ehrlab/tree_strategy.hpp"

#include <algorithm>
#include <string>

#include "ehrlab/error.hpp"

namespace ehrlab {

namespace {

struct Pair {
  Vertex mine;
  Vertex theirs;
};

bool below(const RootedTreeView& t, Vertex v, Vertex top) { return t.contains(v) && t.is_descendant(v, top); }

}  // namespace

Vertex tree_strategy_respond(const RootedTreeView& left, const RootedTreeView& right, std::size_t m,
                             TypeTable& table, const std::vector<VertexPair>& history, Side side, Vertex pick) {
  const RootedTreeView& mine = side == Side::Left ? left : right;
  const RootedTreeView& theirs = side == Side::Left ? right : left;
  if (!mine.contains(pick) || mine.depth(pick) > m)
    throw InvalidArgument("vertex " + std::to_string(pick) + " is not in the truncated tree");

  std::vector<Pair> pairs;
  for (auto [x, y] : history) {
    Pair p = side == Side::Left ? Pair{x, y} : Pair{y, x};
    if (!mine.contains(p.mine) || !theirs.contains(p.theirs))
      throw ContractViolation("history pair outside the trees");
    if (p.mine == pick) return p.theirs;
    pairs.push_back(p);
  }

  Vertex a = mine.root(), b = theirs.root();
  for (;;) {
    if (pick == a) return b;
    const std::size_t da = mine.depth(a), db = theirs.depth(b);
    if (da >= m) throw ContractViolation("pick below the truncation depth");
    const std::size_t rest = m - da - 1;
    const Vertex c = mine.ancestor_at_depth(pick, da + 1);

    std::vector<Pair> inside;
    for (const Pair& p : pairs) {
      if (p.mine == a) {
        if (p.theirs != b) throw ContractViolation("a branch root is paired off its partner");
        continue;
      }
      if (p.theirs == b) throw ContractViolation("a branch root is paired off its partner");
      if (below(mine, p.mine, c)) inside.push_back(p);
    }

    Vertex next = b;
    if (!inside.empty()) {
      const Pair& first = inside.front();
      if (!below(theirs, first.theirs, b) || theirs.depth(first.theirs) <= db)
        throw ContractViolation("cluster partner outside the matched branch");
      next = theirs.ancestor_at_depth(first.theirs, db + 1);
      for (const Pair& p : pairs) {
        bool here = below(mine, p.mine, c);
        bool there = below(theirs, p.theirs, next);
        if (here != there) throw ContractViolation("clusters are not matched branch to branch");
      }
      if (subtree_type(mine, c, rest, table) != subtree_type(theirs, next, rest, table))
        throw ContractViolation("matched branches have different types");
    } else {
      const TreeTypeId sigma = subtree_type(mine, c, rest, table);
      std::vector<Vertex> children(theirs.children(b).begin(), theirs.children(b).end());
      std::sort(children.begin(), children.end());
      bool found = false;
      for (Vertex cand : children) {
        bool occupied = std::any_of(pairs.begin(), pairs.end(),
                                    [&](const Pair& p) { return below(theirs, p.theirs, cand); });
        if (occupied || subtree_type(theirs, cand, rest, table) != sigma) continue;
        next = cand;
        found = true;
        break;
      }
      if (!found)
        throw StrategyExhausted("no free branch of type " + table.serialization(sigma) + " under vertex " +
                                std::to_string(b));
    }
    a = c;
    b = next;
    std::erase_if(pairs, [&](const Pair& p) { return !below(mine, p.mine, c); });
  }
}

}  // namespace ehrlab
