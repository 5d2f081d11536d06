#pragma once

#include <cstddef>
#include <vector>

#include "ehrlab/game.hpp"
#include "ehrlab/graph.hpp"
#include "ehrlab/types.hpp"

namespace ehrlab {

// Duplicator's reply in the distance-preserving game on two rooted trees of
// equal (m,k)-type, roots designated. The reply depends only on the history:
//   - the root answers the root;
//   - a move into an occupied principal branch descends into the branch
//     holding the partners of that branch's earlier moves;
//   - a move into a free branch descends into the lowest-id free branch of
//     the same type on the other side.
// Vertices deeper than m are outside the game. History pairs are (left, right)
// and must have been produced by this strategy (or be consistent with it):
// ContractViolation otherwise. StrategyExhausted if a free branch of the
// required type is missing, which only happens when the types differ.
Vertex tree_strategy_respond(const RootedTreeView& left, const RootedTreeView& right, std::size_t m,
                             TypeTable& table, const std::vector<VertexPair>& history, Side side, Vertex pick);

}  // namespace ehrlab
