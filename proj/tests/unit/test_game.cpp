#include <doctest.h>

#include <random>

#include "ehrlab/error.hpp"
#include "ehrlab/game.hpp"
#include "support.hpp"

using namespace ehrlab;
using testing_support::to_graph;

namespace {

GameConfig ehr(const Graph& a, const Graph& b, std::size_t k) {
  return {Arena::from_graph(a), Arena::from_graph(b), k, {}, Variant::EHR};
}

GameConfig dehr(const std::vector<int>& pa, const std::vector<int>& pb, std::size_t k) {
  auto a = RootedTreeView::from_parent_array(pa);
  auto b = RootedTreeView::from_parent_array(pb);
  return {Arena::from_tree(a), Arena::from_tree(b), k, {{0, 0}}, Variant::DEHR};
}

std::vector<int> star(int leaves) {
  std::vector<int> p(leaves + 1, 0);
  p[0] = -1;
  return p;
}

std::vector<int> path(int n) {
  std::vector<int> p(n);
  for (int i = 0; i < n; ++i) p[i] = i - 1;
  return p;
}

}  // namespace

TEST_CASE("EHR win check examples") {
  auto cfg = ehr(testing_support::path_graph(3), testing_support::path_graph(3), 2);
  CHECK(ehr_win_check(cfg, {}));
  CHECK(ehr_win_check(cfg, {{{Side::Left, 1, 1}, {Side::Left, 1, 1}}}));
  CHECK_FALSE(ehr_win_check(cfg, {{{Side::Left, 0, 0}, {Side::Left, 1, 2}}}));
  CHECK_FALSE(ehr_win_check(cfg, {{{Side::Left, 0, 0}, {Side::Left, 1, 0}}}));
  CHECK_THROWS_AS(dehr_win_check(cfg, {}), InvalidArgument);
}

TEST_CASE("DEHR win check examples") {
  auto cfg = dehr(path(3), path(4), 1);
  CHECK(dehr_win_check(cfg, {}));
  CHECK_FALSE(dehr_win_check(cfg, {{{Side::Left, 2, 3}}}));
  CHECK(dehr_win_check(cfg, {{{Side::Left, 2, 2}}}));
  auto same = dehr(star(3), star(3), 2);
  CHECK(dehr_win_check(same, {{{Side::Left, 1, 1}, {Side::Right, 3, 3}}}));
  auto pc = dehr(path(3), path(3), 2);
  CHECK_FALSE(dehr_win_check(pc, {{{Side::Left, 1, 2}}}));
}

TEST_CASE("minimax examples") {
  CHECK(brute_force_winner(ehr(testing_support::complete_graph(3), testing_support::path_graph(3), 2)) ==
        Winner::Spoiler);
  CHECK(brute_force_winner(ehr(testing_support::complete_graph(3), testing_support::path_graph(3), 1)) ==
        Winner::Duplicator);
  CHECK(brute_force_winner(ehr(testing_support::cycle_graph(5), testing_support::cycle_graph(6), 3)) ==
        Winner::Spoiler);
  CHECK(brute_force_winner(ehr(testing_support::cycle_graph(5), testing_support::cycle_graph(6), 2)) ==
        Winner::Duplicator);
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 1 + static_cast<int>(rng() % 7);
    Graph g = to_graph(n, oracle::random_edges(n, 0.4, rng));
    CHECK(brute_force_winner(ehr(g, g, 3)) == Winner::Duplicator);
  }
  CHECK_THROWS_AS(brute_force_winner(ehr(testing_support::cycle_graph(8), testing_support::cycle_graph(9), 4), 50),
                  BudgetExceeded);
}

TEST_CASE("winnable and corresponding vertices") {
  auto bad = dehr(path(3), path(4), 0);
  bad.designated.push_back({2, 3});
  CHECK_FALSE(winnable(bad));
  CHECK_THROWS_AS(corresponding_vertices(dehr(path(3), path(4), 3), 0), NotWinnable);

  for (int k = 1; k <= 3; ++k) {
    auto cfg = dehr(star(k), star(k + 1), static_cast<std::size_t>(k));
    CHECK(winnable(cfg));
    auto leaves = corresponding_vertices(cfg, 1);
    std::vector<Vertex> want;
    for (int i = 1; i <= k + 1; ++i) want.push_back(static_cast<Vertex>(i));
    CHECK(leaves == want);
    CHECK(corresponding_vertices(cfg, 0) == std::vector<Vertex>{0});
  }
  CHECK_FALSE(winnable(dehr(star(2), star(3), 3)));

  auto same = dehr(path(4), path(4), 3);
  CHECK(winnable(same));
  auto c = corresponding_vertices(same, 2);
  CHECK(std::find(c.begin(), c.end(), 2) != c.end());
}

TEST_CASE("minimax properties on random graphs") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 60; ++trial) {
    int n1 = 1 + static_cast<int>(rng() % 6), n2 = 1 + static_cast<int>(rng() % 6);
    auto e1 = oracle::random_edges(n1, 0.45, rng);
    auto e2 = oracle::random_edges(n2, 0.45, rng);
    Graph a = to_graph(n1, e1), b = to_graph(n2, e2);
    bool lost = false;
    for (std::size_t k = 0; k <= 3; ++k) {
      Winner w = brute_force_winner(ehr(a, b, k));
      if (lost) CHECK(w == Winner::Spoiler);
      lost = lost || w == Winner::Spoiler;
      CHECK(brute_force_winner(ehr(b, a, k)) == w);
      CHECK(brute_force_winner(ehr(a, b, k)) == w);
      if (k <= 2) CHECK((w == Winner::Duplicator) == oracle::agree_up_to_depth(static_cast<int>(k), n1, e1, n2, e2));
    }
  }
}

TEST_CASE("a failing prefix fails every extension") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 2 + static_cast<int>(rng() % 6);
    Graph a = to_graph(n, oracle::random_edges(n, 0.5, rng));
    Graph b = to_graph(n, oracle::random_edges(n, 0.5, rng));
    auto cfg = ehr(a, b, 4);
    PlayHistory h;
    bool failed = false;
    for (int i = 0; i < 4; ++i) {
      h.moves.push_back({Side::Left, static_cast<Vertex>(rng() % n), static_cast<Vertex>(rng() % n)});
      bool ok = ehr_win_check(cfg, h);
      if (failed) CHECK_FALSE(ok);
      failed = failed || !ok;
    }
  }
}

TEST_CASE("spoiler winning moves") {
  GameSolver solver(ehr(testing_support::complete_graph(3), testing_support::path_graph(3), 2));
  auto move = solver.winning_spoiler_move({}, 2);
  REQUIRE(move.has_value());
  CHECK(solver.winning_replies({}, 2, move->first, move->second).empty());
  GameSolver same(ehr(testing_support::path_graph(4), testing_support::path_graph(4), 3));
  CHECK_FALSE(same.winning_spoiler_move({}, 3).has_value());
}
