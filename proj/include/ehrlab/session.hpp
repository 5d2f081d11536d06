#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ehrlab/error.hpp"
#include "ehrlab/strategy.hpp"

namespace ehrlab {

class UnknownSession : public Error {
 public:
  explicit UnknownSession(const std::string& message) : Error("UnknownSession", message) {}
};

class GameOver : public Error {
 public:
  explicit GameOver(const std::string& message) : Error("GameOver", message) {}
};

class IllegalMove : public Error {
 public:
  explicit IllegalMove(const std::string& message) : Error("IllegalMove", message) {}
};

enum class SessionStatus { InProgress, DuplicatorHeld, SpoilerBroke, ResourceExhausted };
const char* to_string(SessionStatus s);

struct SessionSetup {
  Graph left;
  Graph right;
  Thresholds thresholds;
  // Append k copies of a missing ball to both graphs instead of stopping.
  bool enrich = false;
  std::size_t max_enrichments = 64;
};

// Parses {left_graph | left_model_spec, right_graph | right_model_spec, k,
// base?, shift?, enrich?}. ParseError or InvalidArgument on bad input.
SessionSetup session_setup_from_json(const nlohmann::json& request);

// One Spoiler-vs-Duplicator game. Not thread-safe; the store serializes access.
class GameSession {
 public:
  GameSession(std::string id, SessionSetup setup, std::size_t node_budget);

  const std::string& id() const { return id_; }
  SessionStatus status() const { return status_; }
  bool finished() const { return status_ != SessionStatus::InProgress; }
  const StrategyState& state() const { return state_; }
  const Graph& graph(Side s) const { return s == Side::Left ? left_ : right_; }
  // Replaced when the graphs are enriched.
  const StrategyContext& context() const { return *ctx_; }

  // Plays one round. GameOver once finished, IllegalMove for a vertex outside
  // the graph, ResourceExhausted when a free component is missing (the session
  // then ends with that status).
  nlohmann::json spoiler_move(Side side, Vertex vertex);

  nlohmann::json status_json() const;
  // Full transcript plus status and both graphs.
  nlohmann::json to_json() const;
  nlohmann::json legal_moves() const;

  // Setup and submitted moves; restore() replays them.
  nlohmann::json snapshot() const;
  static std::unique_ptr<GameSession> restore(const nlohmann::json& snapshot, std::size_t node_budget);

 private:
  void rebuild_context();

  std::string id_;
  Graph original_left_, original_right_;
  Graph left_, right_;
  Thresholds th_;
  bool enrich_;
  std::size_t max_enrichments_;
  std::size_t node_budget_;
  std::unique_ptr<TypeTable> table_;
  std::unique_ptr<StrategyContext> ctx_;
  StrategyState state_;
  SessionStatus status_ = SessionStatus::InProgress;
  std::string condition_, detail_;
  std::size_t enrichments_ = 0;
  std::vector<std::pair<Side, Vertex>> moves_;  // every submitted move, including a failing last one
};

struct ServiceOptions {
  std::optional<std::filesystem::path> persist_dir;
  std::size_t node_budget = kDefaultNodeBudget;
};

// Session store plus the stateless endpoints. Safe for concurrent use;
// requests on one session are serialized.
class GameService {
 public:
  explicit GameService(ServiceOptions options = {});

  nlohmann::json new_game(const nlohmann::json& request);
  nlohmann::json spoiler_move(const std::string& id, const nlohmann::json& request);
  nlohmann::json game(const std::string& id);
  nlohmann::json legal_moves(const std::string& id);
  nlohmann::json sample(const nlohmann::json& request) const;
  nlohmann::json estimate(const nlohmann::json& request) const;

  std::size_t session_count() const;
  // Sessions read back from the persistence directory at construction.
  std::size_t restored() const { return restored_; }

 private:
  struct Entry {
    std::mutex mutex;
    std::unique_ptr<GameSession> session;
  };
  std::shared_ptr<Entry> find(const std::string& id) const;
  std::string next_id();
  void persist(const GameSession& s) const;

  ServiceOptions options_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::uint64_t counter_ = 0;
  std::size_t restored_ = 0;
};

}  // namespace ehrlab
