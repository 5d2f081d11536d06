#include "ehrlab/session.hpp"

#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "ehrlab/commands.hpp"
#include "ehrlab/graph_io.hpp"
#include "ehrlab/model_factory.hpp"

namespace ehrlab {

const char* to_string(SessionStatus s) {
  switch (s) {
    case SessionStatus::InProgress: return "InProgress";
    case SessionStatus::DuplicatorHeld: return "DuplicatorHeld";
    case SessionStatus::SpoilerBroke: return "SpoilerBroke";
    case SessionStatus::ResourceExhausted: return "ResourceExhausted";
  }
  return "?";
}

namespace {

Side parse_side(const nlohmann::json& j) {
  if (!j.is_string()) throw ParseError("'side' must be \"left\" or \"right\"");
  auto s = j.get<std::string>();
  if (s == "left") return Side::Left;
  if (s == "right") return Side::Right;
  throw ParseError("'side' must be \"left\" or \"right\", got '" + s + "'");
}

Graph model_from_request(const nlohmann::json& request, const std::string& prefix) {
  const std::string graph_key = prefix + "_graph", spec_key = prefix + "_model_spec";
  const bool has_graph = request.contains(graph_key), has_spec = request.contains(spec_key);
  if (has_graph == has_spec) throw ParseError("give exactly one of '" + graph_key + "' and '" + spec_key + "'");
  if (has_graph) return graph_from_json(request.at(graph_key));
  const auto& spec = request.at(spec_key);
  std::uint32_t k = 0;
  try {
    k = spec.at("completion").at("k").get<std::uint32_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(spec_key + ": " + e.what());
  }
  if (k == 0) throw InvalidArgument(spec_key + ": completion k must be positive");
  TypeTable table(k);
  return build_model(model_spec_from_json(spec, table), table);
}

std::size_t size_field(const nlohmann::json& j, const char* key, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
    throw ParseError(std::string("'") + key + "' must be a non-negative integer");
  return v.get<std::size_t>();
}

}  // namespace

SessionSetup session_setup_from_json(const nlohmann::json& request) {
  if (!request.is_object()) throw ParseError("request must be a JSON object");
  if (!request.contains("k")) throw ParseError("missing field 'k'");
  SessionSetup setup{model_from_request(request, "left"), model_from_request(request, "right"),
                     Thresholds::make(size_field(request, "k", 0), size_field(request, "base", 3),
                                      size_field(request, "shift", 0))};
  if (request.contains("enrich")) {
    if (!request.at("enrich").is_boolean()) throw ParseError("'enrich' must be a boolean");
    setup.enrich = request.at("enrich").get<bool>();
  }
  setup.max_enrichments = size_field(request, "max_enrichments", setup.max_enrichments);
  return setup;
}

// --- GameSession ------------------------------------------------------------

GameSession::GameSession(std::string id, SessionSetup setup, std::size_t node_budget)
    : id_(std::move(id)),
      original_left_(setup.left),
      original_right_(setup.right),
      left_(std::move(setup.left)),
      right_(std::move(setup.right)),
      th_(setup.thresholds),
      enrich_(setup.enrich),
      max_enrichments_(setup.max_enrichments),
      node_budget_(node_budget),
      table_(std::make_unique<TypeTable>(static_cast<std::uint32_t>(th_.k))) {
  rebuild_context();
}

void GameSession::rebuild_context() {
  ctx_ = std::make_unique<StrategyContext>(left_, right_, th_, *table_);
}

nlohmann::json GameSession::spoiler_move(Side side, Vertex vertex) {
  if (finished()) throw GameOver("game " + id_ + " is over (" + to_string(status_) + ")");
  if (vertex >= graph(side).vertex_count())
    throw IllegalMove("vertex " + std::to_string(vertex) + " is not in the " + to_string(side) + " graph (" +
                      std::to_string(graph(side).vertex_count()) + " vertices)");
  moves_.emplace_back(side, vertex);
  std::size_t added = 0;
  for (;;) {
    try {
      respond(*ctx_, state_, side, vertex);
      break;
    } catch (const MissingTreeComponent& e) {
      if (!enrich_ || enrichments_ >= max_enrichments_) {
        status_ = SessionStatus::ResourceExhausted;
        detail_ = e.what();
        throw;
      }
      left_ = with_copies(left_, e.ball(), th_.k);
      right_ = with_copies(right_, e.ball(), th_.k);
      ++enrichments_;
      ++added;
      rebuild_context();
    } catch (const ResourceExhausted& e) {
      status_ = SessionStatus::ResourceExhausted;
      detail_ = e.what();
      throw;
    }
  }
  auto& round = state_.rounds.back();
  try {
    round.audit = audit(*ctx_, state_, node_budget_);
  } catch (const BudgetExceeded& e) {
    state_.rounds.pop_back();
    status_ = SessionStatus::ResourceExhausted;
    detail_ = std::string("audit: ") + e.what();
    throw ResourceExhausted(detail_);
  }
  if (!round.audit.empty()) {
    status_ = SessionStatus::SpoilerBroke;
    condition_ = round.audit.front().condition;
  } else if (!strategy_won(*ctx_, state_)) {
    status_ = SessionStatus::SpoilerBroke;
    condition_ = "partial-isomorphism";
  } else if (state_.rounds.size() == th_.k) {
    status_ = SessionStatus::DuplicatorHeld;
  }
  const std::size_t index = state_.rounds.size() - 1;
  auto delta = transcript_to_json(*ctx_, state_).at("rounds").at(index);
  const Side reply_side = other(side);
  return {{"round", index + 1},
          {"duplicator_reply", {{"side", to_string(reply_side)}, {"vertex", side == Side::Left ? round.y : round.x}}},
          {"case_label", to_string(round.label)},
          {"audit", delta.at("audit")},
          {"transcript_delta", delta},
          {"enrichments", added},
          {"status", status_json()}};
}

nlohmann::json GameSession::status_json() const {
  nlohmann::json s{{"state", to_string(status_)}, {"rounds_played", state_.rounds.size()},
                   {"rounds_remaining", th_.k - state_.rounds.size()}};
  if (status_ == SessionStatus::SpoilerBroke) s["condition"] = condition_;
  if (status_ == SessionStatus::ResourceExhausted) s["detail"] = detail_;
  return s;
}

nlohmann::json GameSession::to_json() const {
  nlohmann::json moves = nlohmann::json::array();
  for (auto [side, v] : moves_) moves.push_back({{"side", to_string(side)}, {"vertex", v}});
  return {{"session_id", id_},
          {"k", th_.k},
          {"status", status_json()},
          {"transcript", transcript_to_json(*ctx_, state_)},
          {"moves", std::move(moves)},
          {"enrichments", enrichments_},
          {"left", graph_to_json(left_)},
          {"right", graph_to_json(right_)}};
}

nlohmann::json GameSession::legal_moves() const {
  nlohmann::json out{{"session_id", id_}, {"rounds_remaining", th_.k - state_.rounds.size()}};
  for (Side s : {Side::Left, Side::Right}) {
    nlohmann::json list = nlohmann::json::array();
    if (!finished())
      for (Vertex v = 0; v < graph(s).vertex_count(); ++v) list.push_back(v);
    out[to_string(s)] = std::move(list);
  }
  return out;
}

nlohmann::json GameSession::snapshot() const {
  nlohmann::json moves = nlohmann::json::array();
  for (auto [side, v] : moves_) moves.push_back({{"side", to_string(side)}, {"vertex", v}});
  return {{"session_id", id_},
          {"left_graph", graph_to_json(original_left_)},
          {"right_graph", graph_to_json(original_right_)},
          {"k", th_.k},
          {"base", th_.base},
          {"shift", th_.shift},
          {"enrich", enrich_},
          {"max_enrichments", max_enrichments_},
          {"moves", std::move(moves)}};
}

std::unique_ptr<GameSession> GameSession::restore(const nlohmann::json& snapshot, std::size_t node_budget) {
  std::string id;
  try {
    id = snapshot.at("session_id").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad snapshot: ") + e.what());
  }
  auto session = std::make_unique<GameSession>(id, session_setup_from_json(snapshot), node_budget);
  if (!snapshot.contains("moves") || !snapshot.at("moves").is_array()) throw ParseError("bad snapshot: no moves");
  for (const auto& m : snapshot.at("moves")) {
    Side side = parse_side(m.at("side"));
    try {
      session->spoiler_move(side, m.at("vertex").get<Vertex>());
    } catch (const ResourceExhausted&) {
      // The recorded game ended here too.
    }
  }
  return session;
}

// --- GameService ------------------------------------------------------------

GameService::GameService(ServiceOptions options) : options_(std::move(options)) {
  if (!options_.persist_dir) return;
  namespace fs = std::filesystem;
  fs::create_directories(*options_.persist_dir);
  for (const auto& entry : fs::directory_iterator(*options_.persist_dir)) {
    if (entry.path().extension() != ".json") continue;
    std::ifstream in(entry.path());
    nlohmann::json snap = nlohmann::json::parse(in, nullptr, false);
    if (snap.is_discarded()) throw ParseError("unreadable session file " + entry.path().string());
    auto session = GameSession::restore(snap, options_.node_budget);
    auto e = std::make_shared<Entry>();
    std::string id = session->id();
    e->session = std::move(session);
    sessions_[id] = std::move(e);
    ++restored_;
  }
}

std::string GameService::next_id() {
  for (;;) {
    std::uint64_t z = 0x5e55'10aa'0000'0000ULL + ++counter_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    char buf[20];
    std::snprintf(buf, sizeof buf, "g%016llx", static_cast<unsigned long long>(z));
    if (!sessions_.count(buf)) return buf;
  }
}

std::shared_ptr<GameService::Entry> GameService::find(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw UnknownSession("no session '" + id + "'");
  return it->second;
}

void GameService::persist(const GameSession& s) const {
  if (!options_.persist_dir) return;
  auto path = *options_.persist_dir / (s.id() + ".json");
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    out << s.snapshot().dump();
  }
  std::filesystem::rename(tmp, path);
}

nlohmann::json GameService::new_game(const nlohmann::json& request) {
  SessionSetup setup = session_setup_from_json(request);
  auto entry = std::make_shared<Entry>();
  std::string id;
  {
    std::lock_guard lock(mutex_);
    id = next_id();
    sessions_[id] = entry;
  }
  std::lock_guard lock(entry->mutex);
  try {
    entry->session = std::make_unique<GameSession>(id, std::move(setup), options_.node_budget);
  } catch (...) {
    std::lock_guard store(mutex_);
    sessions_.erase(id);
    throw;
  }
  persist(*entry->session);
  return {{"session_id", id}, {"initial_state", entry->session->to_json()}};
}

nlohmann::json GameService::spoiler_move(const std::string& id, const nlohmann::json& request) {
  auto entry = find(id);
  if (!request.is_object()) throw ParseError("request must be a JSON object");
  if (!request.contains("side")) throw ParseError("missing field 'side'");
  if (!request.contains("vertex")) throw ParseError("missing field 'vertex'");
  Side side = parse_side(request.at("side"));
  const auto& v = request.at("vertex");
  if (!v.is_number_integer()) throw ParseError("'vertex' must be an integer");
  std::lock_guard lock(entry->mutex);
  if (!entry->session) throw UnknownSession("no session '" + id + "'");
  const bool negative = !v.is_number_unsigned() && v.get<std::int64_t>() < 0;
  if (negative || v.get<std::uint64_t>() > std::numeric_limits<Vertex>::max())
    throw IllegalMove("vertex " + v.dump() + " is out of range");
  auto& s = *entry->session;
  try {
    auto out = s.spoiler_move(side, v.get<Vertex>());
    persist(s);
    return out;
  } catch (const ResourceExhausted&) {
    persist(s);
    throw;
  }
}

nlohmann::json GameService::game(const std::string& id) {
  auto entry = find(id);
  std::lock_guard lock(entry->mutex);
  if (!entry->session) throw UnknownSession("no session '" + id + "'");
  return entry->session->to_json();
}

nlohmann::json GameService::legal_moves(const std::string& id) {
  auto entry = find(id);
  std::lock_guard lock(entry->mutex);
  if (!entry->session) throw UnknownSession("no session '" + id + "'");
  return entry->session->legal_moves();
}

nlohmann::json GameService::sample(const nlohmann::json& request) const {
  SampleConfig cfg = sample_config_from_json(request);
  return sample_json(cfg, size_field(request, "trial", 0));
}

nlohmann::json GameService::estimate(const nlohmann::json& request) const { return estimate_json(request); }

std::size_t GameService::session_count() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

}  // namespace ehrlab
