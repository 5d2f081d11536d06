#include <doctest.h>

#include <httplib.h>

#include <atomic>
#include <filesystem>
#include <random>
#include <set>
#include <thread>

#include "ehrlab/commands.hpp"
#include "ehrlab/graph_io.hpp"
#include "ehrlab/http_service.hpp"
#include "ehrlab/model_factory.hpp"
#include "ehrlab/session.hpp"
#include "support.hpp"

using namespace ehrlab;
using nlohmann::json;

namespace {

// Service on an ephemeral port for the lifetime of the object.
struct TestServer {
  GameService service;
  httplib::Server server;
  std::thread thread;
  int port = 0;

  explicit TestServer(ServiceOptions options = {}) : service(std::move(options)) {
    register_routes(server, service);
    port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~TestServer() {
    server.stop();
    thread.join();
  }
  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(120, 0);
    return c;
  }
};

struct Reply {
  int status;
  json body;
};

Reply post(httplib::Client& c, const std::string& path, const std::string& body) {
  auto res = c.Post(path, body, "application/json");
  REQUIRE(res);
  return {res->status, json::parse(res->body)};
}
Reply post(httplib::Client& c, const std::string& path, const json& body) { return post(c, path, body.dump()); }
Reply get(httplib::Client& c, const std::string& path) {
  auto res = c.Get(path);
  REQUIRE(res);
  return {res->status, json::parse(res->body)};
}

const json k3 = {{"n", 3}, {"edges", {{0, 1}, {1, 2}, {0, 2}}}};
const json p3 = {{"n", 3}, {"edges", {{0, 1}, {1, 2}}}};

json model_request(std::uint32_t k) {
  // Pseudo-models of one completion vector with different richness.
  TypeTable table(k);
  Graph src = testing_support::to_graph(9, {{0, 1}, {1, 2}, {2, 0}, {2, 3}, {4, 5}, {6, 7}, {7, 8}});
  auto cv = completion_vector(src, 4, 2, table);
  ModelSpec a = default_model_spec(cv, k), b = default_model_spec(cv, k + 1);
  b.extra = 1;
  return {{"left_model_spec", model_spec_to_json(a, table)},
          {"right_model_spec", model_spec_to_json(b, table)},
          {"k", k},
          {"base", 2},
          {"shift", 2},
          {"enrich", true}};
}

}  // namespace

TEST_CASE("error kinds map to HTTP statuses") {
  CHECK(http_status_for("UnknownSession") == 404);
  CHECK(http_status_for("GameOver") == 409);
  CHECK(http_status_for("IllegalMove") == 422);
  CHECK(http_status_for("ResourceExhausted") == 503);
  CHECK(http_status_for("ParseError") == 400);
  CHECK(http_status_for("ContractViolation") == 500);
}

TEST_CASE("a full session over HTTP") {
  TestServer ts;
  auto c = ts.client();
  CHECK(get(c, "/health").body.at("ok") == true);

  auto created = post(c, "/game/new", json{{"left_graph", k3}, {"right_graph", k3}, {"k", 2}});
  REQUIRE(created.status == 200);
  const std::string id = created.body.at("session_id");
  CHECK(created.body.at("initial_state").at("status").at("state") == "InProgress");
  CHECK(created.body.at("initial_state").at("transcript").at("rounds").empty());

  auto legal = get(c, "/game/" + id + "/legal-moves");
  CHECK(legal.body.at("left") == json::array({0, 1, 2}));
  CHECK(legal.body.at("rounds_remaining") == 2);

  const std::set<std::string> labels{"repeat", "close-shallow", "close-deep", "far-shallow", "far-deep"};
  auto m1 = post(c, "/game/" + id + "/spoiler-move", json{{"side", "left"}, {"vertex", 1}});
  REQUIRE(m1.status == 200);
  CHECK(m1.body.at("duplicator_reply").at("side") == "right");
  CHECK(labels.count(m1.body.at("case_label").get<std::string>()));
  CHECK(m1.body.at("audit").empty());
  CHECK(m1.body.at("transcript_delta").at("round") == 1);
  CHECK(m1.body.at("status").at("state") == "InProgress");

  CHECK(post(c, "/game/" + id + "/spoiler-move", json{{"side", "right"}, {"vertex", 7}}).status == 422);
  CHECK(post(c, "/game/" + id + "/spoiler-move", json{{"side", "right"}, {"vertex", -1}}).status == 422);
  CHECK(post(c, "/game/" + id + "/spoiler-move", json{{"side", "up"}, {"vertex", 0}}).status == 400);
  CHECK(post(c, "/game/" + id + "/spoiler-move", json{{"vertex", 0}}).status == 400);
  CHECK(post(c, "/game/" + id + "/spoiler-move", std::string("{not json")).status == 400);

  auto m2 = post(c, "/game/" + id + "/spoiler-move", json{{"side", "right"}, {"vertex", 2}});
  REQUIRE(m2.status == 200);
  CHECK(m2.body.at("status").at("state") == "DuplicatorHeld");

  auto over = post(c, "/game/" + id + "/spoiler-move", json{{"side", "left"}, {"vertex", 0}});
  CHECK(over.status == 409);
  CHECK(over.body.at("error") == "GameOver");
  CHECK(get(c, "/game/" + id + "/legal-moves").body.at("left").empty());

  auto full = get(c, "/game/" + id);
  CHECK(full.body.at("transcript").at("rounds").size() == 2);
  CHECK(full.body.at("transcript").at("duplicator_wins") == true);
  CHECK(full.body.at("moves").size() == 2);

  auto missing = get(c, "/game/nope");
  CHECK(missing.status == 404);
  CHECK(missing.body.at("error") == "UnknownSession");
  CHECK(post(c, "/game/nope/spoiler-move", json{{"side", "left"}, {"vertex", 0}}).status == 404);
}

TEST_CASE("session creation errors") {
  TestServer ts;
  auto c = ts.client();
  CHECK(post(c, "/game/new", json{{"left_graph", k3}, {"k", 2}}).status == 400);
  CHECK(post(c, "/game/new", json{{"left_graph", k3}, {"right_graph", k3}}).status == 400);
  CHECK(post(c, "/game/new", json{{"left_graph", k3}, {"right_graph", k3}, {"k", 0}}).status == 422);
  CHECK(post(c, "/game/new", json{{"left_graph", {{"n", 2}, {"edges", {{0, 5}}}}}, {"right_graph", k3}, {"k", 1}})
            .status == 400);
  CHECK(ts.service.session_count() == 0);
}

TEST_CASE("a missing free component answers 503 and ends the game") {
  TestServer ts;
  auto c = ts.client();
  auto created = post(c, "/game/new", json{{"left_graph", k3}, {"right_graph", p3}, {"k", 2}});
  const std::string id = created.body.at("session_id");
  auto r = post(c, "/game/" + id + "/spoiler-move", json{{"side", "right"}, {"vertex", 0}});
  CHECK(r.status == 503);
  CHECK(r.body.at("error") == "ResourceExhausted");
  CHECK(r.body.at("message").get<std::string>().find("no free tree component") != std::string::npos);
  auto g = get(c, "/game/" + id).body;
  CHECK(g.at("status").at("state") == "ResourceExhausted");
  CHECK(g.at("status").contains("detail"));
  CHECK(g.at("transcript").at("rounds").empty());
  CHECK(post(c, "/game/" + id + "/spoiler-move", json{{"side", "left"}, {"vertex", 0}}).status == 409);
}

TEST_CASE("replaying recorded moves reproduces the transcript") {
  TestServer ts;
  auto c = ts.client();
  std::mt19937_64 rng(5);
  for (std::uint32_t k : {1u, 2u, 3u}) {
    json request = model_request(k);
    auto first = post(c, "/game/new", request);
    REQUIRE(first.status == 200);
    const std::string id = first.body.at("session_id");
    std::size_t nl = first.body.at("initial_state").at("left").at("n");
    std::size_t nr = first.body.at("initial_state").at("right").at("n");
    for (std::uint32_t round = 0; round < k; ++round) {
      bool left = rng() % 2;
      auto v = rng() % (left ? nl : nr);
      auto r = post(c, "/game/" + id + "/spoiler-move", json{{"side", left ? "left" : "right"}, {"vertex", v}});
      REQUIRE(r.status == 200);
      CHECK(r.body.at("audit").empty());
    }
    auto recorded = get(c, "/game/" + id).body;
    CHECK(recorded.at("status").at("state") == "DuplicatorHeld");

    auto second = post(c, "/game/new", request);
    const std::string id2 = second.body.at("session_id");
    CHECK(id2 != id);
    for (const auto& round : recorded.at("transcript").at("rounds")) {
      const bool left = round.at("side") == "left";
      post(c, "/game/" + id2 + "/spoiler-move",
           json{{"side", round.at("side")}, {"vertex", left ? round.at("x") : round.at("y")}});
    }
    auto replayed = get(c, "/game/" + id2).body;
    replayed.erase("session_id");
    recorded.erase("session_id");
    CHECK(replayed == recorded);
  }
}

TEST_CASE("sessions persist across service restarts") {
  auto dir = std::filesystem::temp_directory_path() / ("ehrlab_persist_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::string id, exhausted;
  json before, before_exhausted;
  {
    GameService svc(ServiceOptions{dir, kDefaultNodeBudget});
    id = svc.new_game(model_request(2)).at("session_id");
    svc.spoiler_move(id, json{{"side", "left"}, {"vertex", 0}});
    before = svc.game(id);
    exhausted = svc.new_game(json{{"left_graph", k3}, {"right_graph", p3}, {"k", 2}}).at("session_id");
    CHECK_THROWS_AS(svc.spoiler_move(exhausted, json{{"side", "right"}, {"vertex", 1}}), ResourceExhausted);
    before_exhausted = svc.game(exhausted);
  }
  GameService again(ServiceOptions{dir, kDefaultNodeBudget});
  CHECK(again.restored() == 2);
  CHECK(again.game(id) == before);
  CHECK(again.game(exhausted) == before_exhausted);
  auto next = again.spoiler_move(id, json{{"side", "right"}, {"vertex", 1}});
  CHECK(next.at("status").at("state") == "DuplicatorHeld");
  std::filesystem::remove_all(dir);
}

TEST_CASE("stateless endpoints are reproducible") {
  TestServer ts;
  auto c = ts.client();
  json sample{{"n", 50}, {"c", 1.5}, {"seed", 9}};
  auto a = post(c, "/sample", sample), b = post(c, "/sample", sample);
  REQUIRE(a.status == 200);
  CHECK(a.body == b.body);
  CHECK(graph_from_json(a.body.at("graph")) == sample_gnp(SampleConfig{50, 1.5, 1, 9, 1}, 0));
  CHECK(post(c, "/sample", json{{"n", 50}, {"c", 1.5}}).status == 400);
  CHECK(post(c, "/sample", json{{"n", 5}, {"c", 9.0}, {"seed", 1}}).status == 422);

  json est{{"event", "no-short-cycles"}, {"params", {{"M1", 3}}}, {"n", 200}, {"c", 1.0},
           {"trials", 300}, {"seed", 4},  {"workers", 2}};
  auto e1 = post(c, "/estimate", est), e2 = post(c, "/estimate", est);
  REQUIRE(e1.status == 200);
  CHECK(e1.body == e2.body);
  est["workers"] = 1;
  CHECK(post(c, "/estimate", est).body == e1.body);
  CHECK(e1.body.at("analytic").size() == 2);
  est.erase("seed");
  CHECK(post(c, "/estimate", est).status == 400);
  CHECK(post(c, "/estimate", json{{"event", "nope"}, {"n", 10}, {"c", 1.0}, {"trials", 2}, {"seed", 1}}).status ==
        422);
}

TEST_CASE("concurrent sessions") {
  TestServer ts;
  constexpr int kClients = 4;
  std::atomic<int> held{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < kClients; ++t)
    threads.emplace_back([&, t] {
      auto c = ts.client();
      auto created = c.Post("/game/new", json{{"left_graph", k3}, {"right_graph", k3}, {"k", 3}}.dump(),
                            "application/json");
      if (!created || created->status != 200) return;
      std::string id = json::parse(created->body).at("session_id");
      json last;
      for (int r = 0; r < 3; ++r) {
        auto res = c.Post("/game/" + id + "/spoiler-move",
                          json{{"side", (r + t) % 2 ? "left" : "right"}, {"vertex", (r + t) % 3}}.dump(),
                          "application/json");
        if (!res || res->status != 200) return;
        last = json::parse(res->body);
      }
      if (last.at("status").at("state") == "DuplicatorHeld") ++held;
    });
  for (auto& th : threads) th.join();
  CHECK(held == kClients);
  CHECK(ts.service.session_count() == kClients);
}

TEST_CASE("command helpers") {
  Graph g = testing_support::to_graph(8, {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {5, 6}, {6, 7}, {7, 5}, {5, 3}, {4, 6}});
  auto census = classify_json(g);
  CHECK(census.at("counts") == json{{"tree", 0}, {"unicyclic", 1}, {"complex", 1}});
  auto types = types_json(testing_support::to_graph(5, {{0, 1}, {1, 2}, {2, 0}, {3, 4}}), 1, 2, 3);
  CHECK(types.at("components").at(0).at("type") == "[(),(),()]");
  CHECK(types.at("components").at(1).at("type") == "(1x())");
  CHECK(types_json(testing_support::cycle_graph(4), 1, 2, 3).at("components").at(0).at("type").is_null());
  CHECK(solve_json(graph_from_json(k3), graph_from_json(p3), 2, false, 1000).at("winner") == "Spoiler");
  CHECK(solve_json(graph_from_json(p3), graph_from_json(p3), 2, true, 1000).at("winner") == "Duplicator");
  CHECK_THROWS_AS(solve_json(graph_from_json(k3), graph_from_json(p3), 1, true, 1000), NotTreelike);
  CHECK(verify_theory_json(Graph(2, {}), 2, 0, 2).at("holds") == true);
  CHECK(verify_theory_json(Graph(1, {}), 2, 0, 2).at("holds") == false);

  ::setenv("EHRLAB_BUDGET", "1234", 1);
  CHECK(node_budget_from_env() == 1234);
  ::setenv("EHRLAB_BUDGET", "lots", 1);
  CHECK_THROWS_AS(node_budget_from_env(), InvalidArgument);
  ::unsetenv("EHRLAB_BUDGET");
  CHECK(node_budget_from_env() == kDefaultNodeBudget);
}
