#include "ehrlab/http_service.hpp"

#include <functional>

#include <httplib.h>

namespace ehrlab {

int http_status_for(const std::string& kind) {
  if (kind == "UnknownSession") return 404;
  if (kind == "GameOver") return 409;
  if (kind == "IllegalMove" || kind == "InvalidArgument" || kind == "InconsistentSpec" ||
      kind == "EnumerationTooLarge" || kind == "NotTreelike" || kind == "PictureTooLarge")
    return 422;
  if (kind == "ResourceExhausted" || kind == "BudgetExceeded") return 503;
  if (kind == "ParseError" || kind == "InvalidGraph") return 400;
  return 500;
}

namespace {

void reply(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void fail(httplib::Response& res, const std::string& kind, const std::string& message) {
  reply(res, http_status_for(kind), {{"error", kind}, {"message", message}});
}

nlohmann::json body_of(const httplib::Request& req) {
  auto j = nlohmann::json::parse(req.body, nullptr, false);
  if (j.is_discarded()) throw ParseError("request body is not valid JSON");
  return j;
}

using Handler = std::function<nlohmann::json(const httplib::Request&)>;

httplib::Server::Handler guarded(Handler h) {
  return [h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
    try {
      reply(res, 200, h(req));
    } catch (const Error& e) {
      fail(res, e.kind(), e.what());
    } catch (const nlohmann::json::exception& e) {
      fail(res, "ParseError", e.what());
    } catch (const std::exception& e) {
      fail(res, "InternalError", e.what());
    }
  };
}

}  // namespace

void register_routes(httplib::Server& server, GameService& service) {
  server.Get("/health", guarded([&](const httplib::Request&) {
               return nlohmann::json{{"ok", true}, {"sessions", service.session_count()}};
             }));
  server.Post("/game/new", guarded([&](const httplib::Request& req) { return service.new_game(body_of(req)); }));
  server.Post(R"(/game/([^/]+)/spoiler-move)", guarded([&](const httplib::Request& req) {
                return service.spoiler_move(req.matches[1], body_of(req));
              }));
  server.Get(R"(/game/([^/]+)/legal-moves)",
             guarded([&](const httplib::Request& req) { return service.legal_moves(req.matches[1]); }));
  server.Get(R"(/game/([^/]+))", guarded([&](const httplib::Request& req) { return service.game(req.matches[1]); }));
  server.Post("/sample", guarded([&](const httplib::Request& req) { return service.sample(body_of(req)); }));
  server.Post("/estimate", guarded([&](const httplib::Request& req) { return service.estimate(body_of(req)); }));
}

}  // namespace ehrlab
