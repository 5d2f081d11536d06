#pragma once

#include <string>

#include "ehrlab/session.hpp"

namespace httplib {
class Server;
}

namespace ehrlab {

// HTTP status for an error kind: 404 UnknownSession, 409 GameOver,
// 422 IllegalMove / InvalidArgument, 503 ResourceExhausted / BudgetExceeded,
// 400 for malformed input, 500 otherwise.
int http_status_for(const std::string& kind);

// POST /game/new, POST /game/{id}/spoiler-move, GET /game/{id},
// GET /game/{id}/legal-moves, POST /sample, POST /estimate, GET /health.
// Errors are answered with {"error": kind, "message": text}.
void register_routes(httplib::Server& server, GameService& service);

}  // namespace ehrlab
