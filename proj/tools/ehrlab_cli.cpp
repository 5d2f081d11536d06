// ehrlab: command-line front end. Results go to stdout as JSON; errors go to
// stderr as {"error": kind, "message": text} with exit code 1, or 2 for
// malformed input.

#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "ehrlab/commands.hpp"
#include "ehrlab/completion.hpp"
#include "ehrlab/graph_io.hpp"
#include "ehrlab/http_service.hpp"
#include "ehrlab/model_factory.hpp"
#include "ehrlab/session.hpp"

using namespace ehrlab;
using nlohmann::json;

namespace {

constexpr int kExitError = 1;
constexpr int kExitMalformed = 2;

void emit(const json& j) { std::cout << j.dump(2) << std::endl; }

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ParseError(path + ": not valid JSON");
  return j;
}

Side parse_side(const std::string& s) {
  if (s == "left" || s == "l") return Side::Left;
  if (s == "right" || s == "r") return Side::Right;
  throw ParseError("side must be 'left' or 'right', got '" + s + "'");
}

int play_stdin(GameSession& session) {
  std::string line;
  while (!session.finished() && std::getline(std::cin, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream in(line);
    std::string side;
    long long vertex = -1;
    if (!(in >> side >> vertex) || vertex < 0) {
      std::cerr << json{{"error", "ParseError"}, {"message", "expected '<left|right> <vertex>'"}}.dump() << std::endl;
      continue;
    }
    try {
      std::cout << session.spoiler_move(parse_side(side), static_cast<Vertex>(vertex)).dump() << std::endl;
    } catch (const IllegalMove& e) {
      std::cerr << json{{"error", e.kind()}, {"message", e.what()}}.dump() << std::endl;
    } catch (const ParseError& e) {
      std::cerr << json{{"error", e.kind()}, {"message", e.what()}}.dump() << std::endl;
    }
  }
  return 0;
}

httplib::Server* g_server = nullptr;

void stop_server(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"First-order games and statistics on sparse random graphs"};
  app.require_subcommand(1);

  // sample
  auto* sample = app.add_subcommand("sample", "Draw G(n, c/n)");
  std::size_t s_n = 0, s_trial = 0;
  double s_c = 1;
  std::uint64_t s_seed = 0;
  std::string s_out;
  sample->add_option("--n", s_n, "Vertices")->required();
  sample->add_option("--c", s_c, "Average degree parameter")->required();
  sample->add_option("--seed", s_seed, "Seed")->required();
  sample->add_option("--trial", s_trial, "Trial index under the seed");
  sample->add_option("--out", s_out, "Write the graph here (.json or edge list)");

  // classify
  auto* classify = app.add_subcommand("classify", "Component census");
  std::string in_path;
  classify->add_option("--in", in_path, "Graph file")->required();

  // types
  auto* types = app.add_subcommand("types", "Tree and cycle types per component");
  std::size_t t_m = 0;
  std::uint32_t t_k = 1;
  std::optional<std::size_t> t_s;
  types->add_option("--in", in_path, "Graph file")->required();
  types->add_option("--m", t_m, "Depth")->required();
  types->add_option("--k", t_k, "Count cutoff")->required();
  types->add_option("--s", t_s, "Longest cycle to type");

  // completion
  auto* completion = app.add_subcommand("completion", "Completion vector and consistency report");
  std::uint32_t c_k = 1, c_M1 = 3, c_M2 = 0;
  completion->add_option("--in", in_path, "Graph file")->required();
  completion->add_option("--k", c_k, "Count cutoff")->required();
  completion->add_option("--M1", c_M1, "Longest cycle")->required();
  completion->add_option("--M2", c_M2, "Depth")->required();

  // verify-theory
  auto* verify = app.add_subcommand("verify-theory", "Check the finite fragment of the almost-sure theory");
  std::size_t v_ell = 1, v_m = 0;
  std::uint32_t v_k = 1;
  verify->add_option("--in", in_path, "Graph file")->required();
  verify->add_option("--ell-max", v_ell, "Largest ell for NO_ell")->required();
  verify->add_option("--m", v_m, "Depth of YES_sigma")->required();
  verify->add_option("--k", v_k, "Count cutoff")->required();

  // estimate
  auto* estimate = app.add_subcommand("estimate", "Monte Carlo estimate of an event");
  std::string e_event, e_params, e_csv;
  std::size_t e_n = 0, e_trials = 0, e_workers = 1;
  double e_c = 1;
  std::uint64_t e_seed = 0;
  std::optional<std::uint32_t> e_M1, e_M2, e_k, e_s, e_d, e_W, e_u, e_v;
  std::string e_completion_file;
  estimate->add_option("--event", e_event, "Event name")->required();
  estimate->add_option("--n", e_n, "Vertices")->required();
  estimate->add_option("--c", e_c, "Average degree parameter")->required();
  estimate->add_option("--trials", e_trials, "Trials")->required();
  estimate->add_option("--seed", e_seed, "Seed")->required();
  estimate->add_option("--workers", e_workers, "Threads");
  estimate->add_option("--params", e_params, "Event parameters as a JSON object");
  estimate->add_option("--completion", e_completion_file, "Completion vector or model spec JSON (event 'completion')");
  estimate->add_option("--M1", e_M1);
  estimate->add_option("--M2", e_M2);
  estimate->add_option("--k", e_k);
  estimate->add_option("--s", e_s);
  estimate->add_option("--d", e_d);
  estimate->add_option("--W", e_W);
  estimate->add_option("--u", e_u);
  estimate->add_option("--v", e_v);
  estimate->add_option("--csv", e_csv, "Write per-trial values here");

  // build-model
  auto* build = app.add_subcommand("build-model", "Pseudo-model from a model spec");
  std::string b_spec, b_out;
  build->add_option("--spec", b_spec, "Model spec JSON")->required();
  build->add_option("--out", b_out, "Output graph file")->required();

  // play
  auto* play_cmd = app.add_subcommand("play", "Spoiler against the strategy Duplicator");
  std::string p_left, p_right, p_spoiler = "random";
  std::size_t p_k = 1, p_base = 3, p_shift = 0;
  std::uint64_t p_seed = 0;
  bool p_enrich = false;
  play_cmd->add_option("--left", p_left, "Left graph file")->required();
  play_cmd->add_option("--right", p_right, "Right graph file")->required();
  play_cmd->add_option("--k", p_k, "Rounds")->required();
  play_cmd->add_option("--base", p_base, "Threshold base");
  play_cmd->add_option("--shift", p_shift, "Threshold exponent shift");
  play_cmd->add_option("--spoiler", p_spoiler, "random, adversarial, minimax or stdin")
      ->check(CLI::IsMember({"random", "adversarial", "minimax", "stdin"}));
  play_cmd->add_option("--seed", p_seed, "Spoiler seed");
  play_cmd->add_flag("--enrich", p_enrich, "Add free components on demand");

  // solve
  auto* solve = app.add_subcommand("solve", "Exact game value");
  std::string g_left, g_right;
  std::size_t g_k = 1;
  std::optional<std::size_t> g_budget;
  bool g_dehr = false;
  solve->add_option("--left", g_left, "Left graph file")->required();
  solve->add_option("--right", g_right, "Right graph file")->required();
  solve->add_option("--k", g_k, "Rounds")->required();
  solve->add_flag("--dehr", g_dehr, "Distance-preserving game on trees rooted at 0");
  solve->add_option("--budget", g_budget, "Node budget (default EHRLAB_BUDGET)");

  // serve
  auto* serve = app.add_subcommand("serve", "HTTP game service");
  int v_port = 8080;
  std::string v_host = "127.0.0.1", v_persist;
  serve->add_option("--port", v_port, "Port");
  serve->add_option("--host", v_host, "Address to bind");
  serve->add_option("--persist", v_persist, "Directory for session snapshots");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << json{{"error", "ParseError"}, {"message", e.what()}}.dump() << std::endl;
    return kExitMalformed;
  }

  try {
    if (*sample) {
      SampleConfig cfg{s_n, s_c, 1, s_seed, 1};
      auto out = sample_json(cfg, s_trial);
      if (!s_out.empty()) {
        write_graph_file(graph_from_json(out.at("graph")), s_out);
        out.erase("graph");
        out["out"] = s_out;
      }
      emit(out);
    } else if (*classify) {
      emit(classify_json(read_graph_file(in_path)));
    } else if (*types) {
      emit(types_json(read_graph_file(in_path), t_m, t_k, t_s));
    } else if (*completion) {
      emit(completion_json(read_graph_file(in_path), c_k, c_M1, c_M2));
    } else if (*verify) {
      emit(verify_theory_json(read_graph_file(in_path), v_ell, v_m, v_k));
    } else if (*estimate) {
      json params = json::object();
      if (!e_params.empty()) {
        params = json::parse(e_params, nullptr, false);
        if (params.is_discarded() || !params.is_object()) throw ParseError("--params must be a JSON object");
      }
      auto put = [&](const char* key, const std::optional<std::uint32_t>& v) {
        if (v) params[key] = *v;
      };
      put("M1", e_M1);
      put("M2", e_M2);
      put("k", e_k);
      put("s", e_s);
      put("d", e_d);
      put("W", e_W);
      put("u", e_u);
      put("v", e_v);
      if (!e_completion_file.empty()) {
        // A completion vector, or a model spec holding one.
        json v = read_json_file(e_completion_file);
        params["completion"] = v.contains("completion") ? v.at("completion") : v;
      }
      json request{{"event", e_event}, {"params", params}, {"n", e_n},          {"c", e_c},
                   {"trials", e_trials}, {"seed", e_seed}, {"workers", e_workers}};
      SampleConfig cfg = sample_config_from_json(request);
      auto report = estimate_event(cfg, make_event(e_event, params), !e_csv.empty());
      if (!e_csv.empty()) {
        std::ofstream csv(e_csv);
        if (!csv) throw InvalidArgument("cannot write " + e_csv);
        csv << per_trial_csv(report);
      }
      auto out = report_to_json(report);
      out["params"] = params;
      emit(out);
    } else if (*build) {
      json spec = read_json_file(b_spec);
      std::uint32_t k = 0;
      try {
        k = spec.at("completion").at("k").get<std::uint32_t>();
      } catch (const json::exception& e) {
        throw ParseError(b_spec + ": " + e.what());
      }
      if (k == 0) throw InvalidArgument("completion k must be positive");
      TypeTable table(k);
      Graph g = build_model(model_spec_from_json(spec, table), table);
      write_graph_file(g, b_out);
      auto census = classify_json(g);
      emit({{"out", b_out}, {"n", g.vertex_count()}, {"edges", g.edge_count()}, {"counts", census.at("counts")}});
    } else if (*play_cmd) {
      std::size_t budget = node_budget_from_env();
      SessionSetup setup{read_graph_file(p_left), read_graph_file(p_right), Thresholds::make(p_k, p_base, p_shift)};
      setup.enrich = p_enrich;
      GameSession session("cli", std::move(setup), budget);
      if (p_spoiler == "stdin") {
        play_stdin(session);
      } else {
        std::unique_ptr<Spoiler> spoiler;
        if (p_spoiler == "random") spoiler = std::make_unique<RandomSpoiler>(p_seed);
        else if (p_spoiler == "adversarial") spoiler = std::make_unique<AdversarialSpoiler>(p_seed);
        else spoiler = std::make_unique<MinimaxSpoiler>(budget);
        while (!session.finished()) {
          auto [side, v] = spoiler->next(session.context(), session.state());
          try {
            session.spoiler_move(side, v);
          } catch (const ResourceExhausted&) {
            // Reported through the session status.
          }
        }
      }
      emit(session.to_json());
    } else if (*solve) {
      emit(solve_json(read_graph_file(g_left), read_graph_file(g_right), g_k, g_dehr,
                      g_budget ? *g_budget : node_budget_from_env()));
    } else if (*serve) {
      ServiceOptions options;
      options.node_budget = node_budget_from_env();
      if (!v_persist.empty()) options.persist_dir = v_persist;
      GameService service(options);
      httplib::Server server;
      register_routes(server, service);
      g_server = &server;
      std::signal(SIGINT, stop_server);
      std::signal(SIGTERM, stop_server);
      if (!server.bind_to_port(v_host, v_port)) throw InvalidArgument("cannot bind " + v_host + ":" + std::to_string(v_port));
      std::cerr << json{{"listening", v_host + ":" + std::to_string(v_port)}, {"restored", service.restored()}}.dump()
                << std::endl;
      server.listen_after_bind();
    }
  } catch (const Error& e) {
    std::cerr << json{{"error", e.kind()}, {"message", e.what()}}.dump() << std::endl;
    return e.kind() == "ParseError" || e.kind() == "InvalidGraph" ? kExitMalformed : kExitError;
  } catch (const json::exception& e) {
    std::cerr << json{{"error", "ParseError"}, {"message", e.what()}}.dump() << std::endl;
    return kExitMalformed;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "InternalError"}, {"message", e.what()}}.dump() << std::endl;
    return kExitError;
  }
  return 0;
}
