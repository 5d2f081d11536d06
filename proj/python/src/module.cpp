#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>
#include <string>

#include "ehrlab/commands.hpp"
#include "ehrlab/graph_io.hpp"
#include "ehrlab/model_factory.hpp"
#include "ehrlab/montecarlo.hpp"
#include "ehrlab/session.hpp"

namespace py = pybind11;
using namespace ehrlab;
using nlohmann::json;

// JSON crosses the boundary as text; the Python package converts to dicts.

namespace {

json parse(const std::string& text) {
  auto j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ParseError("argument is not valid JSON");
  return j;
}

Graph graph_arg(const std::string& text) { return graph_from_json(parse(text)); }

Side side_arg(const std::string& s) {
  if (s == "left") return Side::Left;
  if (s == "right") return Side::Right;
  throw ParseError("side must be 'left' or 'right', got '" + s + "'");
}

class Game {
 public:
  explicit Game(const std::string& request)
      : session_("py", session_setup_from_json(parse(request)), node_budget_from_env()) {}
  std::string move(const std::string& side, Vertex vertex) { return session_.spoiler_move(side_arg(side), vertex).dump(); }
  std::string state() const { return session_.to_json().dump(); }
  std::string legal_moves() const { return session_.legal_moves().dump(); }
  bool finished() const { return session_.finished(); }

 private:
  GameSession session_;
};

}  // namespace

PYBIND11_MODULE(_ehrlab, m) {
  m.doc() = "Native core of the ehrlab package";

  static py::exception<Error> error(m, "EhrlabError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::tuple args = py::make_tuple(e.kind(), std::string(e.what()));
      PyErr_SetObject(error.ptr(), args.ptr());
    }
  });

  m.def("classify", [](const std::string& g) { return classify_json(graph_arg(g)).dump(); });
  m.def("types", [](const std::string& g, std::size_t m_, std::uint32_t k, std::optional<std::size_t> s) {
    return types_json(graph_arg(g), m_, k, s).dump();
  });
  m.def("completion", [](const std::string& g, std::uint32_t k, std::uint32_t M1, std::uint32_t M2) {
    return completion_json(graph_arg(g), k, M1, M2).dump();
  });
  m.def("verify_theory", [](const std::string& g, std::size_t ell_max, std::size_t m_, std::uint32_t k) {
    return verify_theory_json(graph_arg(g), ell_max, m_, k).dump();
  });
  m.def("solve", [](const std::string& l, const std::string& r, std::size_t k, bool dehr,
                    std::optional<std::size_t> budget) {
    Graph left = graph_arg(l), right = graph_arg(r);
    std::size_t b = budget ? *budget : node_budget_from_env();
    py::gil_scoped_release release;
    return solve_json(left, right, k, dehr, b).dump();
  });
  m.def("sample", [](const std::string& request) {
    auto j = parse(request);
    return sample_json(sample_config_from_json(j), j.value("trial", std::size_t{0})).dump();
  });
  m.def("estimate", [](const std::string& request) {
    auto j = parse(request);
    py::gil_scoped_release release;
    return estimate_json(j).dump();
  });
  m.def("build_model", [](const std::string& spec_text) {
    auto spec = parse(spec_text);
    std::uint32_t k = 0;
    try {
      k = spec.at("completion").at("k").get<std::uint32_t>();
    } catch (const json::exception& e) {
      throw ParseError(e.what());
    }
    if (k == 0) throw InvalidArgument("completion k must be positive");
    TypeTable table(k);
    return graph_to_json(build_model(model_spec_from_json(spec, table), table)).dump();
  });
  m.def("no_short_cycle_limit", [](double c, std::uint32_t M1) {
    auto v = no_short_cycle_limit(c, M1);
    return py::make_tuple(v.paper, v.standard);
  });
  m.def("event_names", &event_names);

  py::class_<Game>(m, "Game")
      .def(py::init<const std::string&>())
      .def("move", &Game::move)
      .def("state", &Game::state)
      .def("legal_moves", &Game::legal_moves)
      .def_property_readonly("finished", &Game::finished);
}
