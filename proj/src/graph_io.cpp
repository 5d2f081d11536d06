#include "ehrlab/graph_io.hpp"

#include <fstream>
#include <sstream>

#include "ehrlab/error.hpp"

namespace ehrlab {

nlohmann::json graph_to_json(const Graph& g) {
  nlohmann::json edges = nlohmann::json::array();
  for (auto [u, v] : g.edges()) edges.push_back({u, v});
  return {{"n", g.vertex_count()}, {"edges", std::move(edges)}};
}

Graph graph_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("edges"))
    throw ParseError("graph JSON needs fields \"n\" and \"edges\"");
  const auto& jn = j.at("n");
  if (!jn.is_number_integer() || jn.get<long long>() < 0) throw ParseError("\"n\" must be a non-negative integer");
  auto n = jn.get<std::size_t>();
  std::vector<Edge> edges;
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
      throw ParseError("each edge must be a pair of integers");
    long long u = e[0].get<long long>(), v = e[1].get<long long>();
    if (u < 0 || v < 0) throw ParseError("negative vertex id");
    edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
  }
  try {
    return Graph(n, edges);
  } catch (const InvalidGraph& e) {
    throw ParseError(e.what());
  }
}

std::string graph_to_edge_list(const Graph& g) {
  std::ostringstream out;
  out << "n=" << g.vertex_count() << '\n';
  for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
  return out.str();
}

Graph graph_from_edge_list(std::istream& in) {
  std::string line;
  std::optional<std::size_t> n;
  std::vector<Edge> edges;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    std::istringstream fields(line.substr(first));
    if (!n) {
      std::string header;
      fields >> header;
      if (header.rfind("n=", 0) != 0) throw ParseError("edge list must start with header n=<int>");
      try {
        std::size_t pos = 0;
        long long value = std::stoll(header.substr(2), &pos);
        if (pos != header.size() - 2 || value < 0) throw std::invalid_argument("bad");
        n = static_cast<std::size_t>(value);
      } catch (const std::exception&) {
        throw ParseError("bad header '" + header + "'");
      }
      continue;
    }
    long long u = 0, v = 0;
    std::string rest;
    if (!(fields >> u >> v) || (fields >> rest) || u < 0 || v < 0)
      throw ParseError("line " + std::to_string(lineno) + ": expected \"u v\"");
    edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
  }
  if (!n) throw ParseError("missing header n=<int>");
  try {
    return Graph(*n, edges);
  } catch (const InvalidGraph& e) {
    throw ParseError(e.what());
  }
}

Graph read_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();
  auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path + ": " + e.what());
    }
    return graph_from_json(j);
  }
  std::istringstream stream(text);
  return graph_from_edge_list(stream);
}

void write_graph_file(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0)
    out << graph_to_json(g).dump() << '\n';
  else
    out << graph_to_edge_list(g);
}

}  // namespace ehrlab
