#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "ehrlab/graph.hpp"

namespace ehrlab {

// JSON form: {"n": int, "edges": [[u, v], ...]}.
nlohmann::json graph_to_json(const Graph& g);
Graph graph_from_json(const nlohmann::json& j);

// Edge-list form: header line "n=<int>", then one "u v" pair per line.
// Blank lines and lines starting with '#' are ignored.
std::string graph_to_edge_list(const Graph& g);
Graph graph_from_edge_list(std::istream& in);

// Reads either format, chosen by the first non-blank character ('{' => JSON).
Graph read_graph_file(const std::string& path);
void write_graph_file(const Graph& g, const std::string& path);

}  // namespace ehrlab
