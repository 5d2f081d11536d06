#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include <json.hpp>

#include "ehrlab/game.hpp"
#include "ehrlab/graph.hpp"
#include "ehrlab/montecarlo.hpp"

namespace ehrlab {

// JSON-producing operations shared by the command-line tool, the HTTP service
// and the Python module.

// EHRLAB_BUDGET if set to a positive integer, else kDefaultNodeBudget.
// InvalidArgument for an unparsable value.
std::size_t node_budget_from_env();

// {"n", "edges", "components": [...], "counts": {"tree", "unicyclic", "complex"}}
nlohmann::json classify_json(const Graph& g);

// Tree components get the type rooted at their smallest vertex; unicyclic
// components get their cycle type when the cycle is no longer than 's'.
nlohmann::json types_json(const Graph& g, std::size_t m, std::uint32_t k, std::optional<std::size_t> s = {});

// {"completion": CompletionVector, "consistency": report}
nlohmann::json completion_json(const Graph& g, std::uint32_t k, std::uint32_t M1, std::uint32_t M2);

// NO_ell for ell <= ell_max and YES_sigma for every sigma in Sigma_{m,k}.
nlohmann::json verify_theory_json(const Graph& g, std::size_t ell_max, std::size_t m, std::uint32_t k);

// Exact game value. DEHR needs two trees, rooted and designated at vertex 0.
nlohmann::json solve_json(const Graph& left, const Graph& right, std::size_t rounds, bool dehr,
                          std::size_t node_budget);

// {"n", "c", "seed", "trial"?, "workers"?} with a required seed. ParseError otherwise.
SampleConfig sample_config_from_json(const nlohmann::json& j);
// {"graph", "n", "c", "seed", "trial", "edges"}
nlohmann::json sample_json(const SampleConfig& cfg, std::size_t trial);

// Request: {"event", "params"?, "n", "c", "trials", "seed", "workers"?, "per_trial"?}.
nlohmann::json estimate_json(const nlohmann::json& request);

}  // namespace ehrlab
