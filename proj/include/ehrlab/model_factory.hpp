#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include <json.hpp>

#include "ehrlab/completion.hpp"
#include "ehrlab/graph.hpp"
#include "ehrlab/types.hpp"

namespace ehrlab {

// Smallest rooted tree of the given type; the root is vertex 0.
Graph realize_tree_type(TreeTypeId sigma, const TypeTable& table);
// Smallest unicyclic graph of the given cycle type; the cycle is 0..s-1 in word order.
Graph realize_cycle_type(CycleTypeId gamma, const TypeTable& table);

// Every unlabelled rooted tree with 1..max_vertices vertices as a parent
// array (parent[0] = -1), ordered by size and then canonical form.
std::vector<std::vector<int>> all_rooted_trees(std::size_t max_vertices);

struct ModelSpec {
  CompletionVector completion;
  std::size_t richness = 1;                   // copies of each generator tree
  std::vector<std::vector<int>> generators;   // parent arrays
  std::size_t extra = 0;                      // default extra copies when n_gamma = k
  std::map<CycleTypeId, std::size_t> extra_unicyclic;  // per-type override

  explicit ModelSpec(CompletionVector v) : completion(std::move(v)) {}
};

// Default padding: every rooted tree on at most 5 vertices.
ModelSpec default_model_spec(const CompletionVector& v, std::size_t richness);

// Disjoint union of n_gamma realizations of each top-level cycle type (k + extra
// when n_gamma = k) and 'richness' copies of each generator. InconsistentSpec
// if the completion vector is inconsistent; InvalidArgument if richness < k.
Graph build_model(const ModelSpec& spec, TypeTable& table);

// g with 'copies' disjoint copies of 'part' appended.
Graph with_copies(const Graph& g, const Graph& part, std::size_t copies);

nlohmann::json model_spec_to_json(const ModelSpec& spec, const TypeTable& table);
ModelSpec model_spec_from_json(const nlohmann::json& j, TypeTable& table);

}  // namespace ehrlab
