#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ehrlab/completion.hpp"
#include "ehrlab/graph.hpp"
#include "ehrlab/types.hpp"

namespace ehrlab {

// NO_ell: no set of ell vertices spans ell+1 or more edges.
//
// Components of excess <= 0 cannot host a witness, so forests and unicyclic
// graphs answer immediately. Otherwise a knapsack over per-component profiles
// (best edge surplus for each subset size) decides. Profiles are exact for
// complex components of at most 20 vertices or when all subsets of size <= ell
// number at most 2e6; beyond that a greedy peeling lower bound is used, so a
// 'false' answer is always exact and a 'true' answer is exact in that regime.
bool check_no_ell(const Graph& g, std::size_t ell);

// For each tree type sigma of depth class m, the number of tree components
// that realize sigma for at least one choice of root.
std::map<TreeTypeId, std::size_t> tree_component_type_counts(const Graph& g, std::size_t m, TypeTable& table);

// YES_sigma: at least k tree components of (m,k)-type sigma.
bool check_yes_sigma(const Graph& g, TreeTypeId sigma, std::size_t m, TypeTable& table);

struct TheoryReport {
  struct NoEll {
    std::size_t ell;
    bool holds;
  };
  struct Yes {
    TreeTypeId sigma;
    std::size_t m;
    std::size_t components;
    bool holds;
  };
  bool holds = true;
  std::vector<NoEll> no_ell;
  std::vector<Yes> yes;
};

TheoryReport verify_T_finite(const Graph& g, std::size_t ell_max,
                             const std::vector<std::pair<TreeTypeId, std::size_t>>& sigmas, TypeTable& table);
nlohmann::json theory_report_to_json(const TheoryReport& r, const TypeTable& table);

// Exact description of one short unicyclic component truncated at depth M2.
struct PictureComponent {
  std::uint32_t cycle_length = 0;
  // Canonical (uncapped) forms of the hanging trees, in dihedral-minimal order.
  std::vector<std::string> trees;
  std::size_t vertex_count = 0;
  std::size_t boundary_count = 0;  // vertices at depth exactly M2
  long double log_automorphisms = 0;

  std::string serialization() const;
};

struct Picture {
  std::uint32_t M1 = 3;
  std::uint32_t M2 = 0;
  std::vector<PictureComponent> components;  // sorted by serialization
  std::size_t M_H = 0;
  std::size_t L_H = 0;
  long double log_automorphisms = 0;  // log |Aut(H)|

  // C_H = M_H! / |Aut(H)|, the number of labelled copies on M_H fixed labels.
  long double log_C_H() const;
  double C_H() const;
  double automorphisms() const;
  std::string serialization() const;
  bool operator==(const Picture& other) const {
    return M1 == other.M1 && M2 == other.M2 && serialization() == other.serialization();
  }
};

inline constexpr std::size_t kDefaultPictureBound = 100'000;

// PictureTooLarge if M_H exceeds max_vertices.
Picture extract_picture(const Graph& g, std::uint32_t M1, std::uint32_t M2,
                        std::size_t max_vertices = kDefaultPictureBound);
// Disjoint union of the picture's components as a graph.
Graph picture_graph(const Picture& h);
// Canonical form of a rooted tree (full depth, no cap).
std::string canonical_tree_form(const RootedTreeView& t, std::size_t max_depth);
// Log automorphism count of a tree given by its canonical form.
long double log_tree_automorphisms(const std::string& canonical);

nlohmann::json picture_to_json(const Picture& h);
Picture picture_from_json(const nlohmann::json& j);

// The completion property A_v: capped counts of g equal v.
bool satisfies_completion(const Graph& g, const CompletionVector& v, TypeTable& table);

}  // namespace ehrlab
