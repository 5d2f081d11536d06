#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "ehrlab/graph.hpp"
#include "ehrlab/types.hpp"

namespace ehrlab {

struct CompletionKey {
  std::uint32_t s;
  std::uint32_t m;
  CycleTypeId type;
  auto operator<=>(const CompletionKey&) const = default;
};

// Truncated counts n_gamma over Gamma_{s,m,k}, 3 <= s <= M1, 0 <= m <= M2.
// Absent keys are zero. Type ids refer to the TypeTable used to build it.
class CompletionVector {
 public:
  CompletionVector(std::uint32_t k, std::uint32_t M1, std::uint32_t M2);

  std::uint32_t k() const { return k_; }
  std::uint32_t M1() const { return M1_; }
  std::uint32_t M2() const { return M2_; }

  std::uint32_t count(std::uint32_t s, std::uint32_t m, CycleTypeId type) const;
  // Validates ranges against the table (s, m, type height, count <= k).
  void set(std::uint32_t s, std::uint32_t m, CycleTypeId type, std::uint32_t n, const TypeTable& table);
  const std::map<CompletionKey, std::uint32_t>& counts() const { return counts_; }

  bool operator==(const CompletionVector&) const = default;

 private:
  std::uint32_t k_, M1_, M2_;
  std::map<CompletionKey, std::uint32_t> counts_;
};

CompletionVector completion_vector(const Graph& g, std::uint32_t M1, std::uint32_t M2, TypeTable& table);

struct ConsistencyViolation {
  std::uint32_t s;
  std::uint32_t m;
  CycleTypeId type;
  std::uint32_t expected;  // (sum over Sup(type) of level-(m+1) counts) capped at k
  std::uint32_t actual;
};

struct ConsistencyReport {
  bool ok = true;
  std::vector<ConsistencyViolation> violations;
};

ConsistencyReport check_consistency(const CompletionVector& v, TypeTable& table);

// I_{M1,M2}: every consistent vector, by filtering all (k+1)^E candidates.
std::vector<CompletionVector> enumerate_completion_vectors(std::uint32_t M1, std::uint32_t M2, TypeTable& table,
                                                           std::size_t bound = kDefaultEnumerationBound);

nlohmann::json completion_to_json(const CompletionVector& v, const TypeTable& table);
CompletionVector completion_from_json(const nlohmann::json& j, TypeTable& table);
nlohmann::json consistency_to_json(const ConsistencyReport& r, const TypeTable& table);

}  // namespace ehrlab
