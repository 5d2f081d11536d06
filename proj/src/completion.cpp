#include "ehrlab/completion.hpp"

#include <algorithm>
#include <set>

#include "ehrlab/error.hpp"

namespace ehrlab {

CompletionVector::CompletionVector(std::uint32_t k, std::uint32_t M1, std::uint32_t M2) : k_(k), M1_(M1), M2_(M2) {
  if (k == 0) throw InvalidArgument("cutoff k must be >= 1");
  if (M1 < 3) throw InvalidArgument("M1 must be >= 3");
}

std::uint32_t CompletionVector::count(std::uint32_t s, std::uint32_t m, CycleTypeId type) const {
  auto it = counts_.find({s, m, type});
  return it == counts_.end() ? 0 : it->second;
}

void CompletionVector::set(std::uint32_t s, std::uint32_t m, CycleTypeId type, std::uint32_t n,
                           const TypeTable& table) {
  if (table.cutoff() != k_) throw InvalidArgument("type table cutoff differs from vector cutoff");
  if (s < 3 || s > M1_) throw InvalidArgument("cycle length " + std::to_string(s) + " outside 3..M1");
  if (m > M2_) throw InvalidArgument("depth " + std::to_string(m) + " exceeds M2");
  if (table.cycle_length(type) != s) throw InvalidArgument("cycle type length differs from s");
  if (table.cycle_height(type) > m) throw InvalidArgument("cycle type deeper than its depth class");
  if (n > k_) throw InvalidArgument("count exceeds cutoff");
  if (n == 0)
    counts_.erase({s, m, type});
  else
    counts_[{s, m, type}] = n;
}

CompletionVector completion_vector(const Graph& g, std::uint32_t M1, std::uint32_t M2, TypeTable& table) {
  const std::uint32_t k = table.cutoff();
  CompletionVector out(k, M1, M2);
  std::map<CompletionKey, std::uint32_t> raw;
  for (const Component& comp : decompose(g)) {
    if (comp.kind != ComponentKind::Unicyclic || comp.cycle.size() > M1) continue;
    UnicyclicView view = unicyclic_view(g, comp);
    const auto s = static_cast<std::uint32_t>(view.cycle_length());
    const std::size_t stable = view.max_depth();  // types no longer change beyond this depth
    CycleTypeId type = 0;
    for (std::uint32_t m = 0; m <= M2; ++m) {
      if (m <= stable) type = cycle_type(view, m, table).type;
      ++raw[{s, m, type}];
    }
  }
  for (const auto& [key, n] : raw) out.set(key.s, key.m, key.type, std::min(n, k), table);
  return out;
}

ConsistencyReport check_consistency(const CompletionVector& v, TypeTable& table) {
  ConsistencyReport report;
  const std::uint32_t k = v.k();
  std::set<std::uint32_t> lengths;
  for (const auto& [key, n] : v.counts()) lengths.insert(key.s);
  for (std::uint32_t s : lengths) {
    for (std::uint32_t m = 0; m < v.M2(); ++m) {
      // Only gamma keyed at m or hit by a keyed refinement can be inconsistent.
      std::map<CycleTypeId, std::uint32_t> refined;
      std::set<CycleTypeId> candidates;
      for (auto it = v.counts().lower_bound({s, m, 0}); it != v.counts().end() && it->first.s == s && it->first.m == m; ++it)
        candidates.insert(it->first.type);
      for (auto it = v.counts().lower_bound({s, m + 1, 0});
           it != v.counts().end() && it->first.s == s && it->first.m == m + 1; ++it) {
        CycleTypeId gamma = project_cycle(it->first.type, m, table);
        refined[gamma] += it->second;
        candidates.insert(gamma);
      }
      for (CycleTypeId gamma : candidates) {
        std::uint32_t expected = std::min(refined[gamma], k);
        std::uint32_t actual = v.count(s, m, gamma);
        if (expected != actual) report.violations.push_back({s, m, gamma, expected, actual});
      }
    }
  }
  report.ok = report.violations.empty();
  return report;
}

std::vector<CompletionVector> enumerate_completion_vectors(std::uint32_t M1, std::uint32_t M2, TypeTable& table,
                                                           std::size_t bound) {
  const std::uint32_t k = table.cutoff();
  struct Slot {
    std::uint32_t s, m;
    CycleTypeId type;
  };
  std::vector<Slot> slots;
  for (std::uint32_t s = 3; s <= M1; ++s)
    for (std::uint32_t m = 0; m <= M2; ++m)
      for (CycleTypeId gamma : enumerate_cycle_types(s, m, table, bound)) slots.push_back({s, m, gamma});
  std::size_t total = 1;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (total > bound / (k + 1)) throw EnumerationTooLarge("completion vector candidates exceed bound");
    total *= k + 1;
  }
  std::vector<CompletionVector> out;
  std::vector<std::uint32_t> digits(slots.size(), 0);
  for (;;) {
    CompletionVector v(k, M1, M2);
    for (std::size_t i = 0; i < slots.size(); ++i)
      if (digits[i]) v.set(slots[i].s, slots[i].m, slots[i].type, digits[i], table);
    if (check_consistency(v, table).ok) out.push_back(std::move(v));
    std::size_t pos = 0;
    while (pos < digits.size() && digits[pos] == k) digits[pos++] = 0;
    if (pos == digits.size()) break;
    ++digits[pos];
  }
  return out;
}

namespace {

std::vector<std::pair<CompletionKey, std::uint32_t>> sorted_entries(const CompletionVector& v, const TypeTable& table) {
  std::vector<std::pair<CompletionKey, std::uint32_t>> entries(v.counts().begin(), v.counts().end());
  std::sort(entries.begin(), entries.end(), [&](const auto& a, const auto& b) {
    if (a.first.s != b.first.s) return a.first.s < b.first.s;
    if (a.first.m != b.first.m) return a.first.m < b.first.m;
    return table.cycle_less(a.first.type, b.first.type);
  });
  return entries;
}

std::uint32_t read_uint(const nlohmann::json& j, const char* field) {
  if (!j.contains(field) || !j.at(field).is_number_integer() || j.at(field).get<long long>() < 0)
    throw ParseError(std::string("field \"") + field + "\" must be a non-negative integer");
  return j.at(field).get<std::uint32_t>();
}

}  // namespace

nlohmann::json completion_to_json(const CompletionVector& v, const TypeTable& table) {
  nlohmann::json counts = nlohmann::json::array();
  for (const auto& [key, n] : sorted_entries(v, table))
    counts.push_back({{"s", key.s}, {"m", key.m}, {"type", table.cycle_serialization(key.type)}, {"n", n}});
  return {{"k", v.k()}, {"M1", v.M1()}, {"M2", v.M2()}, {"counts", std::move(counts)}};
}

CompletionVector completion_from_json(const nlohmann::json& j, TypeTable& table) {
  if (!j.is_object()) throw ParseError("completion vector must be a JSON object");
  std::uint32_t k = read_uint(j, "k"), M1 = read_uint(j, "M1"), M2 = read_uint(j, "M2");
  if (k != table.cutoff()) throw ParseError("completion vector cutoff differs from type table cutoff");
  if (M1 < 3 || k == 0) throw ParseError("completion vector needs k >= 1 and M1 >= 3");
  CompletionVector v(k, M1, M2);
  if (!j.contains("counts") || !j.at("counts").is_array()) throw ParseError("\"counts\" must be an array");
  for (const auto& e : j.at("counts")) {
    std::uint32_t s = read_uint(e, "s"), m = read_uint(e, "m"), n = read_uint(e, "n");
    if (!e.contains("type") || !e.at("type").is_string()) throw ParseError("\"type\" must be a string");
    CycleTypeId gamma = table.parse_cycle(e.at("type").get<std::string>());
    if (v.count(s, m, gamma) != 0) throw ParseError("repeated completion entry");
    try {
      v.set(s, m, gamma, n, table);
    } catch (const InvalidArgument& err) {
      throw ParseError(err.what());
    }
  }
  return v;
}

nlohmann::json consistency_to_json(const ConsistencyReport& r, const TypeTable& table) {
  nlohmann::json violations = nlohmann::json::array();
  for (const auto& v : r.violations)
    violations.push_back({{"s", v.s},
                          {"m", v.m},
                          {"type", table.cycle_serialization(v.type)},
                          {"expected", v.expected},
                          {"actual", v.actual}});
  return {{"ok", r.ok}, {"violations", std::move(violations)}};
}

}  // namespace ehrlab
