#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <memory>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ehrlab/graph.hpp"

namespace ehrlab {

using TreeTypeId = std::uint32_t;
using CycleTypeId = std::uint32_t;

struct Branch {
  TreeTypeId child;
  std::uint32_t count;  // 1..k
  bool operator==(const Branch&) const = default;
};

inline constexpr std::size_t kDefaultEnumerationBound = 1'000'000;

// Intern store for capped tree types and cycle types under one cutoff k.
//
// A tree type is the capped multiset of its principal-branch types. Types of
// every depth share one id space: a type of height h is a member of
// Sigma_{m,k} for every m >= h. Ranks order types by (height, serialization),
// which refines Sigma_{m-1,k} before the types new at depth m.
//
// Interning is thread-safe; interned values never change.
class TypeTable {
 public:
  explicit TypeTable(std::uint32_t cutoff);
  TypeTable(const TypeTable&) = delete;
  TypeTable& operator=(const TypeTable&) = delete;

  std::uint32_t cutoff() const { return k_; }
  TreeTypeId root_type() const { return 0; }

  // Payload entries may be unsorted, repeated and uncapped; they are merged,
  // capped at k and canonicalized.
  TreeTypeId intern_tree(std::vector<Branch> payload);
  // Word must already be dihedral-canonical.
  CycleTypeId intern_cycle(std::vector<TreeTypeId> word);

  // Payload sorted by ascending child rank.
  std::span<const Branch> payload(TreeTypeId id) const;
  std::uint32_t height(TreeTypeId id) const;
  const std::string& serialization(TreeTypeId id) const;
  bool less(TreeTypeId a, TreeTypeId b) const;  // strict rank order
  std::size_t tree_count() const;

  std::span<const TreeTypeId> word(CycleTypeId id) const;
  std::uint32_t cycle_length(CycleTypeId id) const { return static_cast<std::uint32_t>(word(id).size()); }
  std::uint32_t cycle_height(CycleTypeId id) const;
  const std::string& cycle_serialization(CycleTypeId id) const;
  // Orders cycle types by length, then lexicographically by letter rank.
  bool cycle_less(CycleTypeId a, CycleTypeId b) const;

  // Inverse of serialization(); ParseError on malformed text.
  TreeTypeId parse_tree(std::string_view text);
  // Parses "[t1,t2,...]" and canonicalizes the word.
  CycleTypeId parse_cycle(std::string_view text);

 private:
  struct TreeEntry {
    std::vector<Branch> payload;
    std::uint32_t height;
    std::string serialization;
  };
  struct CycleEntry {
    std::vector<TreeTypeId> word;
    std::uint32_t height;
    std::string serialization;
  };
  struct KeyHash {
    std::size_t operator()(const std::vector<std::uint32_t>& key) const noexcept;
  };

  const TreeEntry& tree_entry(TreeTypeId id) const;
  const CycleEntry& cycle_entry(CycleTypeId id) const;

  std::uint32_t k_;
  mutable std::shared_mutex mutex_;
  std::deque<TreeEntry> trees_;
  std::deque<CycleEntry> cycles_;
  std::unordered_map<std::vector<std::uint32_t>, TreeTypeId, KeyHash> tree_index_;
  std::unordered_map<std::vector<std::uint32_t>, CycleTypeId, KeyHash> cycle_index_;
};

// (m,k)-type of t (rooted at t.root()), ignoring vertices deeper than m.
TreeTypeId tree_type(const RootedTreeView& t, std::size_t m, TypeTable& table);
// (m,k)-type of the subtree T(v) of t, depth measured from v.
TreeTypeId subtree_type(const RootedTreeView& t, Vertex v, std::size_t m, TypeTable& table);
// Type truncated at depth m.
TreeTypeId project(TreeTypeId sigma, std::size_t m, TypeTable& table);

// Dihedral image selected by dihedral_argmin: position i of the image is
// word[(offset + i) mod s] when not reflected, word[(offset - i) mod s] otherwise.
struct DihedralMap {
  std::size_t offset = 0;
  bool reflected = false;
  std::size_t apply(std::size_t i, std::size_t s) const {
    return reflected ? (offset + s - i % s) % s : (offset + i) % s;
  }
  bool operator==(const DihedralMap&) const = default;
};

// Lexicographically smallest of the 2s dihedral images. Ties resolve to the
// first image in the order (offset 0..s-1 unreflected, then reflected).
template <typename T>
DihedralMap dihedral_argmin(std::span<const T> word) {
  const std::size_t s = word.size();
  DihedralMap best;
  auto compare = [&](const DihedralMap& a, const DihedralMap& b) {
    for (std::size_t i = 0; i < s; ++i) {
      const T& x = word[a.apply(i, s)];
      const T& y = word[b.apply(i, s)];
      if (x < y) return -1;
      if (y < x) return 1;
    }
    return 0;
  };
  for (int refl = 0; refl < 2; ++refl)
    for (std::size_t off = 0; off < s; ++off) {
      DihedralMap cand{off, refl == 1};
      if (compare(cand, best) < 0) best = cand;
    }
  return best;
}

template <typename T>
std::vector<T> dihedral_minimum(std::span<const T> word) {
  DihedralMap m = dihedral_argmin(word);
  std::vector<T> out(word.size());
  for (std::size_t i = 0; i < word.size(); ++i) out[i] = word[m.apply(i, word.size())];
  return out;
}

struct CycleTyping {
  CycleTypeId type;
  std::vector<Vertex> canonical_cycle;  // cycle vertices in the canonical enumeration
  std::vector<TreeTypeId> word;
};

// (s,m,k)-type of a unicyclic component together with its canonical enumeration.
CycleTyping cycle_type(const UnicyclicView& u, std::size_t m, TypeTable& table);
// Canonicalizes an arbitrary word of tree types.
CycleTypeId canonical_cycle_type(std::span<const TreeTypeId> word, TypeTable& table);
CycleTypeId project_cycle(CycleTypeId gamma, std::size_t m, TypeTable& table);

// Sigma_{m,k}, in rank order. EnumerationTooLarge if |Sigma_{m,k}| > bound.
std::vector<TreeTypeId> enumerate_tree_types(std::size_t m, TypeTable& table,
                                             std::size_t bound = kDefaultEnumerationBound);
// Gamma_{s,m,k}, sorted by canonical word.
std::vector<CycleTypeId> enumerate_cycle_types(std::size_t s, std::size_t m, TypeTable& table,
                                               std::size_t bound = kDefaultEnumerationBound);
// Types of height <= m+1 whose projection to depth m is sigma (height(sigma) <= m).
std::vector<TreeTypeId> refinements(TreeTypeId sigma, std::size_t m, TypeTable& table,
                                    std::size_t bound = kDefaultEnumerationBound);
// Sup(gamma): cycle types at depth m+1 projecting to gamma at depth m.
std::vector<CycleTypeId> sup_set(CycleTypeId gamma, std::size_t m, TypeTable& table,
                                 std::size_t bound = kDefaultEnumerationBound);

}  // namespace ehrlab
