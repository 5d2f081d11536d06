#include "ehrlab/types.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <set>

#include "ehrlab/error.hpp"

namespace ehrlab {

std::size_t TypeTable::KeyHash::operator()(const std::vector<std::uint32_t>& key) const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ key.size();
  for (std::uint32_t x : key) {
    h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

TypeTable::TypeTable(std::uint32_t cutoff) : k_(cutoff) {
  if (cutoff == 0) throw InvalidArgument("cutoff k must be >= 1");
  trees_.push_back({{}, 0, "()"});
  tree_index_.emplace(std::vector<std::uint32_t>{}, 0);
}

const TypeTable::TreeEntry& TypeTable::tree_entry(TreeTypeId id) const {
  std::shared_lock lock(mutex_);
  if (id >= trees_.size()) throw InvalidArgument("unknown tree type id " + std::to_string(id));
  return trees_[id];
}

const TypeTable::CycleEntry& TypeTable::cycle_entry(CycleTypeId id) const {
  std::shared_lock lock(mutex_);
  if (id >= cycles_.size()) throw InvalidArgument("unknown cycle type id " + std::to_string(id));
  return cycles_[id];
}

std::span<const Branch> TypeTable::payload(TreeTypeId id) const { return tree_entry(id).payload; }
std::uint32_t TypeTable::height(TreeTypeId id) const { return tree_entry(id).height; }
const std::string& TypeTable::serialization(TreeTypeId id) const { return tree_entry(id).serialization; }

std::size_t TypeTable::tree_count() const {
  std::shared_lock lock(mutex_);
  return trees_.size();
}

bool TypeTable::less(TreeTypeId a, TreeTypeId b) const {
  if (a == b) return false;
  const TreeEntry& x = tree_entry(a);
  const TreeEntry& y = tree_entry(b);
  if (x.height != y.height) return x.height < y.height;
  return x.serialization < y.serialization;
}

std::span<const TreeTypeId> TypeTable::word(CycleTypeId id) const { return cycle_entry(id).word; }
std::uint32_t TypeTable::cycle_height(CycleTypeId id) const { return cycle_entry(id).height; }
const std::string& TypeTable::cycle_serialization(CycleTypeId id) const {
  return cycle_entry(id).serialization;
}

bool TypeTable::cycle_less(CycleTypeId a, CycleTypeId b) const {
  if (a == b) return false;
  auto x = word(a), y = word(b);
  if (x.size() != y.size()) return x.size() < y.size();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == y[i]) continue;
    return less(x[i], y[i]);
  }
  return false;
}

TreeTypeId TypeTable::intern_tree(std::vector<Branch> payload) {
  std::sort(payload.begin(), payload.end(),
            [](const Branch& a, const Branch& b) { return a.child < b.child; });
  std::vector<Branch> merged;
  for (const Branch& b : payload) {
    if (b.count == 0) continue;
    if (!merged.empty() && merged.back().child == b.child)
      merged.back().count += b.count;
    else
      merged.push_back(b);
  }
  std::vector<std::uint32_t> key;
  key.reserve(merged.size() * 2);
  for (Branch& b : merged) {
    b.count = std::min(b.count, k_);
    key.push_back(b.child);
    key.push_back(b.count);
  }
  {
    std::shared_lock lock(mutex_);
    auto it = tree_index_.find(key);
    if (it != tree_index_.end()) return it->second;
  }
  TreeEntry entry;
  entry.height = 0;
  for (const Branch& b : merged) entry.height = std::max(entry.height, height(b.child) + 1);
  std::sort(merged.begin(), merged.end(), [this](const Branch& a, const Branch& b) { return less(a.child, b.child); });
  entry.serialization = "(";
  for (std::size_t i = 0; i < merged.size(); ++i) {
    if (i) entry.serialization += ',';
    entry.serialization += std::to_string(merged[i].count);
    entry.serialization += 'x';
    entry.serialization += serialization(merged[i].child);
  }
  entry.serialization += ')';
  entry.payload = std::move(merged);

  std::unique_lock lock(mutex_);
  auto [it, inserted] = tree_index_.emplace(std::move(key), static_cast<TreeTypeId>(trees_.size()));
  if (inserted) trees_.push_back(std::move(entry));
  return it->second;
}

CycleTypeId TypeTable::intern_cycle(std::vector<TreeTypeId> word) {
  if (word.size() < 3) throw InvalidArgument("cycle length must be >= 3");
  std::vector<std::uint32_t> key(word.begin(), word.end());
  {
    std::shared_lock lock(mutex_);
    auto it = cycle_index_.find(key);
    if (it != cycle_index_.end()) return it->second;
  }
  CycleEntry entry;
  entry.height = 0;
  entry.serialization = "[";
  for (std::size_t i = 0; i < word.size(); ++i) {
    entry.height = std::max(entry.height, height(word[i]));
    if (i) entry.serialization += ',';
    entry.serialization += serialization(word[i]);
  }
  entry.serialization += ']';
  entry.word = std::move(word);

  std::unique_lock lock(mutex_);
  auto [it, inserted] = cycle_index_.emplace(std::move(key), static_cast<CycleTypeId>(cycles_.size()));
  if (inserted) cycles_.push_back(std::move(entry));
  return it->second;
}

namespace {

class TypeParser {
 public:
  TypeParser(std::string_view text, TypeTable& table) : text_(text), table_(table) {}

  TreeTypeId tree() {
    expect('(');
    std::vector<Branch> payload;
    if (peek() == ')') {
      ++pos_;
      return table_.intern_tree(payload);
    }
    for (;;) {
      std::uint32_t count = number();
      if (count == 0 || count > table_.cutoff())
        fail("branch count " + std::to_string(count) + " outside 1..k");
      expect('x');
      payload.push_back({tree(), count});
      char c = next();
      if (c == ')') break;
      if (c != ',') fail("expected ',' or ')'");
    }
    // A repeated child would be merged silently; reject it as non-canonical.
    std::vector<TreeTypeId> children;
    for (const Branch& b : payload) children.push_back(b.child);
    std::sort(children.begin(), children.end());
    if (std::adjacent_find(children.begin(), children.end()) != children.end())
      fail("repeated child type");
    return table_.intern_tree(std::move(payload));
  }

  std::vector<TreeTypeId> word() {
    expect('[');
    std::vector<TreeTypeId> letters;
    for (;;) {
      letters.push_back(tree());
      char c = next();
      if (c == ']') break;
      if (c != ',') fail("expected ',' or ']'");
    }
    return letters;
  }

  void finish() {
    if (pos_ != text_.size()) fail("trailing characters");
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw ParseError("type '" + std::string(text_) + "' at " + std::to_string(pos_) + ": " + why);
  }
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  char next() {
    if (pos_ >= text_.size()) fail("unexpected end");
    return text_[pos_++];
  }
  void expect(char c) {
    if (next() != c) fail(std::string("expected '") + c + "'");
  }
  std::uint32_t number() {
    std::uint64_t value = 0;
    std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') {
      value = value * 10 + static_cast<std::uint64_t>(text_[pos_] - '0');
      if (value > 1'000'000) fail("count too large");
      ++pos_;
    }
    if (pos_ == start) fail("expected count");
    return static_cast<std::uint32_t>(value);
  }

  std::string_view text_;
  TypeTable& table_;
  std::size_t pos_ = 0;
};

}  // namespace

TreeTypeId TypeTable::parse_tree(std::string_view text) {
  TypeParser p(text, *this);
  TreeTypeId id = p.tree();
  p.finish();
  return id;
}

CycleTypeId TypeTable::parse_cycle(std::string_view text) {
  TypeParser p(text, *this);
  auto letters = p.word();
  p.finish();
  if (letters.size() < 3) throw ParseError("cycle type needs at least 3 letters");
  return canonical_cycle_type(letters, *this);
}

// --- type computation ----------------------------------------------------

namespace {

// Type of the subtree rooted at local index 'top', keeping descendants whose
// depth below 'top' is at most m.
TreeTypeId type_below(const RootedTreeView& t, std::size_t top, std::size_t m, TypeTable& table) {
  std::vector<std::size_t> nodes{top};
  for (std::size_t head = 0; head < nodes.size(); ++head) {
    std::size_t i = nodes[head];
    if (t.depth_at(i) - t.depth_at(top) >= m) continue;
    auto [b, e] = t.child_range(i);
    for (std::size_t c = b; c < e; ++c) nodes.push_back(c);
  }
  std::unordered_map<std::size_t, TreeTypeId> type_of;
  type_of.reserve(nodes.size() * 2);
  for (auto it = nodes.rbegin(); it != nodes.rend(); ++it) {
    std::size_t i = *it;
    std::vector<Branch> payload;
    if (t.depth_at(i) - t.depth_at(top) < m) {
      auto [b, e] = t.child_range(i);
      for (std::size_t c = b; c < e; ++c) payload.push_back({type_of.at(c), 1});
    }
    type_of[i] = table.intern_tree(std::move(payload));
  }
  return type_of.at(top);
}

std::vector<std::uint32_t> ranks_of(std::span<const TreeTypeId> word, const TypeTable& table) {
  std::vector<TreeTypeId> distinct(word.begin(), word.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::sort(distinct.begin(), distinct.end(), [&](TreeTypeId a, TreeTypeId b) { return table.less(a, b); });
  std::vector<std::uint32_t> ranks(word.size());
  for (std::size_t i = 0; i < word.size(); ++i)
    ranks[i] = static_cast<std::uint32_t>(
        std::find(distinct.begin(), distinct.end(), word[i]) - distinct.begin());
  return ranks;
}

// Multiplies a running product, failing once it passes bound.
void guard_product(std::size_t& total, std::size_t factor, std::size_t bound, const std::string& what) {
  if (factor != 0 && total > bound / factor) {
    throw EnumerationTooLarge(what + " exceeds enumeration bound " + std::to_string(bound));
  }
  total *= factor;
  if (total > bound) throw EnumerationTooLarge(what + " exceeds enumeration bound " + std::to_string(bound));
}

}  // namespace

TreeTypeId tree_type(const RootedTreeView& t, std::size_t m, TypeTable& table) {
  return type_below(t, 0, m, table);
}

TreeTypeId subtree_type(const RootedTreeView& t, Vertex v, std::size_t m, TypeTable& table) {
  return type_below(t, t.index_of(v), m, table);
}

TreeTypeId project(TreeTypeId sigma, std::size_t m, TypeTable& table) {
  std::map<std::pair<TreeTypeId, std::size_t>, TreeTypeId> memo;
  auto rec = [&](auto&& self, TreeTypeId id, std::size_t depth) -> TreeTypeId {
    if (table.height(id) <= depth) return id;
    if (depth == 0) return table.root_type();
    auto key = std::make_pair(id, depth);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::vector<Branch> payload;
    for (const Branch& b : table.payload(id)) payload.push_back({self(self, b.child, depth - 1), b.count});
    TreeTypeId out = table.intern_tree(std::move(payload));
    memo.emplace(key, out);
    return out;
  };
  return rec(rec, sigma, m);
}

CycleTypeId canonical_cycle_type(std::span<const TreeTypeId> word, TypeTable& table) {
  auto ranks = ranks_of(word, table);
  DihedralMap map = dihedral_argmin<std::uint32_t>(ranks);
  std::vector<TreeTypeId> canonical(word.size());
  for (std::size_t i = 0; i < word.size(); ++i) canonical[i] = word[map.apply(i, word.size())];
  return table.intern_cycle(std::move(canonical));
}

CycleTyping cycle_type(const UnicyclicView& u, std::size_t m, TypeTable& table) {
  const std::size_t s = u.cycle_length();
  std::vector<TreeTypeId> word(s);
  for (std::size_t i = 0; i < s; ++i) word[i] = tree_type(u.hanging_tree(i), m, table);
  auto ranks = ranks_of(word, table);
  DihedralMap map = dihedral_argmin<std::uint32_t>(ranks);
  CycleTyping out;
  out.canonical_cycle.resize(s);
  out.word.resize(s);
  for (std::size_t i = 0; i < s; ++i) {
    out.canonical_cycle[i] = u.cycle()[map.apply(i, s)];
    out.word[i] = word[map.apply(i, s)];
  }
  out.type = table.intern_cycle(out.word);
  return out;
}

CycleTypeId project_cycle(CycleTypeId gamma, std::size_t m, TypeTable& table) {
  std::vector<TreeTypeId> word(table.word(gamma).begin(), table.word(gamma).end());
  for (auto& letter : word) letter = project(letter, m, table);
  return canonical_cycle_type(word, table);
}

// --- enumeration ---------------------------------------------------------

std::vector<TreeTypeId> enumerate_tree_types(std::size_t m, TypeTable& table, std::size_t bound) {
  const std::uint32_t k = table.cutoff();
  std::vector<TreeTypeId> level{table.root_type()};
  for (std::size_t depth = 1; depth <= m; ++depth) {
    std::size_t total = 1;
    for (std::size_t i = 0; i < level.size(); ++i)
      guard_product(total, k + 1, bound, "|Sigma_{" + std::to_string(depth) + "," + std::to_string(k) + "}|");
    std::vector<TreeTypeId> next;
    next.reserve(total);
    std::vector<std::uint32_t> counts(level.size(), 0);
    for (;;) {
      std::vector<Branch> payload;
      for (std::size_t i = 0; i < level.size(); ++i)
        if (counts[i]) payload.push_back({level[i], counts[i]});
      next.push_back(table.intern_tree(std::move(payload)));
      std::size_t pos = 0;
      while (pos < counts.size() && counts[pos] == k) counts[pos++] = 0;
      if (pos == counts.size()) break;
      ++counts[pos];
    }
    level = std::move(next);
  }
  std::sort(level.begin(), level.end(), [&](TreeTypeId a, TreeTypeId b) { return table.less(a, b); });
  return level;
}

std::vector<CycleTypeId> enumerate_cycle_types(std::size_t s, std::size_t m, TypeTable& table,
                                               std::size_t bound) {
  if (s < 3) throw InvalidArgument("cycle length must be >= 3");
  auto letters = enumerate_tree_types(m, table, bound);
  std::size_t total = 1;
  for (std::size_t i = 0; i < s; ++i) guard_product(total, letters.size(), bound, "word count");
  std::vector<CycleTypeId> out;
  std::vector<std::uint32_t> word(s, 0);
  const auto base = static_cast<std::uint32_t>(letters.size());
  for (;;) {
    // Letters index rank order, so a word is canonical iff it is its own minimum.
    if (dihedral_minimum<std::uint32_t>(word) == word) {
      std::vector<TreeTypeId> ids(s);
      for (std::size_t i = 0; i < s; ++i) ids[i] = letters[word[i]];
      out.push_back(table.intern_cycle(std::move(ids)));
    }
    std::size_t pos = s;
    while (pos > 0 && word[pos - 1] == base - 1) word[--pos] = 0;
    if (pos == 0) break;
    ++word[pos - 1];
  }
  return out;
}

namespace {

// All count vectors over 'slots' options with entries in 0..k whose sum,
// capped at k, equals target.
void capped_vectors(std::size_t slots, std::uint32_t k, std::uint32_t target, std::size_t bound,
                    std::vector<std::vector<std::uint32_t>>& out) {
  std::vector<std::uint32_t> cur(slots, 0);
  auto rec = [&](auto&& self, std::size_t i, std::uint32_t sum) -> void {
    if (i == slots) {
      if (std::min(sum, k) == target) {
        out.push_back(cur);
        if (out.size() > bound) throw EnumerationTooLarge("refinement count exceeds enumeration bound");
      }
      return;
    }
    for (std::uint32_t c = 0; c <= k; ++c) {
      if (target < k && sum + c > target) break;
      cur[i] = c;
      self(self, i + 1, sum + c);
    }
    cur[i] = 0;
  };
  rec(rec, 0, 0);
}

}  // namespace

std::vector<TreeTypeId> refinements(TreeTypeId sigma, std::size_t m, TypeTable& table, std::size_t bound) {
  if (table.height(sigma) > m) throw InvalidArgument("type deeper than m in refinements()");
  const std::uint32_t k = table.cutoff();
  if (m == 0) {
    std::vector<TreeTypeId> out;
    for (std::uint32_t c = 0; c <= k; ++c)
      out.push_back(c ? table.intern_tree({{table.root_type(), c}}) : table.root_type());
    return out;
  }
  auto branches = table.payload(sigma);
  std::vector<std::vector<TreeTypeId>> options;
  std::vector<std::vector<std::vector<std::uint32_t>>> choices;
  std::size_t total = 1;
  for (const Branch& b : branches) {
    options.push_back(refinements(b.child, m - 1, table, bound));
    choices.emplace_back();
    capped_vectors(options.back().size(), k, b.count, bound, choices.back());
    guard_product(total, choices.back().size(), bound, "refinement product");
  }
  std::vector<TreeTypeId> out;
  std::vector<std::size_t> pick(branches.size(), 0);
  for (;;) {
    std::vector<Branch> payload;
    for (std::size_t j = 0; j < branches.size(); ++j) {
      const auto& counts = choices[j][pick[j]];
      for (std::size_t r = 0; r < counts.size(); ++r)
        if (counts[r]) payload.push_back({options[j][r], counts[r]});
    }
    out.push_back(table.intern_tree(std::move(payload)));
    std::size_t pos = 0;
    while (pos < pick.size() && pick[pos] + 1 == choices[pos].size()) pick[pos++] = 0;
    if (pos == pick.size()) break;
    ++pick[pos];
  }
  std::sort(out.begin(), out.end(), [&](TreeTypeId a, TreeTypeId b) { return table.less(a, b); });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<CycleTypeId> sup_set(CycleTypeId gamma, std::size_t m, TypeTable& table, std::size_t bound) {
  std::vector<TreeTypeId> word(table.word(gamma).begin(), table.word(gamma).end());
  std::vector<std::vector<TreeTypeId>> options;
  std::size_t total = 1;
  for (TreeTypeId letter : word) {
    options.push_back(refinements(letter, m, table, bound));
    guard_product(total, options.back().size(), bound, "Sup product");
  }
  std::set<CycleTypeId> found;
  std::vector<std::size_t> pick(word.size(), 0);
  std::vector<TreeTypeId> candidate(word.size());
  for (;;) {
    for (std::size_t i = 0; i < word.size(); ++i) candidate[i] = options[i][pick[i]];
    found.insert(canonical_cycle_type(candidate, table));
    std::size_t pos = 0;
    while (pos < pick.size() && pick[pos] + 1 == options[pos].size()) pick[pos++] = 0;
    if (pos == pick.size()) break;
    ++pick[pos];
  }
  std::vector<CycleTypeId> out(found.begin(), found.end());
  std::sort(out.begin(), out.end(), [&](CycleTypeId a, CycleTypeId b) { return table.cycle_less(a, b); });
  return out;
}

}  // namespace ehrlab
