#include "forcelab/poset.hpp"

#include <algorithm>
#include <unordered_map>

namespace forcelab {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownElement: return "unknown-element";
    case ErrorCode::InvalidOrder: return "invalid-order";
    case ErrorCode::MissingBottom: return "missing-bottom";
    case ErrorCode::Membership: return "membership";
    case ErrorCode::InvalidInclusion: return "invalid-inclusion";
    case ErrorCode::InvalidEmbedding: return "invalid-embedding";
    case ErrorCode::CapExceeded: return "cap-exceeded";
    case ErrorCode::NotSubalgebra: return "not-subalgebra";
    case ErrorCode::ParentMismatch: return "parent-mismatch";
    case ErrorCode::MalformedPartition: return "malformed-partition";
    case ErrorCode::IndexMismatch: return "index-mismatch";
    case ErrorCode::ChainPrecondition: return "chain-precondition";
    case ErrorCode::InvalidTower: return "invalid-tower";
    case ErrorCode::InvalidWitness: return "invalid-witness";
    case ErrorCode::HypothesisViolation: return "hypothesis-violation";
    case ErrorCode::InvalidParams: return "invalid-params";
  }
  return "unknown";
}

Poset::Poset(std::vector<std::string> labels, const std::vector<Bits>& leq, int bottom)
    : labels_(std::move(labels)), bottom_(bottom) {
  const std::size_t n = labels_.size();
  if (n == 0) throw InputError(ErrorCode::InvalidOrder, "poset must have at least one element");
  if (leq.size() != n) throw InputError(ErrorCode::InvalidOrder, "relation size mismatch");
  if (bottom < 0 || static_cast<std::size_t>(bottom) >= n)
    throw InputError(ErrorCode::MissingBottom, "bottom index out of range");
  {
    std::unordered_map<std::string, int> seen;
    for (std::size_t i = 0; i < n; ++i)
      if (!seen.emplace(labels_[i], static_cast<int>(i)).second)
        throw InputError(ErrorCode::InvalidOrder, "duplicate element label '" + labels_[i] + "'");
  }
  up_.assign(n, Bits(n));
  down_.assign(n, Bits(n));
  for (std::size_t p = 0; p < n; ++p) {
    if (leq[p].size() != n) throw InputError(ErrorCode::InvalidOrder, "relation row size mismatch");
    up_[p] = leq[p];
    for (std::size_t q = leq[p].find_first(); q != Bits::npos; q = leq[p].find_next(q))
      down_[q].set(p);
  }
  for (std::size_t p = 0; p < n; ++p) {
    if (!up_[p].test(p))
      throw InputError(ErrorCode::InvalidOrder, "not reflexive at '" + labels_[p] + "'");
    Bits both = up_[p] & down_[p];
    both.reset(p);
    if (both.any())
      throw InputError(ErrorCode::InvalidOrder,
                       "not antisymmetric: '" + labels_[p] + "' and '" + labels_[both.find_first()] + "'");
    // transitive: up(q) subset of up(p) whenever p <= q
    for (std::size_t q = up_[p].find_first(); q != Bits::npos; q = up_[p].find_next(q))
      if (!up_[q].is_subset_of(up_[p]))
        throw InputError(ErrorCode::InvalidOrder,
                         "not transitive through '" + labels_[p] + "' <= '" + labels_[q] + "'");
  }
  if (!up_[bottom_].all())
    throw InputError(ErrorCode::MissingBottom, "'" + labels_[bottom_] + "' is not below every element");
}

Poset Poset::from_covers(std::vector<std::string> labels, const std::vector<std::pair<int, int>>& covers,
                         int bottom) {
  const std::size_t n = labels.size();
  std::vector<Bits> rel(n, Bits(n));
  for (std::size_t i = 0; i < n; ++i) rel[i].set(i);
  for (auto [lo, hi] : covers) {
    if (lo < 0 || hi < 0 || static_cast<std::size_t>(lo) >= n || static_cast<std::size_t>(hi) >= n)
      throw InputError(ErrorCode::UnknownElement, "cover refers to an unknown element");
    rel[lo].set(hi);
  }
  // Warshall on bit rows.
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (rel[i].test(k)) rel[i] |= rel[k];
  return Poset(std::move(labels), rel, bottom);
}

const std::string& Poset::label(int p) const {
  check_element(p);
  return labels_[p];
}

std::optional<int> Poset::index_of(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<int>(it - labels_.begin());
}

void Poset::check_element(int p) const {
  if (p < 0 || p >= size())
    throw InputError(ErrorCode::UnknownElement, "element index " + std::to_string(p) + " out of range");
}

bool Poset::leq(int p, int q) const {
  check_element(p);
  check_element(q);
  return up_[p].test(q);
}

const Bits& Poset::up(int p) const {
  check_element(p);
  return up_[p];
}

const Bits& Poset::down(int q) const {
  check_element(q);
  return down_[q];
}

bool Poset::compatible(int p, int q) const {
  check_element(p);
  check_element(q);
  return up_[p].intersects(up_[q]);
}

Bits Poset::compatible_with(int p) const {
  check_element(p);
  // q is compatible with p iff q lies below some element of up(p).
  Bits out(labels_.size());
  const Bits& u = up_[p];
  for (std::size_t r = u.find_first(); r != Bits::npos; r = u.find_next(r)) out |= down_[r];
  return out;
}

Bits Poset::maximal_elements() const {
  Bits out(labels_.size());
  for (std::size_t p = 0; p < labels_.size(); ++p)
    if (up_[p].count() == 1) out.set(p);
  return out;
}

std::vector<std::pair<int, int>> Poset::covers() const {
  std::vector<std::pair<int, int>> out;
  const int n = size();
  for (int p = 0; p < n; ++p) {
    for (std::size_t q = up_[p].find_first(); q != Bits::npos; q = up_[p].find_next(q)) {
      if (static_cast<int>(q) == p) continue;
      // strictly between: up(p) ∩ down(q) minus {p, q}
      Bits between = up_[p] & down_[q];
      if (between.count() == 2) out.emplace_back(p, static_cast<int>(q));
    }
  }
  return out;
}

Poset Poset::induced(std::span<const int> members) const {
  std::vector<int> sorted(members.begin(), members.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  int new_bottom = -1;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    check_element(sorted[i]);
    if (sorted[i] == bottom_) new_bottom = static_cast<int>(i);
    labels.push_back(labels_[sorted[i]]);
  }
  if (new_bottom < 0) throw InputError(ErrorCode::MissingBottom, "induced sub-poset must contain the bottom");
  return from_predicate(
      std::move(labels), [&](int p, int q) { return up_[sorted[p]].test(sorted[q]); }, new_bottom);
}

bool Poset::operator==(const Poset& other) const {
  return labels_ == other.labels_ && bottom_ == other.bottom_ && up_ == other.up_;
}

bool ConditionSet::contains(int p) const { return std::binary_search(members.begin(), members.end(), p); }

Bits ConditionSet::to_bits(int universe) const {
  Bits out(universe);
  for (int m : members) {
    if (m < 0 || m >= universe) throw InputError(ErrorCode::Membership, "condition outside the poset");
    out.set(m);
  }
  return out;
}

ConditionSet ConditionSet::from_bits(const Bits& bits) {
  ConditionSet out;
  for (std::size_t i = bits.find_first(); i != Bits::npos; i = bits.find_next(i))
    out.members.push_back(static_cast<int>(i));
  return out;
}

bool compatible(const Poset& poset, int p, int q) { return poset.compatible(p, q); }

namespace {

void antichain_dfs(const std::vector<Bits>& compat, std::vector<int>& chosen, const Bits& blocked, int next,
                   std::vector<ConditionSet>& out) {
  // blocked = everything compatible with a chosen element; maximal iff full.
  if (!chosen.empty() && blocked.all()) out.push_back(ConditionSet{chosen});
  const int n = static_cast<int>(compat.size());
  for (int j = next; j < n; ++j) {
    if (blocked.test(j)) continue;
    chosen.push_back(j);
    antichain_dfs(compat, chosen, blocked | compat[j], j + 1, out);
    chosen.pop_back();
  }
}

}  // namespace

std::vector<ConditionSet> maximal_antichains(const Poset& poset, std::size_t element_cap) {
  if (static_cast<std::size_t>(poset.size()) > element_cap)
    throw InputError(ErrorCode::CapExceeded, "maximal antichain enumeration capped at " +
                                                 std::to_string(element_cap) + " elements, got " +
                                                 std::to_string(poset.size()));
  const int n = poset.size();
  std::vector<Bits> compat(n);
  for (int p = 0; p < n; ++p) compat[p] = poset.compatible_with(p);
  std::vector<ConditionSet> out;
  std::vector<int> chosen;
  antichain_dfs(compat, chosen, Bits(n), 0, out);
  return out;
}

bool is_antichain(const Poset& poset, const ConditionSet& set) {
  for (std::size_t i = 0; i < set.members.size(); ++i)
    for (std::size_t j = i + 1; j < set.members.size(); ++j)
      if (poset.compatible(set.members[i], set.members[j])) return false;
  return true;
}

bool is_dense(const Poset& poset, const ConditionSet& set) {
  const Bits s = set.to_bits(poset.size());
  for (int p = 0; p < poset.size(); ++p)
    if (!poset.up(p).intersects(s)) return false;
  return true;
}

bool is_predense(const Poset& poset, const ConditionSet& set) {
  const Bits s = set.to_bits(poset.size());
  Bits reached(poset.size());
  for (int m : set.members) reached |= poset.compatible_with(m);
  return reached.all();
}

namespace posets {

Poset trivial() { return Poset::from_covers({"0"}, {}, 0); }

Poset chain(int n) {
  if (n < 1) throw InputError(ErrorCode::InvalidParams, "chain needs at least one element");
  std::vector<std::string> labels;
  std::vector<std::pair<int, int>> covers;
  for (int i = 0; i < n; ++i) {
    labels.push_back(i == 0 ? "0" : "c" + std::to_string(i));
    if (i > 0) covers.emplace_back(i - 1, i);
  }
  return Poset::from_covers(std::move(labels), covers, 0);
}

Poset flat(int width) {
  std::vector<std::string> labels{"0"};
  std::vector<std::pair<int, int>> covers;
  for (int i = 0; i < width; ++i) {
    labels.push_back(std::string(1, static_cast<char>('a' + i % 26)) + (i >= 26 ? std::to_string(i / 26) : ""));
    covers.emplace_back(0, i + 1);
  }
  return Poset::from_covers(std::move(labels), covers, 0);
}

Poset binary_tree(int depth) {
  if (depth < 0) throw InputError(ErrorCode::InvalidParams, "negative tree depth");
  std::vector<std::string> labels{"r"};
  std::vector<std::pair<int, int>> covers;
  std::vector<int> frontier{0};
  std::vector<std::string> names{""};
  for (int d = 0; d < depth; ++d) {
    std::vector<int> next;
    std::vector<std::string> next_names;
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      for (char bit : {'0', '1'}) {
        const int id = static_cast<int>(labels.size());
        next_names.push_back(names[i] + bit);
        labels.push_back("t" + next_names.back());
        covers.emplace_back(frontier[i], id);
        next.push_back(id);
      }
    }
    frontier = std::move(next);
    names = std::move(next_names);
  }
  return Poset::from_covers(std::move(labels), covers, 0);
}

Poset product(const Poset& left, const Poset& right) {
  const int nr = right.size();
  std::vector<std::string> labels;
  for (int a = 0; a < left.size(); ++a)
    for (int b = 0; b < nr; ++b) labels.push_back("(" + left.label(a) + "|" + right.label(b) + ")");
  return Poset::from_predicate(
      std::move(labels),
      [&](int p, int q) { return left.leq(p / nr, q / nr) && right.leq(p % nr, q % nr); },
      left.bottom() * nr + right.bottom());
}

}  // namespace posets

}  // namespace forcelab
