#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "forcelab/error.hpp"

namespace forcelab {

using Bits = boost::dynamic_bitset<std::uint64_t>;

/// Default element cap for maximal-antichain enumeration.
inline constexpr std::size_t kAntichainElementCap = 12;

/// A finite forcing notion: a partial order with a least element.
///
/// Elements are indices 0..size()-1. `leq(p, q)` reads "q is stronger than
/// p". The order is stored twice as bit rows: up(p) = {q : p <= q} and
/// down(q) = {p : p <= q}. Instances are immutable once built.
class Poset {
 public:
  /// Builds from a full relation; `leq[p][q]` true iff p <= q. Validates the
  /// partial-order axioms and that `bottom` lies below everything.
  Poset(std::vector<std::string> labels, const std::vector<Bits>& leq, int bottom);

  /// Reflexive-transitive closure of the given cover pairs (lo < hi).
  static Poset from_covers(std::vector<std::string> labels,
                           const std::vector<std::pair<int, int>>& covers, int bottom);

  template <class LeqFn>
  static Poset from_predicate(std::vector<std::string> labels, LeqFn&& leq, int bottom) {
    const std::size_t n = labels.size();
    std::vector<Bits> rel(n, Bits(n));
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = 0; q < n; ++q)
        if (leq(static_cast<int>(p), static_cast<int>(q))) rel[p].set(q);
    return Poset(std::move(labels), rel, bottom);
  }

  int size() const noexcept { return static_cast<int>(labels_.size()); }
  int bottom() const noexcept { return bottom_; }
  const std::string& label(int p) const;
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::optional<int> index_of(const std::string& label) const;

  bool leq(int p, int q) const;
  const Bits& up(int p) const;
  const Bits& down(int q) const;

  bool compatible(int p, int q) const;
  /// Elements compatible with p.
  Bits compatible_with(int p) const;
  Bits maximal_elements() const;

  /// Cover pairs (p, q) with p < q and nothing strictly between, sorted.
  std::vector<std::pair<int, int>> covers() const;

  /// Sub-poset on `members` (must contain bottom), inherited order, labels kept.
  /// The i-th element of the result is members[i] (sorted ascending).
  Poset induced(std::span<const int> members) const;

  bool operator==(const Poset& other) const;

  void check_element(int p) const;

 private:
  std::vector<std::string> labels_;
  std::vector<Bits> up_;
  std::vector<Bits> down_;
  int bottom_ = 0;
};

using PosetRef = std::shared_ptr<const Poset>;

inline PosetRef share(Poset p) { return std::make_shared<const Poset>(std::move(p)); }

/// A subset of a poset's elements, kept sorted.
struct ConditionSet {
  std::vector<int> members;

  bool contains(int p) const;
  Bits to_bits(int universe) const;
  static ConditionSet from_bits(const Bits& bits);
  bool operator==(const ConditionSet&) const = default;
  auto operator<=>(const ConditionSet&) const = default;
};

bool compatible(const Poset& poset, int p, int q);

/// All maximal antichains, each sorted, listed in lexicographic order of the
/// member sequences. Throws CapExceeded above `element_cap` elements.
std::vector<ConditionSet> maximal_antichains(const Poset& poset,
                                             std::size_t element_cap = kAntichainElementCap);

bool is_antichain(const Poset& poset, const ConditionSet& set);
bool is_dense(const Poset& poset, const ConditionSet& set);
bool is_predense(const Poset& poset, const ConditionSet& set);

// Builders used by fixtures, generators and tests.
namespace posets {

/// {bottom} alone.
Poset trivial();
/// bottom < c1 < ... < c_{n-1}.
Poset chain(int n);
/// bottom plus `width` pairwise incompatible atoms.
Poset flat(int width);
/// Complete binary tree of the given depth; labels are the branch strings.
Poset binary_tree(int depth);
/// Product order, labels "(a|b)", bottom (bottom, bottom).
Poset product(const Poset& left, const Poset& right);

}  // namespace posets

}  // namespace forcelab
