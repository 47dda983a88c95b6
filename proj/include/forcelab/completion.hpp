#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <vector>

#include "forcelab/poset.hpp"

namespace forcelab {

/// An element of a finite Boolean algebra: the set of atoms below it.
using AtomSet = std::uint64_t;

inline constexpr int kMaxAtoms = 64;
/// Default cap for anything that enumerates subalgebras or all elements.
inline constexpr int kSubalgebraAtomCap = 16;

inline AtomSet full_set(int atoms) {
  return atoms >= 64 ? ~AtomSet{0} : ((AtomSet{1} << atoms) - 1);
}
inline int atom_count_of(AtomSet s) { return std::popcount(s); }

/// A finite Boolean algebra presented on its atoms.
///
/// Strengthening is reverse inclusion: b is stronger than c iff b ⊆ c and b is
/// nonzero. When `source` is set, `dense_map[p]` is the regular-open value of
/// source element p.
struct CompleteAlgebra {
  int atom_count = 1;
  PosetRef source;
  std::vector<AtomSet> dense_map;

  AtomSet full() const { return full_set(atom_count); }
  bool contains(AtomSet b) const { return (b & ~full()) == 0; }
};

/// Posets up to this size are completed by regularizing every principal
/// up-set; larger ones read the atoms off the maximal elements directly.
inline constexpr int kRegularizationSizeCap = 256;

/// Regular-open algebra of `poset`. Atoms are computed as the minimal
/// nonzero regularizations of principal up-sets, ordered by their least
/// maximal element. Throws CapExceeded above 64 atoms.
CompleteAlgebra regular_open_completion(const PosetRef& poset);
CompleteAlgebra regular_open_completion(const Poset& poset);
/// The regularization route regardless of size.
CompleteAlgebra completion_by_regularization(const PosetRef& poset);

/// Interior of the closure of an up-closed set U: {p : U is dense above p}.
Bits regularize(const Poset& poset, const Bits& open_set);

/// The nonzero elements of a `atoms`-atom algebra as a forcing notion.
/// Element i is the atom set i + 1; bottom is the full set. Labels list the
/// member atoms ("a0a2" style), the full set is "1".
Poset algebra_poset(int atoms);
inline AtomSet algebra_poset_value(int element) { return static_cast<AtomSet>(element) + 1; }
inline int algebra_poset_element(AtomSet value) { return static_cast<int>(value) - 1; }

/// Decides whether the completion of `poset` is isomorphic to `algebra` by an
/// atom bijection that carries every dense_map value onto the other. Returns
/// the bijection (atoms of `lhs` -> atoms of `rhs`) when found.
std::optional<std::vector<int>> matching_atom_bijection(const std::vector<AtomSet>& lhs_values,
                                                        const std::vector<AtomSet>& rhs_values,
                                                        int lhs_atoms, int rhs_atoms);

/// A subalgebra of a finite algebra, stored as the partition of the parent's
/// atoms into blocks (its own atoms). Members are the unions of blocks.
class Subalgebra {
 public:
  Subalgebra(int parent_atoms, std::vector<AtomSet> blocks);

  static Subalgebra trivial(int parent_atoms);
  static Subalgebra whole(int parent_atoms);

  int parent_atoms() const noexcept { return parent_atoms_; }
  const std::vector<AtomSet>& blocks() const noexcept { return blocks_; }
  int block_count() const noexcept { return static_cast<int>(blocks_.size()); }

  bool contains(AtomSet element) const;
  /// Every member, sorted ascending (includes 0 and the full set).
  std::vector<AtomSet> members() const;
  /// A member expressed over block indices, and back.
  AtomSet lower(AtomSet member) const;
  AtomSet lift(AtomSet over_blocks) const;
  int block_of_atom(int atom) const;

  /// The algebra whose atoms are this subalgebra's blocks.
  CompleteAlgebra as_algebra() const;

  bool is_subalgebra_of(const Subalgebra& other) const;

  bool operator==(const Subalgebra&) const = default;

 private:
  int parent_atoms_;
  std::vector<AtomSet> blocks_;
};

/// Smallest subalgebra containing `seeds`. Throws Membership for a seed that
/// is not an element of a `parent_atoms`-atom algebra.
Subalgebra generated_subalgebra(int parent_atoms, const std::vector<AtomSet>& seeds);
Subalgebra generated_subalgebra(const CompleteAlgebra& algebra, const std::vector<AtomSet>& seeds);

/// Element-wise intersection. Throws ParentMismatch for different parents.
Subalgebra intersect_subalgebras(const Subalgebra& lhs, const Subalgebra& rhs);

/// All subalgebras of a `parent_atoms`-atom algebra (one per set partition),
/// in a deterministic order.
std::vector<Subalgebra> all_subalgebras(int parent_atoms);
/// All subalgebras contained in `outer`.
std::vector<Subalgebra> subalgebras_of(const Subalgebra& outer);
/// All subalgebras of the parent that contain `inner`.
std::vector<Subalgebra> superalgebras_of(const Subalgebra& inner);

/// x ⊩_X "y ∈ (Y : X)" for a subalgebra X: every nonzero member of X below x
/// is compatible with y. Equivalently every block of X inside x meets y.
bool forces_in_quotient(const Subalgebra& base, AtomSet x, AtomSet y);

}  // namespace forcelab
