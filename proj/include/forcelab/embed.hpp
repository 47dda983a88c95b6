#pragma once

#include <vector>

#include "forcelab/completion.hpp"
#include "forcelab/poset.hpp"

namespace forcelab {

/// `small` sitting inside `large` via an injective, order-preserving map that
/// sends bottom to bottom.
struct PosetInclusion {
  PosetRef small;
  PosetRef large;
  std::vector<int> map;

  PosetInclusion(PosetRef small, PosetRef large, std::vector<int> map);

  /// Identity on one poset.
  static PosetInclusion identity(const PosetRef& poset);
  /// Match elements by label; throws InvalidInclusion on a missing label.
  static PosetInclusion by_labels(const PosetRef& small, const PosetRef& large);
  /// Induced sub-poset on `members` of `large`.
  static PosetInclusion induced(const PosetRef& large, const std::vector<int>& members);

  /// Composition: this followed by `next` (this->large must be next.small).
  PosetInclusion then(const PosetInclusion& next) const;

  /// Incompatible pairs of `small` stay incompatible in `large`.
  bool preserves_incompatibility() const;
};

/// Complete-suborder test through maximal antichains: every maximal antichain
/// of `small` maps to a maximal antichain of `large`.
bool is_complete_suborder(const PosetInclusion& inc, std::size_t element_cap = kAntichainElementCap);

/// {p in small : every p' >= p in small is compatible with q in large}.
ConditionSet reductions(const PosetInclusion& inc, int q);

/// Complete-suborder test through reductions: incompatibility is preserved
/// and every element of `large` has a nonempty reduction set.
bool is_complete_suborder_via_reductions(const PosetInclusion& inc);

/// p ⊩ "q ∈ (large : small)". Throws PreconditionError if small is not a
/// complete suborder of large.
bool quotient_forces(const PosetInclusion& inc, int p, int q);

/// Precomputed forcing evaluation for one inclusion; construction checks the
/// complete-suborder precondition once.
class QuotientOracle {
 public:
  explicit QuotientOracle(PosetInclusion inc);

  const PosetInclusion& inclusion() const noexcept { return inc_; }
  /// Same answer as quotient_forces(inclusion(), p, q).
  bool forces(int p, int q) const;
  /// The reduction set of q as bits over the small poset.
  Bits reduction_bits(int q) const;

 private:
  PosetInclusion inc_;
};

/// The quotient (large : small) tabulated per completion atom of small.
struct QuotientName {
  PosetInclusion inclusion;
  CompleteAlgebra base_completion;
  /// table[a] = elements of large compatible with every p whose value contains atom a.
  std::vector<Bits> table;

  explicit QuotientName(PosetInclusion inc);

  /// p ⊩ q ∈ (large : small) evaluated by quantifying over the atoms below p.
  bool forces_by_atoms(int p, int q) const;
};

/// The sub-poset of `large` on table[atom]; `members` receives the original
/// indices in order.
Poset quotient_at_atom(const QuotientName& name, int atom, std::vector<int>* members = nullptr);

/// For small ⋖ large: sends each completion atom of large to the atom of
/// small whose filter it induces. Throws PreconditionError without ⋖.
std::vector<int> atom_projection(const PosetInclusion& inc, const CompleteAlgebra& small_completion,
                                 const CompleteAlgebra& large_completion);

/// A map from a poset into the nonzero elements of a finite algebra.
struct CompleteEmbedding {
  PosetRef source;
  int target_atoms = 1;
  std::vector<AtomSet> map;

  /// Source = algebra_poset(base_atoms); the image of a base element is the
  /// union of the images of its atoms.
  static CompleteEmbedding from_atom_images(int base_atoms, int target_atoms, std::vector<AtomSet> atom_images);

  /// Image of a base-algebra element (only for from_atom_images embeddings).
  AtomSet apply_to_element(AtomSet base_element) const;

  struct Check {
    bool nonzero = true;
    bool injective = true;
    bool order_preserving = true;
    bool incompatibility_preserving = true;
    bool complete = true;
    bool ok() const { return nonzero && injective && order_preserving && incompatibility_preserving && complete; }
  };
  /// Completeness: every target atom t has some p all of whose extensions
  /// contain t (equivalently the image is a complete suborder of the
  /// nonzero elements).
  Check check(bool require_injective = true) const;
  void validate(bool require_injective = true) const;

  std::vector<AtomSet> atom_images;  // set by from_atom_images
};

}  // namespace forcelab
