#pragma once

#include <utility>
#include <vector>

#include "forcelab/completion.hpp"
#include "forcelab/embed.hpp"

namespace forcelab {

/// Amalgamation of two forcing notions over a common base algebra.
///
/// Conditions are pairs (l, r) of factor conditions admitted by the atom
/// criterion: some base atom a has f1(a) meeting the value of l and f2(a)
/// meeting the value of r. Pairs are ordered coordinatewise; bottom is
/// (bottom, bottom). When built by `amalgamate` the factors are the nonzero
/// elements of the given algebras.
struct AmalgamInstance {
  CompleteAlgebra base;
  PosetRef left;
  PosetRef right;
  CompleteAlgebra left_completion;
  CompleteAlgebra right_completion;
  CompleteEmbedding f1;
  CompleteEmbedding f2;

  PosetRef amalgam;
  std::vector<std::pair<int, int>> pairs;  // amalgam element -> (left, right)
  std::vector<int> pair_index;             // left * |right| + right -> element or -1

  /// l -> (l, bottom) and r -> (bottom, r).
  PosetInclusion inj_left;
  PosetInclusion inj_right;
  CompleteAlgebra completion;

  int index_of(int l, int r) const { return pair_index[static_cast<std::size_t>(l) * right->size() + r]; }

  /// Value in the amalgam's completion of an element of BA(left) / BA(right).
  AtomSet lift_left(AtomSet left_element) const;
  AtomSet lift_right(AtomSet right_element) const;
};

/// Membership by the atom criterion (what `amalgamate` uses).
bool amalgam_member_by_atoms(const CompleteAlgebra& left_completion, const CompleteAlgebra& right_completion,
                             const CompleteEmbedding& f1, const CompleteEmbedding& f2, int l, int r);

/// Membership by the literal definition: some nonzero base element p forces
/// both coordinates into their quotients, i.e. every nonzero p' below p has
/// f1(p') compatible with l and f2(p') compatible with r. Brute force over
/// base elements; kept independent of the atom criterion.
bool amalgam_member_by_witness(const CompleteAlgebra& left_completion, const CompleteAlgebra& right_completion,
                               const CompleteEmbedding& f1, const CompleteEmbedding& f2, int l, int r);

/// Amalgam of two posets. f1, f2 must come from CompleteEmbedding::from_atom_images
/// and target the completions of `left` and `right`.
AmalgamInstance amalgamate_posets(const CompleteAlgebra& base, const PosetRef& left, const PosetRef& right,
                                  CompleteEmbedding f1, CompleteEmbedding f2);

/// Amalgam of two algebras (their nonzero elements) over `base`.
AmalgamInstance amalgamate(const CompleteAlgebra& base, const CompleteAlgebra& left, const CompleteAlgebra& right,
                           CompleteEmbedding f1, CompleteEmbedding f2);

/// Conditions compatible with some (l, bottom) whose value lies below
/// f1(b), compared with the same set for the right copy, for every nonzero
/// base element b. Decided on the amalgam poset only.
bool check_identification(const AmalgamInstance& inst);

/// l -> value of (l, bottom) in the amalgam's completion.
CompleteEmbedding extension_embedding(const AmalgamInstance& inst);

/// Induced sub-amalgam on pairs whose coordinates lie in the given sets.
PosetInclusion level_inclusion(const AmalgamInstance& inst, const Bits& left_members, const Bits& right_members);

/// Isomorphism between two subalgebras, given block to block.
///
/// `dom` and `rng` may live in different parents; a partial isomorphism of a
/// single algebra has equal parents.
struct PartialIso {
  Subalgebra dom;
  Subalgebra rng;
  std::vector<int> block_map;

  PartialIso(Subalgebra dom, Subalgebra rng, std::vector<int> block_map);

  static PartialIso identity(const Subalgebra& sub);

  AtomSet apply(AtomSet dom_element) const;
  PartialIso inverse() const;

  /// Exhaustive check over the members of `dom`: bijective onto `rng`,
  /// preserves meet, join and complement, sends 0 and 1 to 0 and 1.
  bool verify_tables() const;
};

/// One back-and-forth stage: amalgamate P with itself so that the left copy
/// of BA(P) lands on the right copy and the given isomorphism is extended.
struct IsoExtension {
  AmalgamInstance instance;
  /// Values in the amalgam's completion of the atoms of BA(P).
  std::vector<AtomSet> left_copy;
  std::vector<AtomSet> right_copy;
  /// Partial isomorphism of the amalgam's completion: left copy -> right copy.
  PartialIso extended;
};

/// `iso` must be a partial isomorphism of BA(P). The base is dom(iso), sent
/// into the left factor through iso and into the right factor by inclusion,
/// so that extended(left copy of x) = left copy of iso(x) for x in dom(iso).
IsoExtension iso_extension_step(const PosetRef& poset, const PartialIso& iso);

/// True iff `wider`, read through `embed` (atom images of the narrower
/// algebra), agrees with `narrower` on dom(narrower).
bool extends_through(const PartialIso& wider, const PartialIso& narrower, const std::vector<AtomSet>& embed);

struct BackAndForthStage {
  int atom_count = 0;
  PartialIso iso;
  /// Atom images of the previous stage's algebra in this one (empty at stage 0).
  std::vector<AtomSet> embedding;
};

/// Stages 0..steps. Odd stages put the previous algebra into dom, even
/// stages into rng. Every stage is checked to extend its predecessor.
std::vector<BackAndForthStage> back_and_forth_tower(const PosetRef& poset, const PartialIso& iso, int steps);

/// Image of an element of an algebra under atom images.
AtomSet map_through(const std::vector<AtomSet>& atom_images, AtomSet element);

}  // namespace forcelab
