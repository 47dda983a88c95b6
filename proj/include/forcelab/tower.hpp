#pragma once

#include <vector>

#include "forcelab/amalgam.hpp"
#include "forcelab/iterate.hpp"
#include "forcelab/sweet.hpp"

namespace forcelab {

/// A finite tower (P^0, M^0), ..., (P^{L-1}, M^{L-1}); the last level is the top.
class Tower {
 public:
  /// `links[i]` sends level i into level i+1; matched by labels when empty.
  /// Throws InvalidTower for an empty tower or a link that does not join
  /// consecutive levels.
  explicit Tower(std::vector<SweetModel> levels, std::vector<PosetInclusion> links = {});

  int length() const noexcept { return static_cast<int>(levels_.size()); }
  int top_index() const noexcept { return length() - 1; }
  const SweetModel& model(int i) const { return levels_.at(i); }
  const PosetRef& poset(int i) const { return levels_.at(i).poset(); }
  const PosetRef& top() const { return levels_.back().poset(); }
  const std::vector<SweetModel>& models() const noexcept { return levels_; }
  const std::vector<PosetInclusion>& links() const noexcept { return links_; }

  /// Composite of the links from level i to level j (i <= j).
  PosetInclusion into(int i, int j) const;

 private:
  std::vector<SweetModel> levels_;
  std::vector<PosetInclusion> links_;
};

/// Clauses "level-sweet" (witness: the first failing clause's witness) and
/// "complete-suborder" (P^i into P^j for every i < j).
SweetReport validate_tower(const Tower& tower);

/// Index set C: nonempty, inside the tower, containing the top index.
struct TowerLeqWitness {
  std::vector<int> C;

  static TowerLeqWitness all(int length);
  static TowerLeqWitness from(int first, int length);
  bool contains(int i) const;
};

/// The two readings of "p forces q into the quotient" disagreed.
struct ReadingDivergence {
  int tower = 0;  // 1 or 2
  int level = 0;
  int p = 0;
  int q = 0;
  bool by_reductions = false;
  bool by_atoms = false;
};

struct TowerLeqReport {
  /// Clauses "top-complete-suborder", "extends" (witness from the level's
  /// extension report, `level` set, detail names the failed clause) and
  /// "quotient-forcing" (witness {p, q}: p in P^i_1, q in the top of T1).
  SweetReport report;
  std::vector<ReadingDivergence> divergences;

  bool holds() const { return report.holds(); }
};

/// T1 <= T2 at the indices in C. `cross[i]` sends P^i_1 into P^i_2 (all
/// levels; matched by labels when empty). Quotient forcing is decided
/// through reductions; the atom reading is computed alongside and every
/// disagreement is recorded. Throws IndexMismatch on different lengths,
/// InvalidWitness for a bad C, InvalidTower when a level is not a complete
/// suborder of its top.
TowerLeqReport tower_leq(const Tower& t1, const Tower& t2, const TowerLeqWitness& c,
                         const std::vector<PosetInclusion>& cross = {});

/// C-rounding: the least index of C at or above i, or the top index.
int round_up(const TowerLeqWitness& c, int i, int length);

struct MergedTower {
  Tower tower;
  TowerLeqWitness witness;
  std::vector<ConstructedModel> limits;  // per level
  SweetReport invariants;
  std::vector<TowerLeqReport> checks;  // one per input tower

  bool holds() const;
};

/// Merge of a <=-chain T_0 <= T_1 <= ... (witnesses[k] for T_k <= T_{k+1},
/// levels matched by labels). Level i of the result is the chain limit of
/// the models at the C-rounded index. Throws ChainPrecondition unless the
/// chain holds and InvalidWitness when the witnesses share no index.
MergedTower tower_chain_merge(const std::vector<Tower>& towers, const std::vector<TowerLeqWitness>& witnesses);

struct HechlerTower {
  Tower tower;
  std::vector<TwoStep> levels;
  std::vector<ConstructedModel> models;
  std::vector<PosetInclusion> cross;  // P^i -> P^i * D
  SweetReport invariants;
  TowerLeqReport leq;  // original <= result with C = all

  bool holds() const;
};

/// Level-wise Hechler composition; a level-i name is carried up to level j
/// through the atom projection.
HechlerTower tower_hechler(const Tower& tower, HechlerParams params);

struct AmalgamTower {
  Tower tower;
  std::vector<AmalgamInstance> levels;  // levels below i0 repeat level i0
  std::vector<ConstructedModel> models;
  TowerLeqWitness witness;              // indices >= i0
  std::vector<PosetInclusion> left_cross, right_cross;
  SweetReport invariants;
  TowerLeqReport left_leq, right_leq;

  bool holds() const;
};

/// blocks[a] = the atoms of BA(top) below atom a of BA(P^i).
std::vector<AtomSet> level_blocks(const Tower& tower, int i);
/// BA(P^i) as a subalgebra of BA(top).
Subalgebra level_subalgebra(const Tower& tower, int i);

/// Amalgam of two towers of equal length over an isomorphism f between a
/// subalgebra of BA(top(T1)) and one of BA(top(T3)). Every level i >= i0
/// must satisfy f[dom f & BA(P^i_1)] = rng f & BA(P^i_3) (HypothesisViolation
/// naming the index otherwise). Level i >= i0 amalgamates P^i_1 and P^i_3 over
/// dom f & BA(P^i_1); lower levels use level i0.
AmalgamTower tower_amalgamate(const Tower& t1, const Tower& t3, const PartialIso& f, int i0);

struct ExtendedTower {
  Tower tower;
  std::vector<ConstructedModel> models;  // levels >= from
  std::vector<PosetInclusion> cross;     // old level -> new level
};

/// Levels i >= from become P^i x R with the amalgam model over a trivial base.
ExtendedTower product_tower(const Tower& tower, const SweetModel& factor, int from);

}  // namespace forcelab
