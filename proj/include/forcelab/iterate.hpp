#pragma once

#include <map>
#include <vector>

#include "forcelab/completion.hpp"
#include "forcelab/embed.hpp"

namespace forcelab {

/// Finite Hechler order: pairs (n, f) with 0 <= n <= m and f : m -> {0..h}.
struct HechlerParams {
  int m = 1;
  int h = 1;
};

struct HechlerCondition {
  int n = 0;
  std::vector<int> f;
  bool operator==(const HechlerCondition&) const = default;
};

/// (n, f) <= (n', f') iff n <= n', f and f' agree below n, and f <= f'
/// pointwise. Element index = n * (h+1)^m + f read as a base-(h+1) number
/// (f(0) most significant). Labels "n/f0f1..."; bottom is (0, 0...0).
Poset hechler_poset(HechlerParams params);
HechlerCondition hechler_condition(HechlerParams params, int index);
int hechler_index(HechlerParams params, const HechlerCondition& c);
std::string hechler_label(HechlerParams params, const HechlerCondition& c);

/// Upper bound on the number of two-step conditions.
inline constexpr std::size_t kTwoStepConditionCap = 8192;

/// P * Q where Q is given per completion atom of P.
///
/// A condition is (p, tau) with tau(a) in fibers[a] for every atom a below
/// the value of p; entries for other atoms are -1 (they can never matter, so
/// they are not stored). (p, tau) <= (p', tau') iff p <= p' and
/// tau(a) <= tau'(a) for every atom a below the value of p'.
struct TwoStep {
  PosetRef base;
  CompleteAlgebra base_completion;
  std::vector<PosetRef> fibers;

  PosetRef poset;
  std::vector<int> base_of;             // condition -> p
  std::vector<std::vector<int>> names;  // condition -> per-atom fiber element or -1
  /// p -> (p, bottom name).
  PosetInclusion embedding;

  /// -1 if (p, name) is not a condition. Entries for atoms outside the value
  /// of p are ignored.
  int index_of(int p, const std::vector<int>& name) const;

  std::map<std::pair<int, std::vector<int>>, int> lookup;
};

/// Throws InputError if fibers do not match the atoms of BA(P), and
/// CapExceeded above `cap` conditions.
TwoStep two_step(const PosetRef& base, std::vector<PosetRef> fibers, std::size_t cap = kTwoStepConditionCap);

/// P * (constant Hechler order). The embedding of P is verified to be a
/// complete suborder.
TwoStep compose_hechler(const PosetRef& base, HechlerParams params, std::size_t cap = kTwoStepConditionCap);

struct TwoStepEquivalence {
  int quotient_atoms = 0;
  int two_step_atoms = 0;
  /// Each maximal q of Q lies in exactly one atom's quotient.
  bool atoms_partitioned = false;
  /// The induced atom bijection carries the value of every q in Q and every
  /// (p, bottom) onto the corresponding values in the iteration.
  bool values_match = false;
  bool holds() const { return quotient_atoms == two_step_atoms && atoms_partitioned && values_match; }
};

/// Builds P * (Q : P) from the per-atom quotients and compares its
/// completion with BA(Q). Throws PreconditionError unless P ⋖ Q.
TwoStepEquivalence two_step_equivalence_report(const PosetInclusion& incl);
bool two_step_equivalence(const PosetInclusion& incl);

}  // namespace forcelab
