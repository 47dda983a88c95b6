#pragma once

#include <optional>
#include <string>
#include <vector>

#include "forcelab/amalgam.hpp"
#include "forcelab/embed.hpp"
#include "forcelab/iterate.hpp"

namespace forcelab {

/// A finite model of sweetness (P, D, E_0..E_{N-1}).
///
/// `class_of[n][p]` is the E_n-class index of p, or -1 when p is outside D.
/// Class indices run 0..class_count(n)-1 and are numbered by first member.
class SweetModel {
 public:
  /// `classes[n]` lists the E_n classes as element lists; each family must
  /// partition `dense`. Throws MalformedPartition otherwise.
  SweetModel(PosetRef poset, std::vector<int> dense, const std::vector<std::vector<std::vector<int>>>& classes);

  /// D = P, every E_n a single class (a model only when P is directed).
  static SweetModel single_class(PosetRef poset, int relations = 1);
  /// D = P, every E_n the identity relation.
  static SweetModel singletons(PosetRef poset, int relations = 1);

  const PosetRef& poset() const noexcept { return poset_; }
  const Bits& dense() const noexcept { return dense_; }
  std::vector<int> dense_members() const;
  int relation_count() const noexcept { return static_cast<int>(class_of_.size()); }
  int class_count(int n) const { return class_count_.at(n); }
  int class_of(int n, int p) const { return class_of_.at(n).at(p); }
  bool in_dense(int p) const { return dense_.test(p); }
  /// Members of the E_n-class of p (p must be in D).
  std::vector<int> class_members(int n, int p) const;
  /// All E_n classes, each sorted, in class-index order.
  std::vector<std::vector<int>> classes(int n) const;

 private:
  PosetRef poset_;
  Bits dense_;
  std::vector<std::vector<int>> class_of_;
  std::vector<int> class_count_;
};

/// One failed clause with the elements witnessing the failure.
struct ClauseFailure {
  std::string clause;
  std::vector<int> witness;  // element indices in the poset the clause speaks about
  int relation = -1;         // E_n index where relevant
  std::string detail;
  int level = -1;            // tower index where relevant
};

struct SweetReport {
  std::vector<std::string> checked;
  std::vector<ClauseFailure> failures;

  bool holds() const { return failures.empty(); }
  bool failed(const std::string& clause) const;
  const ClauseFailure* failure(const std::string& clause) const;
};

/// Clauses: density, class-count, directedness (bounds in D), fusion
/// (sequences of length N with p* in place of the limit point), continuity.
/// The first counterexample per clause is reported.
SweetReport validate_sweet(const SweetModel& model);

/// M1 < M2 along `inclusion` (matched by labels when absent). Clauses:
/// complete-suborder, dense-subset, restriction (clause 1), class-containment
/// (clause 2), downward-closure (clause 3). Witnesses index into M2's poset.
/// Throws IndexMismatch if the models have different N.
SweetReport validate_extends(const SweetModel& m1, const SweetModel& m2,
                             const std::optional<PosetInclusion>& inclusion = std::nullopt);

/// E_0 classes of a valid model; each is directed, hence centered, and they
/// cover the dense set. Throws HypothesisViolation for an invalid model.
std::vector<ConditionSet> centered_cover(const SweetModel& model);

/// A constructed model together with the checks run on it.
struct ConstructedModel {
  SweetModel model;
  SweetReport sweet;
  std::vector<SweetReport> extends;  // one per model it is meant to extend
  std::vector<ClauseFailure> construction;

  bool holds() const;
};

/// Union of a chain M_0 < M_1 < ... (consecutive links by `links`, or by
/// labels). Throws ChainPrecondition unless each consecutive pair extends.
/// The union lives on the last poset; it is validated and checked against
/// every member of the chain.
ConstructedModel chain_limit(const std::vector<SweetModel>& models,
                             const std::vector<PosetInclusion>& links = {});

/// Model on an amalgam of M1.P and M2.P: D* holds both injected dense sets
/// plus the pairs of non-bottom dense conditions that decide a common base
/// atom; classes are the injected classes plus product classes on the pairs.
/// Needs bottom in both D or in neither, with bottom classes singletons
/// (reported under `construction` otherwise).
ConstructedModel amalgam_sweet(const SweetModel& m1, const SweetModel& m2, const AmalgamInstance& inst);

/// Model on P * D: D* = {(p, tau) : p in D, tau constant on the atoms below
/// p}; (p, tau) E*_n (q, sigma) iff p E_n q and the constant values agree.
ConstructedModel hechler_sweet(const SweetModel& model, const TwoStep& iteration);

}  // namespace forcelab
