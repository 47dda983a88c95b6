#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "forcelab/dsl.hpp"
#include "forcelab/sweet.hpp"

namespace forcelab::lab {

struct Counterexample {
  std::string key;          // canonical sort key
  std::string claim;        // which check failed
  std::string detail;
  std::string certificate;  // DSL text when the instance has one, else empty
};

struct Report {
  std::string lemma;
  std::vector<std::pair<std::string, long long>> caps;
  std::uint64_t seed = 0;
  long long checked = 0;
  std::map<std::string, long long> hypothesis_stats;
  std::vector<Counterexample> counterexamples;  // sorted by key
  bool complete = true;                         // false when the budget ran out
  double elapsed_ms = 0;

  /// "passed", "failed", "incomplete" or "vacuous" (nothing checked).
  std::string verdict() const;
  bool passed() const { return verdict() == "passed"; }
  /// {lemma, caps, seed, checked, complete, verdict, hypothesis_stats,
  /// counterexamples, elapsed_ms}; elapsed_ms is null unless `timing`.
  std::string to_json(bool timing = false) const;
};

enum class Mode { Serial, Parallel };

/// FORCELAB_BUDGET_MS when set and valid, else 60 s.
std::chrono::milliseconds default_budget();

struct RunOptions {
  std::uint64_t seed = 0;
  std::chrono::milliseconds budget = default_budget();
  int jobs = 0;  // 0: OpenMP default
  Mode mode = Mode::Parallel;
};

/// All C with 1..max_atoms atoms, B <= D <= C, C0 <= C. Hypothesis (2) is
/// evaluated per atom of B; the strict reading (literal inclusion of the
/// quotients) decides which instances are checked, the equivalence reading
/// is counted alongside. Counterexamples are strict-reading failures of (3*).
Report verify_bcd(int max_atoms, const RunOptions& options = {});

struct AmalgamCaps {
  int base_atoms = 2;
  int factor_atoms = 3;
};

/// Every base algebra and pair of factor algebras within the caps, joined
/// by every pair of complete embeddings. Checks membership criteria
/// agreement, trivial-base products, identity collapse, completeness of
/// both injections, identification and quotient preservation.
Report verify_amalgam_claims(AmalgamCaps caps, const RunOptions& options = {});

struct SweetCorpus {
  std::vector<std::pair<std::string, SweetModel>> models;
  std::vector<std::pair<std::string, std::vector<SweetModel>>> chains;  // matched by labels
  int random_triples = 1000;
};

/// Adds every sweetness model and every tower (as a chain) of a document.
void add_document(SweetCorpus& corpus, const std::string& source, const dsl::Resolved& resolved);

/// Transitivity of extension over corpus triples and seeded random triples,
/// chain limits, and the amalgam and Hechler constructions on corpus models.
/// Models of the corpus that fail validation are counted and skipped.
Report verify_sweet_laws(const SweetCorpus& corpus, const RunOptions& options = {});

/// Agreement of the antichain and reduction criteria on every inclusion into
/// a poset with at most size_cap elements, and the two-step equivalence on
/// the complete ones.
Report verify_embedding_criteria(int size_cap, const RunOptions& options = {});

// ---------------------------------------------------------------- generators

/// Random poset with a bottom "0" and elements "e1".."e{size-1}"; labeling
/// is natural (p < q implies index p < index q).
Poset random_poset(std::mt19937_64& rng, int size);

/// Random valid model on `poset`: D contains every maximal element, classes
/// are random partitions (singletons when no valid draw is found).
SweetModel random_model(std::mt19937_64& rng, const PosetRef& poset, int relations);

/// Random M' > M: `added` new elements, each above a maximal element,
/// labeled "e{index}". Returns nothing if no valid extension was drawn.
std::optional<SweetModel> random_extension(std::mt19937_64& rng, const SweetModel& model, int added);

/// A DSL document holding the given models and their posets as
/// P1, M1, P2, M2, ...
std::string certificate(const std::vector<SweetModel>& models);

}  // namespace forcelab::lab
