#include "forcelab/lab.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <functional>
#include <sstream>

#include "forcelab/amalgam.hpp"
#include "forcelab/enumerate.hpp"
#include "forcelab/iterate.hpp"
#include "json.hpp"

namespace forcelab::lab {

std::string Report::verdict() const {
  if (!counterexamples.empty()) return "failed";
  if (!complete) return "incomplete";
  if (checked == 0) return "vacuous";
  return "passed";
}

std::string Report::to_json(bool timing) const {
  using nlohmann::ordered_json;
  ordered_json j;
  j["lemma"] = lemma;
  ordered_json c = ordered_json::object();
  for (const auto& [k, v] : caps) c[k] = v;
  j["caps"] = c;
  j["seed"] = seed;
  j["checked"] = checked;
  j["complete"] = complete;
  j["verdict"] = verdict();
  ordered_json stats = ordered_json::object();
  for (const auto& [k, v] : hypothesis_stats) stats[k] = v;
  j["hypothesis_stats"] = stats;
  ordered_json cex = ordered_json::array();
  for (const auto& x : counterexamples)
    cex.push_back({{"key", x.key}, {"claim", x.claim}, {"detail", x.detail}, {"certificate", x.certificate}});
  j["counterexamples"] = cex;
  j["elapsed_ms"] = timing ? ordered_json(elapsed_ms) : ordered_json(nullptr);
  return j.dump(2) + "\n";
}

std::chrono::milliseconds default_budget() {
  if (const char* env = std::getenv("FORCELAB_BUDGET_MS")) {
    char* end = nullptr;
    const long long v = std::strtoll(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return std::chrono::milliseconds(v);
  }
  return std::chrono::milliseconds(60000);
}

namespace {

using Clock = std::chrono::steady_clock;

struct Partial {
  long long checked = 0;
  std::map<std::string, long long> stats;
  std::vector<Counterexample> cex;
};

// Runs fn(i, partial) for i < items, serially or on an OpenMP team. Slots
// are merged in index order and counterexamples sorted by key, so the
// result does not depend on scheduling. Items not started before the budget
// runs out leave the report incomplete.
Report sweep(Report rep, std::size_t items, const RunOptions& opt,
             const std::function<void(std::size_t, Partial&)>& fn) {
  const auto start = Clock::now();
  std::vector<Partial> parts(items);
  std::vector<char> done(items, 0);
  auto run_one = [&](std::size_t i) {
    try {
      fn(i, parts[i]);
    } catch (const std::exception& e) {
      parts[i].cex.push_back({"~exception/" + std::to_string(i), "no-exception", e.what(), ""});
    }
    done[i] = 1;
  };
  if (opt.mode == Mode::Serial) {
    for (std::size_t i = 0; i < items; ++i) {
      if (Clock::now() - start > opt.budget) break;
      run_one(i);
    }
  } else {
    std::atomic<bool> stop{false};
    const int threads = opt.jobs > 0 ? opt.jobs : omp_get_max_threads();
    const long long n = static_cast<long long>(items);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (long long i = 0; i < n; ++i) {
      if (stop.load(std::memory_order_relaxed)) continue;
      if (Clock::now() - start > opt.budget) {
        stop.store(true, std::memory_order_relaxed);
        continue;
      }
      run_one(static_cast<std::size_t>(i));
    }
  }
  for (std::size_t i = 0; i < items; ++i) {
    if (!done[i]) {
      rep.complete = false;
      continue;
    }
    rep.checked += parts[i].checked;
    for (const auto& [k, v] : parts[i].stats) rep.hypothesis_stats[k] += v;
    for (auto& c : parts[i].cex) rep.counterexamples.push_back(std::move(c));
  }
  std::stable_sort(rep.counterexamples.begin(), rep.counterexamples.end(),
                   [](const Counterexample& a, const Counterexample& b) { return a.key < b.key; });
  rep.elapsed_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  return rep;
}

Report base_report(const std::string& lemma, std::vector<std::pair<std::string, long long>> caps,
                   const RunOptions& opt) {
  Report r;
  r.lemma = lemma;
  r.caps = std::move(caps);
  r.seed = opt.seed;
  return r;
}

std::string blocks_text(const Subalgebra& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.blocks().size(); ++i) out += (i ? "," : "") + std::to_string(s.blocks()[i]);
  return out + "]";
}

// ---------------------------------------------------------------- BCD

std::vector<AtomSet> nonzero_members(const Subalgebra& s) {
  std::vector<AtomSet> out;
  for (AtomSet m : s.members())
    if (m) out.push_back(m);
  return out;
}

// x forces y into (parent : X) for every nonzero x in X and y in `ys`
// whenever it forces it into (Y : X) for the smaller quotient base.
bool transfers(const Subalgebra& low, const Subalgebra& high, const std::vector<AtomSet>& xs,
               const std::vector<AtomSet>& ys, AtomSet* bad_x, AtomSet* bad_y) {
  for (AtomSet y : ys)
    for (AtomSet x : xs)
      if (forces_in_quotient(low, x, y) && !forces_in_quotient(high, x, y)) {
        if (bad_x) *bad_x = x;
        if (bad_y) *bad_y = y;
        return false;
      }
  return true;
}

}  // namespace

Report verify_bcd(int max_atoms, const RunOptions& options) {
  if (max_atoms < 2) throw InputError(ErrorCode::InvalidParams, "max_atoms must be at least 2");
  if (max_atoms > 8) throw InputError(ErrorCode::CapExceeded, "max_atoms above 8");
  std::vector<std::vector<Subalgebra>> subs(max_atoms + 1);
  std::vector<std::pair<int, std::size_t>> items;  // (atoms, index of D)
  for (int n = 1; n <= max_atoms; ++n) {
    subs[n] = all_subalgebras(n);
    for (std::size_t d = 0; d < subs[n].size(); ++d) items.emplace_back(n, d);
  }
  return sweep(base_report("bcd", {{"max_atoms", max_atoms}}, options), items.size(), options,
               [&](std::size_t i, Partial& out) {
                 const auto [n, di] = items[i];
                 const Subalgebra& D = subs[n][di];
                 const auto d_members = nonzero_members(D);
                 for (const Subalgebra& B : subalgebras_of(D)) {
                   const auto b_members = nonzero_members(B);
                   for (const Subalgebra& C0 : subs[n]) {
                     ++out.stats["instances"];
                     const Subalgebra B0 = intersect_subalgebras(B, C0);
                     const Subalgebra D0 = intersect_subalgebras(D, C0);
                     // (2) at each atom of B: every d meeting the atom lies in
                     // C0 (strict), or agrees on the atom with some member of
                     // D0 (equivalence reading).
                     bool strict = true, weak = true;
                     const auto d0_members = D0.members();
                     for (AtomSet beta : B.blocks())
                       for (AtomSet d : d_members) {
                         if (!(d & beta)) continue;
                         if (!C0.contains(d)) strict = false;
                         bool eq = false;
                         for (AtomSet d1 : d0_members) eq = eq || (d1 & beta) == (d & beta);
                         if (!eq) weak = false;
                       }
                     const bool d_in_c0 = D.is_subalgebra_of(C0);
                     const bool hyp3 = transfers(B0, C0, nonzero_members(B0), b_members, nullptr, nullptr);
                     out.stats["hyp2_strict"] += strict;
                     out.stats["hyp2_weak"] += weak;
                     out.stats["hyp2_strict_and_d_not_in_c0"] += strict && !d_in_c0;
                     out.stats["hyp3"] += hyp3;
                     if (!hyp3 || !(strict || weak)) continue;
                     AtomSet bx = 0, by = 0;
                     const bool concl = transfers(D0, C0, nonzero_members(D0), d_members, &bx, &by);
                     if (weak) {
                       ++out.stats["checked_weak"];
                       out.stats["weak_conclusion_failures"] += !concl;
                       if (!strict) ++out.stats["checked_weak_only"];
                     }
                     if (!strict) continue;
                     ++out.checked;
                     if (!concl) {
                       std::ostringstream key;
                       key << "n=" << n << " B=" << blocks_text(B) << " D=" << blocks_text(D)
                           << " C0=" << blocks_text(C0);
                       out.cex.push_back({key.str(), "3*",
                                          "d0=" + std::to_string(bx) + " d=" + std::to_string(by) +
                                              " forced into (D:D0) but not into (C:C0)",
                                          ""});
                     }
                   }
                 }
               });
}

// ---------------------------------------------------------------- amalgam claims

namespace {

CompleteAlgebra algebra(int atoms) {
  CompleteAlgebra a;
  a.atom_count = atoms;
  return a;
}

// Every surjection of n target atoms onto k base atoms, as atom images.
std::vector<std::vector<AtomSet>> surjections(int k, int n) {
  std::vector<std::vector<AtomSet>> out;
  std::vector<int> f(n, 0);
  for (;;) {
    std::vector<AtomSet> images(k, 0);
    for (int t = 0; t < n; ++t) images[f[t]] |= AtomSet{1} << t;
    if (std::all_of(images.begin(), images.end(), [](AtomSet s) { return s != 0; })) out.push_back(images);
    int i = 0;
    while (i < n && ++f[i] == k) f[i++] = 0;
    if (i == n) break;
  }
  return out;
}

std::string atom_label(const Poset& algebra_order, int t) {
  return algebra_order.label(algebra_poset_element(AtomSet{1} << t));
}

std::vector<std::vector<std::string>> image_blocks(const Poset& P, const std::vector<AtomSet>& images) {
  std::vector<std::vector<std::string>> out;
  for (AtomSet img : images) {
    out.emplace_back();
    for (int t = 0; t < 64; ++t)
      if (img >> t & 1) out.back().push_back(atom_label(P, t));
  }
  return out;
}

std::string amalgam_certificate(const AmalgamInstance& inst) {
  dsl::Document doc;
  doc.declarations.push_back(dsl::poset_decl(*inst.left, "L"));
  doc.declarations.push_back(dsl::poset_decl(*inst.right, "R"));
  doc.declarations.push_back(dsl::AmalgamDecl{"A", "L", "R", image_blocks(*inst.left, inst.f1.atom_images),
                                              image_blocks(*inst.right, inst.f2.atom_images)});
  return dsl::emit_dsl(dsl::parse(dsl::emit_dsl(doc)));
}

// base element -> left (or right) algebra element.
PosetInclusion base_into(const CompleteEmbedding& f, const PosetRef& side) {
  std::vector<int> m;
  for (int e = 0; e < f.source->size(); ++e) m.push_back(algebra_poset_element(f.map[e]));
  return PosetInclusion(f.source, side, m);
}

bool quotients_preserved(const PosetInclusion& into_side, const PosetInclusion& inj) {
  const PosetInclusion into_amalgam = into_side.then(inj);
  if (!is_complete_suborder_via_reductions(into_amalgam)) return false;
  const QuotientOracle small_q(into_side), big_q(into_amalgam);
  for (int p = 0; p < into_side.small->size(); ++p)
    for (int q = 0; q < into_side.large->size(); ++q)
      if (small_q.forces(p, q) && !big_q.forces(p, inj.map[q])) return false;
  return true;
}

}  // namespace

Report verify_amalgam_claims(AmalgamCaps caps, const RunOptions& options) {
  if (caps.base_atoms < 1 || caps.factor_atoms < caps.base_atoms)
    throw InputError(ErrorCode::InvalidParams, "need 1 <= base_atoms <= factor_atoms");
  if (caps.factor_atoms > 5) throw InputError(ErrorCode::CapExceeded, "factor_atoms above 5");
  struct Item {
    int k, n1, n2;
    std::vector<AtomSet> f1, f2;
  };
  std::vector<Item> items;
  for (int k = 1; k <= caps.base_atoms; ++k)
    for (int n1 = k; n1 <= caps.factor_atoms; ++n1)
      for (int n2 = k; n2 <= caps.factor_atoms; ++n2)
        for (const auto& f1 : surjections(k, n1))
          for (const auto& f2 : surjections(k, n2)) items.push_back({k, n1, n2, f1, f2});

  return sweep(
      base_report("amalgam", {{"base_atoms", caps.base_atoms}, {"factor_atoms", caps.factor_atoms}}, options),
      items.size(), options, [&](std::size_t i, Partial& out) {
        const Item& it = items[i];
        const auto f1 = CompleteEmbedding::from_atom_images(it.k, it.n1, it.f1);
        const auto f2 = CompleteEmbedding::from_atom_images(it.k, it.n2, it.f2);
        const auto inst = amalgamate(algebra(it.k), algebra(it.n1), algebra(it.n2), f1, f2);
        ++out.checked;
        std::ostringstream key;
        key << "k=" << it.k << " n1=" << it.n1 << " n2=" << it.n2 << " f1=";
        for (AtomSet s : it.f1) key << s << ",";
        key << " f2=";
        for (AtomSet s : it.f2) key << s << ",";
        auto fail = [&](const std::string& claim, const std::string& detail) {
          out.cex.push_back({key.str() + " " + claim, claim, detail, amalgam_certificate(inst)});
        };

        long long mismatches = 0;
        for (int l = 0; l < inst.left->size(); ++l)
          for (int r = 0; r < inst.right->size(); ++r) {
            ++out.stats["membership_pairs"];
            const bool w = amalgam_member_by_witness(inst.left_completion, inst.right_completion, f1, f2, l, r);
            mismatches += w != (inst.index_of(l, r) >= 0);
          }
        if (mismatches) fail("membership", std::to_string(mismatches) + " pairs disagree");

        if (it.k == 1) {
          ++out.stats["trivial_base"];
          if (!(*inst.amalgam == posets::product(*inst.left, *inst.right)))
            fail("trivial-base-product", "amalgam differs from the product");
        }
        bool identity = it.n1 == it.k && it.n2 == it.k;
        for (int a = 0; identity && a < it.k; ++a) identity = it.f1[a] == (AtomSet{1} << a) && it.f2[a] == it.f1[a];
        if (identity) {
          ++out.stats["identity"];
          std::vector<AtomSet> meets;
          for (const auto& [l, r] : inst.pairs) meets.push_back(algebra_poset_value(l) & algebra_poset_value(r));
          if (!matching_atom_bijection(inst.completion.dense_map, meets, inst.completion.atom_count, it.k))
            fail("identity-collapse", "completion is not the base");
        }

        if (!is_complete_suborder(inst.inj_left) || !is_complete_suborder(inst.inj_right))
          fail("injections-complete", "an injection is not a complete suborder");
        if (!extension_embedding(inst).check().ok()) fail("extension-embedding", "not a complete embedding");
        if (!check_identification(inst)) fail("identification", "the copies of the base differ");
        for (AtomSet b = 1; b <= full_set(it.k); ++b)
          if (inst.lift_left(f1.apply_to_element(b)) != inst.lift_right(f2.apply_to_element(b))) {
            fail("identification-values", "base element " + std::to_string(b) + " has two values");
            break;
          }
        if (!quotients_preserved(base_into(f1, inst.left), inst.inj_left) ||
            !quotients_preserved(base_into(f2, inst.right), inst.inj_right))
          fail("quotient-preservation", "a forced quotient membership is lost in the amalgam");
      });
}

// ---------------------------------------------------------------- generators

namespace {

std::uint64_t draw(std::mt19937_64& rng, std::uint64_t n) { return n ? rng() % n : 0; }

std::vector<std::vector<int>> random_partition(std::mt19937_64& rng, const std::vector<int>& members) {
  std::vector<std::vector<int>> out;
  for (int p : members) {
    const std::uint64_t slot = draw(rng, out.size() + 1);
    if (slot == out.size())
      out.push_back({p});
    else
      out[slot].push_back(p);
  }
  return out;
}

std::vector<std::vector<std::vector<int>>> singletons_of(const std::vector<int>& members, int relations) {
  std::vector<std::vector<int>> family;
  for (int p : members) family.push_back({p});
  return std::vector<std::vector<std::vector<int>>>(relations, family);
}

}  // namespace

Poset random_poset(std::mt19937_64& rng, int size) {
  if (size < 1) throw InputError(ErrorCode::InvalidParams, "size must be positive");
  std::vector<std::string> labels{"0"};
  std::vector<std::pair<int, int>> covers;
  for (int j = 1; j < size; ++j) {
    labels.push_back("e" + std::to_string(j));
    covers.emplace_back(0, j);
    for (int i = 1; i < j; ++i)
      if (draw(rng, 3) == 0) covers.emplace_back(i, j);
  }
  return Poset::from_covers(std::move(labels), covers, 0);
}

SweetModel random_model(std::mt19937_64& rng, const PosetRef& poset, int relations) {
  const Poset& P = *poset;
  const Bits maximal = P.maximal_elements();
  std::vector<int> dense;
  for (int p = 0; p < P.size(); ++p)
    if (maximal.test(p) || (p != P.bottom() && draw(rng, 2) == 0)) dense.push_back(p);
  for (int attempt = 0; attempt < 8; ++attempt) {
    std::vector<std::vector<std::vector<int>>> classes;
    for (int n = 0; n < relations; ++n) classes.push_back(random_partition(rng, dense));
    SweetModel m(poset, dense, classes);
    if (validate_sweet(m).holds()) return m;
  }
  return SweetModel(poset, dense, singletons_of(dense, relations));
}

std::optional<SweetModel> random_extension(std::mt19937_64& rng, const SweetModel& model, int added) {
  const Poset& P = *model.poset();
  const int old_size = P.size();
  std::vector<std::string> labels = P.labels();
  std::vector<std::pair<int, int>> covers = P.covers();
  Bits maximal = P.maximal_elements();
  maximal.resize(old_size + added);
  for (int k = 0; k < added; ++k) {
    const int x = old_size + k;
    std::vector<int> tops = ConditionSet::from_bits(maximal).members;
    const int parent = tops[draw(rng, tops.size())];
    labels.push_back("e" + std::to_string(x));
    covers.emplace_back(parent, x);
    maximal.reset(parent);
    maximal.set(x);
  }
  for (const auto& l : labels)
    if (std::count(labels.begin(), labels.end(), l) > 1) return std::nullopt;
  const auto Q = share(Poset::from_covers(labels, covers, P.bottom()));

  std::vector<int> fresh;
  for (int x = old_size; x < Q->size(); ++x)
    if (maximal.test(x) || draw(rng, 2) == 0) fresh.push_back(x);
  std::vector<int> dense = model.dense_members();
  dense.insert(dense.end(), fresh.begin(), fresh.end());
  const int N = model.relation_count();
  for (int attempt = 0; attempt < 8; ++attempt) {
    std::vector<std::vector<std::vector<int>>> classes;
    for (int n = 0; n < N; ++n) {
      classes.push_back(model.classes(n));
      for (auto& c : attempt < 7 ? random_partition(rng, fresh) : singletons_of(fresh, 1)[0])
        classes.back().push_back(std::move(c));
    }
    SweetModel m(Q, dense, classes);
    if (validate_sweet(m).holds() && validate_extends(model, m).holds()) return m;
  }
  return std::nullopt;
}

std::string certificate(const std::vector<SweetModel>& models) {
  dsl::Document doc;
  for (std::size_t i = 0; i < models.size(); ++i) {
    const auto part =
        dsl::document_for(models[i], "P" + std::to_string(i + 1), "M" + std::to_string(i + 1));
    for (const auto& d : part.declarations) doc.declarations.push_back(d);
  }
  return dsl::emit_dsl(dsl::parse(dsl::emit_dsl(doc)));
}

void add_document(SweetCorpus& corpus, const std::string& source, const dsl::Resolved& resolved) {
  for (const auto& [name, m] : resolved.sweets) corpus.models.emplace_back(source + ":" + name, m);
  for (const auto& [name, t] : resolved.towers) corpus.chains.emplace_back(source + ":" + name, t.models());
}

// ---------------------------------------------------------------- sweetness laws

namespace {

constexpr int kHechlerBaseCap = 12;
constexpr int kAmalgamProductCap = 400;

std::uint64_t mix(std::uint64_t seed, std::uint64_t i) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (i + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Premise of an extension; an inclusion that cannot be formed by labels
// counts as "does not extend".
bool extends(const SweetModel& a, const SweetModel& b) {
  if (a.relation_count() != b.relation_count()) return false;
  try {
    return validate_extends(a, b).holds();
  } catch (const InputError&) {
    return false;
  }
}

std::string first_failure(const ConstructedModel& c) {
  if (!c.sweet.holds()) return "sweet:" + c.sweet.failures[0].clause;
  for (std::size_t i = 0; i < c.extends.size(); ++i)
    if (!c.extends[i].holds()) return "extends[" + std::to_string(i) + "]:" + c.extends[i].failures[0].clause;
  return "";
}

CompleteEmbedding block_embedding(const std::vector<AtomSet>& images, int target_atoms) {
  return CompleteEmbedding::from_atom_images(static_cast<int>(images.size()), target_atoms, images);
}

// Amalgam of two models over a base whose atoms go to the given images;
// construction preconditions that do not hold are counted, not reported.
void check_amalgam(const SweetModel& m1, const SweetModel& m2, const std::vector<AtomSet>& img1,
                   const std::vector<AtomSet>& img2, const std::string& key, Partial& out) {
  const CompleteAlgebra c1 = regular_open_completion(m1.poset());
  const CompleteAlgebra c2 = regular_open_completion(m2.poset());
  CompleteAlgebra base;
  base.atom_count = static_cast<int>(img1.size());
  const auto inst = amalgamate_posets(base, m1.poset(), m2.poset(), block_embedding(img1, c1.atom_count),
                                      block_embedding(img2, c2.atom_count));
  const ConstructedModel c = amalgam_sweet(m1, m2, inst);
  if (!c.construction.empty()) {
    ++out.stats["amalgam_precondition_unmet"];
    return;
  }
  ++out.stats["amalgam_models"];
  ++out.checked;
  const std::string f = first_failure(c);
  if (!f.empty()) out.cex.push_back({key, "amalgam-sweet", f, certificate({m1, m2, c.model})});
}

void check_hechler(const SweetModel& m, const std::string& key, Partial& out) {
  if (m.poset()->size() > kHechlerBaseCap) {
    ++out.stats["hechler_skipped_size"];
    return;
  }
  const TwoStep ts = compose_hechler(m.poset(), {1, 1});
  const ConstructedModel c = hechler_sweet(m, ts);
  ++out.stats["hechler_models"];
  ++out.checked;
  const std::string f = first_failure(c);
  if (!f.empty()) out.cex.push_back({key, "hechler-sweet", f, certificate({m, c.model})});
}

void check_limit(const std::vector<SweetModel>& chain, const std::string& key, Partial& out) {
  const ConstructedModel c = chain_limit(chain);
  ++out.stats["chain_limits"];
  ++out.checked;
  const std::string f = first_failure(c);
  if (!f.empty()) {
    auto all = chain;
    all.push_back(c.model);
    out.cex.push_back({key, "chain-limit", f, certificate(all)});
  }
}

// Amalgams of a model with itself / another over the trivial base, and over
// a two-block base (first atom against the rest) when both sides have room.
void amalgam_family(const SweetModel& a, const SweetModel& b, const std::string& key, Partial& out) {
  if (a.poset()->size() * b.poset()->size() > kAmalgamProductCap) {
    ++out.stats["amalgam_skipped_size"];
    return;
  }
  const int na = regular_open_completion(a.poset()).atom_count;
  const int nb = regular_open_completion(b.poset()).atom_count;
  check_amalgam(a, b, {full_set(na)}, {full_set(nb)}, key + " trivial", out);
  if (na >= 2 && nb >= 2)
    check_amalgam(a, b, {1, full_set(na) & ~AtomSet{1}}, {1, full_set(nb) & ~AtomSet{1}}, key + " split", out);
}

}  // namespace

Report verify_sweet_laws(const SweetCorpus& corpus, const RunOptions& options) {
  std::vector<std::pair<std::string, const SweetModel*>> valid;
  long long invalid = 0;
  for (const auto& [name, m] : corpus.models) {
    if (validate_sweet(m).holds())
      valid.emplace_back(name, &m);
    else
      ++invalid;
  }
  const std::size_t v = valid.size();
  const std::size_t chains = corpus.chains.size();
  const std::size_t triples = static_cast<std::size_t>(std::max(0, corpus.random_triples));
  // items: [0, v) transitivity rows; [v, 2v) Hechler; [2v, 2v + v(v+1)/2)
  // amalgams; then chains; then random triples.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < v; ++a)
    for (std::size_t b = a; b < v; ++b)
      if (valid[a].second->relation_count() == valid[b].second->relation_count()) pairs.emplace_back(a, b);
  const std::size_t amalgam_end = 2 * v + pairs.size();
  const std::size_t chain_end = amalgam_end + chains;

  Report rep = base_report("sweet", {{"corpus_models", static_cast<long long>(corpus.models.size())},
                                     {"random_triples", static_cast<long long>(triples)}},
                           options);
  rep.hypothesis_stats["corpus_valid"] = static_cast<long long>(v);
  rep.hypothesis_stats["corpus_invalid"] = invalid;
  return sweep(std::move(rep), chain_end + triples, options, [&](std::size_t i, Partial& out) {
    if (i < v) {
      const SweetModel& a = *valid[i].second;
      for (std::size_t b = 0; b < v; ++b) {
        if (!extends(a, *valid[b].second)) continue;
        for (std::size_t c = 0; c < v; ++c) {
          if (!extends(*valid[b].second, *valid[c].second)) continue;
          ++out.stats["corpus_triples"];
          ++out.checked;
          if (!extends(a, *valid[c].second))
            out.cex.push_back({"corpus " + valid[i].first + " < " + valid[b].first + " < " + valid[c].first,
                               "transitivity", "first does not extend into the third",
                               certificate({a, *valid[b].second, *valid[c].second})});
        }
      }
    } else if (i < 2 * v) {
      check_hechler(*valid[i - v].second, "corpus hechler " + valid[i - v].first, out);
    } else if (i < amalgam_end) {
      const auto [a, b] = pairs[i - 2 * v];
      amalgam_family(*valid[a].second, *valid[b].second, "corpus amalgam " + valid[a].first + " " + valid[b].first,
                     out);
    } else if (i < chain_end) {
      const auto& [name, chain] = corpus.chains[i - amalgam_end];
      bool ok = !chain.empty();
      for (std::size_t k = 0; ok && k + 1 < chain.size(); ++k) ok = extends(chain[k], chain[k + 1]);
      if (!ok) {
        ++out.stats["chain_not_increasing"];
        return;
      }
      check_limit(chain, "corpus chain " + name, out);
    } else {
      const std::size_t t = i - chain_end;
      std::mt19937_64 rng(mix(options.seed, t));
      for (int attempt = 0; attempt < 64; ++attempt) {
        const int N = 1 + static_cast<int>(draw(rng, 2));
        const auto P1 = share(random_poset(rng, 1 + static_cast<int>(draw(rng, 4))));
        const SweetModel m1 = random_model(rng, P1, N);
        auto m2 = random_extension(rng, m1, 1 + static_cast<int>(draw(rng, 2)));
        if (!m2) continue;
        auto m3 = random_extension(rng, *m2, 1 + static_cast<int>(draw(rng, 2)));
        if (!m3) continue;
        bool mutated = false;
        if (draw(rng, 3) == 0) {
          // merge two classes of one relation in the middle or the top model
          SweetModel& target = draw(rng, 2) ? *m2 : *m3;
          const int n = static_cast<int>(draw(rng, N));
          std::vector<std::vector<std::vector<int>>> classes;
          for (int r = 0; r < N; ++r) classes.push_back(target.classes(r));
          auto& fam = classes[n];
          if (fam.size() >= 2) {
            const std::size_t x = draw(rng, fam.size());
            std::size_t y = draw(rng, fam.size() - 1);
            if (y >= x) ++y;
            fam[x].insert(fam[x].end(), fam[y].begin(), fam[y].end());
            fam.erase(fam.begin() + static_cast<long>(y));
            target = SweetModel(target.poset(), target.dense_members(), classes);
            mutated = true;
          }
        }
        if (!extends(m1, *m2) || !extends(*m2, *m3)) {
          ++out.stats["random_premise_failed"];
          continue;
        }
        ++out.stats["random_triples"];
        out.stats["random_triples_mutated"] += mutated;
        ++out.checked;
        const std::string key = "random " + std::to_string(t);
        const std::vector<SweetModel> chain{m1, *m2, *m3};
        if (!extends(m1, *m3))
          out.cex.push_back({key, "transitivity", "first does not extend into the third", certificate(chain)});
        if (validate_sweet(*m2).holds() && validate_sweet(*m3).holds()) {
          check_limit(chain, key + " limit", out);
          check_hechler(m1, key + " hechler", out);
          amalgam_family(m1, *m3, key + " amalgam", out);
        } else {
          ++out.stats["random_mutation_unsweet"];
        }
        return;
      }
      ++out.stats["random_generation_failed"];
    }
  });
}

// ---------------------------------------------------------------- embedding criteria

namespace {

std::string inclusion_certificate(const PosetInclusion& inc) {
  dsl::Document doc;
  dsl::PosetDecl s = dsl::poset_decl(*inc.small, "S");
  dsl::PosetDecl l = dsl::poset_decl(*inc.large, "L");
  // small labels may coincide with large ones; prefix to keep them apart
  for (auto& e : s.elements) e = "s." + e;
  s.bottom = "s." + s.bottom;
  for (auto& [a, b] : s.covers) {
    a = "s." + a;
    b = "s." + b;
  }
  dsl::MapDecl m{"m", "S", "L", {}};
  for (int p = 0; p < inc.small->size(); ++p) m.pairs.emplace_back("s." + inc.small->label(p), inc.large->label(inc.map[p]));
  doc.declarations = {s, l, m};
  return dsl::emit_dsl(dsl::parse(dsl::emit_dsl(doc)));
}

std::string inclusion_key(const PosetInclusion& inc) {
  std::ostringstream os;
  os << "L=" << enumerate::canonical_code(*inc.large) << "/" << inc.large->size() << " S=" << inc.small->size()
     << " map=";
  for (int x : inc.map) os << x << ",";
  return os.str();
}

}  // namespace

Report verify_embedding_criteria(int size_cap, const RunOptions& options) {
  if (size_cap < 1) throw InputError(ErrorCode::InvalidParams, "size_cap must be positive");
  if (size_cap > 6) throw InputError(ErrorCode::CapExceeded, "size_cap above 6");
  std::vector<PosetRef> larges;
  for (int n = 1; n <= size_cap; ++n)
    for (Poset& P : enumerate::natural_posets(n)) larges.push_back(share(std::move(P)));
  std::vector<std::vector<PosetRef>> smalls(size_cap + 1);
  for (int n = 1; n <= size_cap; ++n)
    for (Poset& P : enumerate::posets_up_to_iso(n)) smalls[n].push_back(share(std::move(P)));

  auto check = [](const PosetInclusion& inc, Partial& out, const std::optional<bool>& expected) {
    const bool a = is_complete_suborder(inc);
    const bool b = is_complete_suborder_via_reductions(inc);
    ++out.checked;
    out.stats["complete"] += a;
    if (a != b)
      out.cex.push_back({inclusion_key(inc), "criteria-agree",
                         std::string("antichains say ") + (a ? "complete" : "not complete") + ", reductions say " +
                             (b ? "complete" : "not complete"),
                         inclusion_certificate(inc)});
    if (expected && (a != *expected || b != *expected))
      out.cex.push_back({inclusion_key(inc), "anchor", *expected ? "expected complete" : "expected not complete",
                         inclusion_certificate(inc)});
    if (a && b) {
      ++out.stats["two_step_checked"];
      if (!two_step_equivalence(inc))
        out.cex.push_back({inclusion_key(inc), "two-step-equivalence", "P * (Q : P) is not equivalent to Q",
                           inclusion_certificate(inc)});
    }
  };

  return sweep(base_report("embedding", {{"size_cap", size_cap}}, options), larges.size() + 1, options,
               [&](std::size_t i, Partial& out) {
                 if (i == 0) {
                   // anchors: the vee inside the three-atom antichain, and identities
                   const auto vee = share(posets::flat(2));
                   const auto vee3 = share(posets::flat(3));
                   check(PosetInclusion(vee, vee3, {0, 1, 2}), out, false);
                   check(PosetInclusion::identity(vee), out, true);
                   check(PosetInclusion::identity(share(posets::binary_tree(2))), out, true);
                   out.stats["anchors"] += 3;
                   return;
                 }
                 const PosetRef& L = larges[i - 1];
                 for (int ns = 1; ns <= L->size(); ++ns)
                   for (const PosetRef& S : smalls[ns])
                     enumerate::for_each_inclusion(S, L, [&](const PosetInclusion& inc) {
                       ++out.stats["inclusions"];
                       check(inc, out, std::nullopt);
                     });
               });
}

}  // namespace forcelab::lab
