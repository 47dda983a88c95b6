#include "forcelab/sweet.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace forcelab {

namespace {

constexpr std::size_t kFusionNodeCap = std::size_t{1} << 24;

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
  void join(int a, int b) { parent[find(a)] = find(b); }
};

// Classes of a union-find restricted to `members`, as element lists.
std::vector<std::vector<int>> groups(UnionFind& uf, const std::vector<int>& members) {
  std::map<int, std::vector<int>> by_root;
  for (int x : members) by_root[uf.find(x)].push_back(x);
  std::vector<std::vector<int>> out;
  for (auto& [root, g] : by_root) out.push_back(std::move(g));
  return out;
}

bool same_poset(const PosetRef& a, const PosetRef& b) { return a.get() == b.get() || *a == *b; }

}  // namespace

SweetModel::SweetModel(PosetRef poset, std::vector<int> dense,
                       const std::vector<std::vector<std::vector<int>>>& classes)
    : poset_(std::move(poset)) {
  if (!poset_) throw InputError(ErrorCode::MalformedPartition, "null poset");
  const int n = poset_->size();
  dense_ = Bits(n);
  for (int p : dense) {
    poset_->check_element(p);
    if (dense_.test(p)) throw InputError(ErrorCode::MalformedPartition, "dense set lists an element twice");
    dense_.set(p);
  }
  if (classes.empty()) throw InputError(ErrorCode::MalformedPartition, "at least one relation is required");
  for (std::size_t r = 0; r < classes.size(); ++r) {
    std::vector<std::vector<int>> family;
    for (const auto& c : classes[r]) {
      if (c.empty()) throw InputError(ErrorCode::MalformedPartition, "empty class in E" + std::to_string(r));
      std::vector<int> sorted = c;
      std::sort(sorted.begin(), sorted.end());
      family.push_back(std::move(sorted));
    }
    std::sort(family.begin(), family.end());
    std::vector<int> cls(n, -1);
    for (std::size_t i = 0; i < family.size(); ++i)
      for (int p : family[i]) {
        poset_->check_element(p);
        if (!dense_.test(p))
          throw InputError(ErrorCode::MalformedPartition,
                           "E" + std::to_string(r) + " class contains '" + poset_->label(p) + "' outside D");
        if (cls[p] >= 0)
          throw InputError(ErrorCode::MalformedPartition,
                           "E" + std::to_string(r) + " classes overlap at '" + poset_->label(p) + "'");
        cls[p] = static_cast<int>(i);
      }
    for (int p = 0; p < n; ++p)
      if (dense_.test(p) && cls[p] < 0)
        throw InputError(ErrorCode::MalformedPartition,
                         "E" + std::to_string(r) + " does not cover '" + poset_->label(p) + "'");
    class_of_.push_back(std::move(cls));
    class_count_.push_back(static_cast<int>(family.size()));
  }
}

SweetModel SweetModel::single_class(PosetRef poset, int relations) {
  std::vector<int> all(poset->size());
  std::iota(all.begin(), all.end(), 0);
  std::vector<std::vector<std::vector<int>>> classes(relations, std::vector<std::vector<int>>{all});
  return SweetModel(std::move(poset), all, classes);
}

SweetModel SweetModel::singletons(PosetRef poset, int relations) {
  std::vector<int> all(poset->size());
  std::iota(all.begin(), all.end(), 0);
  std::vector<std::vector<int>> single;
  for (int p : all) single.push_back({p});
  std::vector<std::vector<std::vector<int>>> classes(relations, single);
  return SweetModel(std::move(poset), all, classes);
}

std::vector<int> SweetModel::dense_members() const { return ConditionSet::from_bits(dense_).members; }

std::vector<int> SweetModel::class_members(int n, int p) const {
  const int c = class_of(n, p);
  if (c < 0) throw InputError(ErrorCode::Membership, "'" + poset_->label(p) + "' is not in D");
  std::vector<int> out;
  for (int q = 0; q < poset_->size(); ++q)
    if (class_of_[n][q] == c) out.push_back(q);
  return out;
}

std::vector<std::vector<int>> SweetModel::classes(int n) const {
  std::vector<std::vector<int>> out(class_count(n));
  for (int p = 0; p < poset_->size(); ++p)
    if (class_of_[n][p] >= 0) out[class_of_[n][p]].push_back(p);
  return out;
}

bool SweetReport::failed(const std::string& clause) const { return failure(clause) != nullptr; }

const ClauseFailure* SweetReport::failure(const std::string& clause) const {
  for (const auto& f : failures)
    if (f.clause == clause) return &f;
  return nullptr;
}

bool ConstructedModel::holds() const {
  if (!sweet.holds() || !construction.empty()) return false;
  for (const auto& e : extends)
    if (!e.holds()) return false;
  return true;
}

namespace {

// class_bits[n][c] = members of class c of E_n.
std::vector<std::vector<Bits>> class_bits(const SweetModel& m) {
  const int size = m.poset()->size();
  std::vector<std::vector<Bits>> out(m.relation_count());
  for (int n = 0; n < m.relation_count(); ++n) {
    out[n].assign(m.class_count(n), Bits(size));
    for (int p = 0; p < size; ++p)
      if (m.class_of(n, p) >= 0) out[n][m.class_of(n, p)].set(p);
  }
  return out;
}

// Searches for a sequence p_n..p_{N-1} (p_i in [p*]_i) with no common
// extension inside [p*]_n. Returns the offending prefix or nothing.
bool fusion_counterexample(const SweetModel& m, const std::vector<std::vector<Bits>>& cb, int pstar, int n,
                           std::vector<int>& seq, std::size_t& nodes) {
  const Poset& P = *m.poset();
  const int N = m.relation_count();
  Bits target = cb[n][m.class_of(n, pstar)];
  auto rec = [&](auto&& self, int i, const Bits& remaining) -> bool {
    if (++nodes > kFusionNodeCap) throw InputError(ErrorCode::CapExceeded, "fusion search above its node budget");
    if (remaining.none()) return true;
    if (i == N) return false;
    const Bits& cls = cb[i][m.class_of(i, pstar)];
    for (std::size_t p = cls.find_first(); p != Bits::npos; p = cls.find_next(p)) {
      seq.push_back(static_cast<int>(p));
      if (self(self, i + 1, remaining & P.up(static_cast<int>(p)))) return true;
      seq.pop_back();
    }
    return false;
  };
  return rec(rec, n, target);
}

}  // namespace

SweetReport validate_sweet(const SweetModel& m) {
  const Poset& P = *m.poset();
  const int size = P.size();
  const int N = m.relation_count();
  const auto cb = class_bits(m);
  const Bits& D = m.dense();
  SweetReport rep;

  rep.checked.push_back("density");
  for (int p = 0; p < size; ++p)
    if (!P.up(p).intersects(D)) {
      rep.failures.push_back({"density", {p}, -1, "no extension in D"});
      break;
    }

  // Finite models always have finitely many classes; recorded for completeness.
  rep.checked.push_back("class-count");

  rep.checked.push_back("directedness");
  bool found = false;
  for (int n = 0; n < N && !found; ++n)
    for (const Bits& cls : cb[n]) {
      for (std::size_t x = cls.find_first(); x != Bits::npos && !found; x = cls.find_next(x))
        for (std::size_t y = cls.find_next(x); y != Bits::npos && !found; y = cls.find_next(y))
          if (!(P.up(static_cast<int>(x)) & P.up(static_cast<int>(y))).intersects(D)) {
            rep.failures.push_back({"directedness", {static_cast<int>(x), static_cast<int>(y)}, n,
                                    "no common extension in D"});
            found = true;
          }
      if (found) break;
    }

  rep.checked.push_back("fusion");
  found = false;
  std::size_t nodes = 0;
  for (int pstar = 0; pstar < size && !found; ++pstar) {
    if (!D.test(pstar)) continue;
    for (int n = 0; n < N && !found; ++n) {
      std::vector<int> seq;
      if (fusion_counterexample(m, cb, pstar, n, seq, nodes)) {
        std::vector<int> witness{pstar};
        witness.insert(witness.end(), seq.begin(), seq.end());
        rep.failures.push_back({"fusion", witness, n, "sequence from p* has no bound in [p*]_n"});
        found = true;
      }
    }
  }

  rep.checked.push_back("continuity");
  found = false;
  for (int p = 0; p < size && !found; ++p) {
    if (!D.test(p)) continue;
    const Bits& up = P.up(p);
    for (std::size_t q = up.find_first(); q != Bits::npos && !found; q = up.find_next(q)) {
      if (!D.test(q)) continue;
      for (int n = 0; n < N && !found; ++n) {
        const Bits& target = cb[n][m.class_of(n, static_cast<int>(q))];
        bool some_k = false;
        for (int k = 0; k < N && !some_k; ++k) {
          const Bits& src = cb[k][m.class_of(k, p)];
          bool all = true;
          for (std::size_t x = src.find_first(); x != Bits::npos && all; x = src.find_next(x))
            all = P.up(static_cast<int>(x)).intersects(target);
          some_k = all;
        }
        if (!some_k) {
          rep.failures.push_back({"continuity", {p, static_cast<int>(q)}, n, "no k works"});
          found = true;
        }
      }
    }
  }
  return rep;
}

SweetReport validate_extends(const SweetModel& m1, const SweetModel& m2,
                             const std::optional<PosetInclusion>& inclusion) {
  if (m1.relation_count() != m2.relation_count())
    throw InputError(ErrorCode::IndexMismatch, "models use " + std::to_string(m1.relation_count()) + " and " +
                                                   std::to_string(m2.relation_count()) + " relations");
  const PosetInclusion inc = inclusion ? *inclusion : PosetInclusion::by_labels(m1.poset(), m2.poset());
  if (!same_poset(inc.small, m1.poset()) || !same_poset(inc.large, m2.poset()))
    throw InputError(ErrorCode::ParentMismatch, "inclusion does not connect the two models");
  const Poset& P1 = *m1.poset();
  const Poset& P2 = *m2.poset();
  const int N = m1.relation_count();
  SweetReport rep;

  Bits image_d1(P2.size());
  for (int p = 0; p < P1.size(); ++p)
    if (m1.in_dense(p)) image_d1.set(inc.map[p]);

  rep.checked.push_back("complete-suborder");
  if (!inc.preserves_incompatibility()) {
    rep.failures.push_back({"complete-suborder", {}, -1, "incompatible conditions become compatible"});
  } else {
    for (int q = 0; q < P2.size(); ++q)
      if (reductions(inc, q).members.empty()) {
        rep.failures.push_back({"complete-suborder", {q}, -1, "no reduction"});
        break;
      }
  }

  rep.checked.push_back("dense-subset");
  for (int p = 0; p < P1.size(); ++p)
    if (m1.in_dense(p) && !m2.in_dense(inc.map[p])) {
      rep.failures.push_back({"dense-subset", {inc.map[p]}, -1, "dense element missing from the larger D"});
      break;
    }

  rep.checked.push_back("restriction");
  bool found = false;
  for (int n = 0; n < N && !found; ++n)
    for (int p = 0; p < P1.size() && !found; ++p)
      for (int q = p + 1; q < P1.size() && !found; ++q) {
        if (!m1.in_dense(p) || !m1.in_dense(q) || !m2.in_dense(inc.map[p]) || !m2.in_dense(inc.map[q])) continue;
        const bool e1 = m1.class_of(n, p) == m1.class_of(n, q);
        const bool e2 = m2.class_of(n, inc.map[p]) == m2.class_of(n, inc.map[q]);
        if (e1 != e2) {
          rep.failures.push_back({"restriction", {inc.map[p], inc.map[q]}, n,
                                  e1 ? "equivalent below, separated above" : "separated below, equivalent above"});
          found = true;
        }
      }

  rep.checked.push_back("class-containment");
  found = false;
  for (int n = 0; n < N && !found; ++n)
    for (int p = 0; p < P1.size() && !found; ++p) {
      if (!m1.in_dense(p) || !m2.in_dense(inc.map[p])) continue;
      for (int r : m2.class_members(n, inc.map[p]))
        if (!image_d1.test(r)) {
          rep.failures.push_back({"class-containment", {inc.map[p], r}, n, "class leaves the smaller D"});
          found = true;
          break;
        }
    }

  rep.checked.push_back("downward-closure");
  found = false;
  for (int q = 0; q < P1.size() && !found; ++q) {
    if (!m1.in_dense(q)) continue;
    const Bits& below = P2.down(inc.map[q]);
    for (std::size_t p = below.find_first(); p != Bits::npos; p = below.find_next(p))
      if (m2.in_dense(static_cast<int>(p)) && !image_d1.test(p)) {
        rep.failures.push_back({"downward-closure", {static_cast<int>(p), inc.map[q]}, -1,
                                "dense element below the smaller D is outside it"});
        found = true;
        break;
      }
  }
  return rep;
}

std::vector<ConditionSet> centered_cover(const SweetModel& model) {
  const SweetReport rep = validate_sweet(model);
  if (!rep.holds())
    throw InputError(ErrorCode::HypothesisViolation, "not a model of sweetness (" + rep.failures[0].clause + ")");
  std::vector<ConditionSet> out;
  for (auto& c : model.classes(0)) out.push_back(ConditionSet{std::move(c)});
  return out;
}

ConstructedModel chain_limit(const std::vector<SweetModel>& models, const std::vector<PosetInclusion>& links) {
  if (models.empty()) throw InputError(ErrorCode::ChainPrecondition, "empty chain");
  if (!links.empty() && links.size() + 1 != models.size())
    throw InputError(ErrorCode::ChainPrecondition, "need one link between each consecutive pair");
  std::vector<PosetInclusion> step;
  for (std::size_t i = 0; i + 1 < models.size(); ++i)
    step.push_back(links.empty() ? PosetInclusion::by_labels(models[i].poset(), models[i + 1].poset()) : links[i]);
  for (std::size_t i = 0; i < step.size(); ++i) {
    const SweetReport r = validate_extends(models[i], models[i + 1], step[i]);
    if (!r.holds())
      throw InputError(ErrorCode::ChainPrecondition, "model " + std::to_string(i + 1) + " does not extend model " +
                                                         std::to_string(i) + " (" + r.failures[0].clause + ")");
  }
  const std::size_t last = models.size() - 1;
  std::vector<PosetInclusion> to_last;
  for (std::size_t i = 0; i < models.size(); ++i) {
    PosetInclusion inc = PosetInclusion::identity(models[i].poset());
    for (std::size_t j = i; j < last; ++j) inc = inc.then(step[j]);
    to_last.push_back(std::move(inc));
  }
  const PosetRef top = models[last].poset();
  const int N = models[last].relation_count();
  Bits dense(top->size());
  for (std::size_t i = 0; i < models.size(); ++i)
    for (int p : models[i].dense_members()) dense.set(to_last[i].map[p]);
  const std::vector<int> members = ConditionSet::from_bits(dense).members;
  std::vector<std::vector<std::vector<int>>> classes;
  for (int n = 0; n < N; ++n) {
    UnionFind uf(top->size());
    for (std::size_t i = 0; i < models.size(); ++i)
      for (const auto& cls : models[i].classes(n))
        for (std::size_t j = 1; j < cls.size(); ++j) uf.join(to_last[i].map[cls[0]], to_last[i].map[cls[j]]);
    classes.push_back(groups(uf, members));
  }
  SweetModel limit(top, members, classes);
  ConstructedModel out{limit, validate_sweet(limit), {}, {}};
  for (std::size_t i = 0; i < models.size(); ++i) out.extends.push_back(validate_extends(models[i], limit, to_last[i]));
  return out;
}

ConstructedModel amalgam_sweet(const SweetModel& m1, const SweetModel& m2, const AmalgamInstance& inst) {
  if (!same_poset(inst.left, m1.poset()) || !same_poset(inst.right, m2.poset()))
    throw InputError(ErrorCode::ParentMismatch, "amalgam was not built over the models' posets");
  if (m1.relation_count() != m2.relation_count())
    throw InputError(ErrorCode::IndexMismatch, "models use different numbers of relations");
  const Poset& A = *inst.amalgam;
  const int N = m1.relation_count();
  const int b1 = inst.left->bottom();
  const int b2 = inst.right->bottom();
  std::vector<ClauseFailure> construction;

  if (m1.in_dense(b1) != m2.in_dense(b2))
    construction.push_back({"bottom-membership", {A.bottom()}, -1, "bottom is dense on one side only"});
  if (m1.in_dense(b1) && m2.in_dense(b2))
    for (int n = 0; n < N; ++n)
      if (m1.class_members(n, b1).size() != 1 || m2.class_members(n, b2).size() != 1) {
        construction.push_back({"bottom-class", {A.bottom()}, n, "bottom class is not a singleton"});
        break;
      }

  // Pairs deciding a common base atom.
  auto decides_common_atom = [&](int l, int r) {
    const AtomSet vl = inst.left_completion.dense_map[l];
    const AtomSet vr = inst.right_completion.dense_map[r];
    for (std::size_t a = 0; a < inst.f1.atom_images.size(); ++a)
      if ((vl & ~inst.f1.atom_images[a]) == 0 && (vr & ~inst.f2.atom_images[a]) == 0) return true;
    return false;
  };
  Bits dense(A.size()), in_x(A.size());
  for (int l = 0; l < inst.left->size(); ++l)
    if (m1.in_dense(l)) dense.set(inst.inj_left.map[l]);
  for (int r = 0; r < inst.right->size(); ++r)
    if (m2.in_dense(r)) dense.set(inst.inj_right.map[r]);
  for (int x = 0; x < A.size(); ++x) {
    const auto [l, r] = inst.pairs[x];
    if (l != b1 && r != b2 && m1.in_dense(l) && m2.in_dense(r) && decides_common_atom(l, r)) {
      dense.set(x);
      in_x.set(x);
    }
  }
  const std::vector<int> members = ConditionSet::from_bits(dense).members;
  const std::vector<int> x_members = ConditionSet::from_bits(in_x).members;

  std::vector<std::vector<std::vector<int>>> classes;
  for (int n = 0; n < N; ++n) {
    UnionFind uf(A.size());
    for (const auto& cls : m1.classes(n))
      for (std::size_t j = 1; j < cls.size(); ++j) uf.join(inst.inj_left.map[cls[0]], inst.inj_left.map[cls[j]]);
    for (const auto& cls : m2.classes(n))
      for (std::size_t j = 1; j < cls.size(); ++j) uf.join(inst.inj_right.map[cls[0]], inst.inj_right.map[cls[j]]);
    std::map<std::pair<int, int>, int> product_class;
    for (int x : x_members) {
      const auto [l, r] = inst.pairs[x];
      auto [it, fresh] = product_class.emplace(std::make_pair(m1.class_of(n, l), m2.class_of(n, r)), x);
      if (!fresh) uf.join(x, it->second);
    }
    classes.push_back(groups(uf, members));
  }
  SweetModel model(inst.amalgam, members, classes);
  ConstructedModel out{model, validate_sweet(model), {}, std::move(construction)};
  out.extends.push_back(validate_extends(m1, model, inst.inj_left));
  out.extends.push_back(validate_extends(m2, model, inst.inj_right));
  return out;
}

ConstructedModel hechler_sweet(const SweetModel& model, const TwoStep& it) {
  if (!same_poset(it.base, model.poset()))
    throw InputError(ErrorCode::ParentMismatch, "iteration is not over the model's poset");
  for (const auto& f : it.fibers)
    if (!same_poset(f, it.fibers.front()))
      throw InputError(ErrorCode::InvalidParams, "the iterand must be the same order at every atom");
  const int N = model.relation_count();
  const Poset& T = *it.poset;

  // Value of tau when constant on the atoms below p, else -1.
  std::vector<int> value(T.size(), -1);
  Bits dense(T.size());
  for (int x = 0; x < T.size(); ++x) {
    const int p = it.base_of[x];
    if (!model.in_dense(p)) continue;
    int v = -1;
    bool constant = true;
    for (int e : it.names[x]) {
      if (e < 0) continue;
      if (v >= 0 && e != v) constant = false;
      v = e;
    }
    if (constant) {
      value[x] = v;
      dense.set(x);
    }
  }
  const std::vector<int> members = ConditionSet::from_bits(dense).members;
  std::vector<std::vector<std::vector<int>>> classes;
  for (int n = 0; n < N; ++n) {
    std::map<std::pair<int, int>, std::vector<int>> by_key;
    for (int x : members) by_key[{model.class_of(n, it.base_of[x]), value[x]}].push_back(x);
    std::vector<std::vector<int>> family;
    for (auto& [key, cls] : by_key) family.push_back(std::move(cls));
    classes.push_back(std::move(family));
  }
  SweetModel out_model(it.poset, members, classes);
  ConstructedModel out{out_model, validate_sweet(out_model), {}, {}};
  out.extends.push_back(validate_extends(model, out_model, it.embedding));
  return out;
}

}  // namespace forcelab
