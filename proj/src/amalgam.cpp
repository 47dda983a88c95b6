#include "forcelab/amalgam.hpp"

#include <algorithm>

namespace forcelab {

namespace {

void check_factor_embedding(const CompleteAlgebra& base, const CompleteAlgebra& factor, const CompleteEmbedding& f,
                            const char* which) {
  if (static_cast<int>(f.atom_images.size()) != base.atom_count)
    throw InputError(ErrorCode::InvalidEmbedding, std::string(which) + ": needs one atom image per base atom");
  if (f.target_atoms != factor.atom_count)
    throw InputError(ErrorCode::InvalidEmbedding, std::string(which) + ": target is not the factor's completion");
  f.validate();
}

std::string pair_label(const std::string& l, const std::string& r) { return "(" + l + "|" + r + ")"; }

}  // namespace

AtomSet map_through(const std::vector<AtomSet>& atom_images, AtomSet element) {
  AtomSet out = 0;
  for (std::size_t a = 0; a < atom_images.size(); ++a)
    if (element >> a & 1) out |= atom_images[a];
  return out;
}

bool amalgam_member_by_atoms(const CompleteAlgebra& left_completion, const CompleteAlgebra& right_completion,
                             const CompleteEmbedding& f1, const CompleteEmbedding& f2, int l, int r) {
  const AtomSet vl = left_completion.dense_map[l];
  const AtomSet vr = right_completion.dense_map[r];
  for (std::size_t a = 0; a < f1.atom_images.size(); ++a)
    if ((f1.atom_images[a] & vl) && (f2.atom_images[a] & vr)) return true;
  return false;
}

bool amalgam_member_by_witness(const CompleteAlgebra& left_completion, const CompleteAlgebra& right_completion,
                               const CompleteEmbedding& f1, const CompleteEmbedding& f2, int l, int r) {
  const int k = static_cast<int>(f1.atom_images.size());
  if (k > kSubalgebraAtomCap) throw InputError(ErrorCode::CapExceeded, "witness search over a base above the cap");
  const AtomSet vl = left_completion.dense_map[l];
  const AtomSet vr = right_completion.dense_map[r];
  for (AtomSet p = 1; p <= full_set(k); ++p) {
    bool forces = true;
    // every nonzero p' <= p
    for (AtomSet sub = p; sub && forces; sub = (sub - 1) & p)
      forces = (f1.apply_to_element(sub) & vl) && (f2.apply_to_element(sub) & vr);
    if (forces) return true;
  }
  return false;
}

AtomSet AmalgamInstance::lift_left(AtomSet left_element) const {
  AtomSet out = 0;
  for (int l = 0; l < left->size(); ++l)
    if ((left_completion.dense_map[l] & ~left_element) == 0) out |= completion.dense_map[inj_left.map[l]];
  return out;
}

AtomSet AmalgamInstance::lift_right(AtomSet right_element) const {
  AtomSet out = 0;
  for (int r = 0; r < right->size(); ++r)
    if ((right_completion.dense_map[r] & ~right_element) == 0) out |= completion.dense_map[inj_right.map[r]];
  return out;
}

namespace {

struct Built {
  PosetRef amalgam;
  std::vector<std::pair<int, int>> pairs;
  std::vector<int> pair_index;
  PosetInclusion inj_left;
  PosetInclusion inj_right;
};

Built build_pairs(const PosetRef& left, const PosetRef& right, const CompleteAlgebra& lc, const CompleteAlgebra& rc,
                  const CompleteEmbedding& f1, const CompleteEmbedding& f2) {
  const int nl = left->size();
  const int nr = right->size();
  std::vector<std::pair<int, int>> pairs;
  std::vector<int> index(static_cast<std::size_t>(nl) * nr, -1);
  std::vector<std::string> labels;
  for (int l = 0; l < nl; ++l)
    for (int r = 0; r < nr; ++r)
      if (amalgam_member_by_atoms(lc, rc, f1, f2, l, r)) {
        index[static_cast<std::size_t>(l) * nr + r] = static_cast<int>(pairs.size());
        pairs.emplace_back(l, r);
        labels.push_back(pair_label(left->label(l), right->label(r)));
      }
  const int bottom = index[static_cast<std::size_t>(left->bottom()) * nr + right->bottom()];
  if (bottom < 0) throw InputError(ErrorCode::InvalidEmbedding, "empty base");
  auto amalgam = share(Poset::from_predicate(
      std::move(labels),
      [&](int x, int y) {
        return left->leq(pairs[x].first, pairs[y].first) && right->leq(pairs[x].second, pairs[y].second);
      },
      bottom));
  std::vector<int> ml(nl), mr(nr);
  for (int l = 0; l < nl; ++l) ml[l] = index[static_cast<std::size_t>(l) * nr + right->bottom()];
  for (int r = 0; r < nr; ++r) mr[r] = index[static_cast<std::size_t>(left->bottom()) * nr + r];
  PosetInclusion il(left, amalgam, std::move(ml));
  PosetInclusion ir(right, amalgam, std::move(mr));
  return Built{amalgam, std::move(pairs), std::move(index), std::move(il), std::move(ir)};
}

}  // namespace

AmalgamInstance amalgamate_posets(const CompleteAlgebra& base, const PosetRef& left, const PosetRef& right,
                                  CompleteEmbedding f1, CompleteEmbedding f2) {
  if (!left || !right) throw InputError(ErrorCode::InvalidEmbedding, "null factor");
  CompleteAlgebra lc = regular_open_completion(left);
  CompleteAlgebra rc = regular_open_completion(right);
  check_factor_embedding(base, lc, f1, "f1");
  check_factor_embedding(base, rc, f2, "f2");
  Built b = build_pairs(left, right, lc, rc, f1, f2);
  CompleteAlgebra completion = regular_open_completion(b.amalgam);
  return AmalgamInstance{base,
                         left,
                         right,
                         std::move(lc),
                         std::move(rc),
                         std::move(f1),
                         std::move(f2),
                         b.amalgam,
                         std::move(b.pairs),
                         std::move(b.pair_index),
                         std::move(b.inj_left),
                         std::move(b.inj_right),
                         std::move(completion)};
}

AmalgamInstance amalgamate(const CompleteAlgebra& base, const CompleteAlgebra& left, const CompleteAlgebra& right,
                           CompleteEmbedding f1, CompleteEmbedding f2) {
  if (left.atom_count > kSubalgebraAtomCap || right.atom_count > kSubalgebraAtomCap)
    throw InputError(ErrorCode::CapExceeded, "factor algebra above the element cap");
  return amalgamate_posets(base, share(algebra_poset(left.atom_count)), share(algebra_poset(right.atom_count)),
                           std::move(f1), std::move(f2));
}

bool check_identification(const AmalgamInstance& inst) {
  const Poset& A = *inst.amalgam;
  std::vector<Bits> compat_left(inst.left->size()), compat_right(inst.right->size());
  for (int l = 0; l < inst.left->size(); ++l) compat_left[l] = A.compatible_with(inst.inj_left.map[l]);
  for (int r = 0; r < inst.right->size(); ++r) compat_right[r] = A.compatible_with(inst.inj_right.map[r]);
  const int k = inst.base.atom_count;
  if (k > kSubalgebraAtomCap) throw InputError(ErrorCode::CapExceeded, "base above the element cap");
  for (AtomSet b = 1; b <= full_set(k); ++b) {
    const AtomSet x1 = inst.f1.apply_to_element(b);
    const AtomSet x2 = inst.f2.apply_to_element(b);
    Bits t1(A.size()), t2(A.size());
    for (int l = 0; l < inst.left->size(); ++l)
      if ((inst.left_completion.dense_map[l] & ~x1) == 0) t1 |= compat_left[l];
    for (int r = 0; r < inst.right->size(); ++r)
      if ((inst.right_completion.dense_map[r] & ~x2) == 0) t2 |= compat_right[r];
    if (t1 != t2) return false;
  }
  return true;
}

CompleteEmbedding extension_embedding(const AmalgamInstance& inst) {
  CompleteEmbedding out;
  out.source = inst.left;
  out.target_atoms = inst.completion.atom_count;
  for (int l = 0; l < inst.left->size(); ++l) out.map.push_back(inst.completion.dense_map[inst.inj_left.map[l]]);
  return out;
}

PosetInclusion level_inclusion(const AmalgamInstance& inst, const Bits& left_members, const Bits& right_members) {
  std::vector<int> members;
  for (int x = 0; x < inst.amalgam->size(); ++x) {
    const auto [l, r] = inst.pairs[x];
    if (left_members.test(l) && right_members.test(r)) members.push_back(x);
  }
  return PosetInclusion::induced(inst.amalgam, members);
}

PartialIso::PartialIso(Subalgebra d, Subalgebra r, std::vector<int> m)
    : dom(std::move(d)), rng(std::move(r)), block_map(std::move(m)) {
  if (dom.block_count() != rng.block_count() || static_cast<int>(block_map.size()) != dom.block_count())
    throw InputError(ErrorCode::NotSubalgebra, "isomorphism needs equally many blocks on both sides");
  std::vector<bool> hit(block_map.size(), false);
  for (int j : block_map) {
    if (j < 0 || j >= rng.block_count() || hit[j])
      throw InputError(ErrorCode::NotSubalgebra, "block map is not a bijection");
    hit[j] = true;
  }
}

PartialIso PartialIso::identity(const Subalgebra& sub) {
  std::vector<int> m(sub.block_count());
  for (int i = 0; i < sub.block_count(); ++i) m[i] = i;
  return PartialIso(sub, sub, std::move(m));
}

AtomSet PartialIso::apply(AtomSet x) const {
  if (!dom.contains(x)) throw InputError(ErrorCode::Membership, "element outside the domain");
  const AtomSet low = dom.lower(x);
  AtomSet image = 0;
  for (int i = 0; i < dom.block_count(); ++i)
    if (low >> i & 1) image |= AtomSet{1} << block_map[i];
  return rng.lift(image);
}

PartialIso PartialIso::inverse() const {
  std::vector<int> m(block_map.size());
  for (std::size_t i = 0; i < block_map.size(); ++i) m[block_map[i]] = static_cast<int>(i);
  return PartialIso(rng, dom, std::move(m));
}

bool PartialIso::verify_tables() const {
  if (dom.block_count() > 10) throw InputError(ErrorCode::CapExceeded, "table check above 10 blocks");
  const std::vector<AtomSet> members = dom.members();
  const AtomSet dfull = full_set(dom.parent_atoms());
  const AtomSet rfull = full_set(rng.parent_atoms());
  std::vector<AtomSet> images;
  for (AtomSet x : members) images.push_back(apply(x));
  if (apply(0) != 0 || apply(dfull) != rfull) return false;
  std::vector<AtomSet> sorted = images;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return false;
  if (sorted != rng.members()) return false;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (apply(dfull & ~members[i]) != (rfull & ~images[i])) return false;
    for (std::size_t j = 0; j < members.size(); ++j) {
      if (apply(members[i] & members[j]) != (images[i] & images[j])) return false;
      if (apply(members[i] | members[j]) != (images[i] | images[j])) return false;
    }
  }
  return true;
}

IsoExtension iso_extension_step(const PosetRef& poset, const PartialIso& iso) {
  const CompleteAlgebra c = regular_open_completion(poset);
  if (iso.dom.parent_atoms() != c.atom_count || iso.rng.parent_atoms() != c.atom_count)
    throw InputError(ErrorCode::NotSubalgebra, "isomorphism does not live in the completion of the poset");
  const int k = iso.dom.block_count();
  CompleteAlgebra base = iso.dom.as_algebra();
  std::vector<AtomSet> img1(k), img2(k);
  for (int i = 0; i < k; ++i) {
    img1[i] = iso.rng.blocks()[iso.block_map[i]];
    img2[i] = iso.dom.blocks()[i];
  }
  auto f1 = CompleteEmbedding::from_atom_images(k, c.atom_count, std::move(img1));
  auto f2 = CompleteEmbedding::from_atom_images(k, c.atom_count, std::move(img2));
  AmalgamInstance inst = amalgamate_posets(base, poset, poset, std::move(f1), std::move(f2));

  std::vector<AtomSet> left_copy(c.atom_count), right_copy(c.atom_count);
  for (int t = 0; t < c.atom_count; ++t) {
    left_copy[t] = inst.lift_left(AtomSet{1} << t);
    right_copy[t] = inst.lift_right(AtomSet{1} << t);
  }
  const int n = inst.completion.atom_count;
  Subalgebra dom(n, left_copy);
  Subalgebra rng(n, right_copy);
  std::vector<int> m(c.atom_count);
  for (int t = 0; t < c.atom_count; ++t) {
    const int from = dom.block_of_atom(std::countr_zero(left_copy[t]));
    const int to = rng.block_of_atom(std::countr_zero(right_copy[t]));
    m[from] = to;
  }
  PartialIso extended(std::move(dom), std::move(rng), std::move(m));
  return IsoExtension{std::move(inst), std::move(left_copy), std::move(right_copy), std::move(extended)};
}

bool extends_through(const PartialIso& wider, const PartialIso& narrower, const std::vector<AtomSet>& embed) {
  for (AtomSet block : narrower.dom.blocks()) {
    const AtomSet x = map_through(embed, block);
    if (!wider.dom.contains(x)) return false;
    if (wider.apply(x) != map_through(embed, narrower.apply(block))) return false;
  }
  return true;
}

std::vector<BackAndForthStage> back_and_forth_tower(const PosetRef& poset, const PartialIso& iso, int steps) {
  if (steps < 1) throw InputError(ErrorCode::InvalidParams, "back-and-forth needs at least one step");
  std::vector<BackAndForthStage> out;
  out.push_back(BackAndForthStage{iso.dom.parent_atoms(), iso, {}});
  PosetRef current = poset;
  for (int m = 1; m <= steps; ++m) {
    const PartialIso& prev = out.back().iso;
    // Later stages only need the previous algebra; its atoms are the atoms of a flat poset.
    if (m > 1) current = share(posets::flat(out.back().atom_count));
    const bool forth = m % 2 == 1;
    IsoExtension step = iso_extension_step(current, forth ? prev : prev.inverse());
    PartialIso next = forth ? step.extended : step.extended.inverse();
    if (!extends_through(next, prev, step.left_copy))
      throw std::logic_error("back-and-forth stage does not extend its predecessor");
    out.push_back(BackAndForthStage{step.instance.completion.atom_count, std::move(next), std::move(step.left_copy)});
  }
  return out;
}

}  // namespace forcelab
