#include "forcelab/embed.hpp"

#include <algorithm>

namespace forcelab {

PosetInclusion::PosetInclusion(PosetRef small_poset, PosetRef large_poset, std::vector<int> m)
    : small(std::move(small_poset)), large(std::move(large_poset)), map(std::move(m)) {
  if (!small || !large) throw InputError(ErrorCode::InvalidInclusion, "null poset");
  if (static_cast<int>(map.size()) != small->size())
    throw InputError(ErrorCode::InvalidInclusion, "map size differs from the small poset");
  std::vector<bool> hit(large->size(), false);
  for (int image : map) {
    if (image < 0 || image >= large->size()) throw InputError(ErrorCode::InvalidInclusion, "image out of range");
    if (hit[image]) throw InputError(ErrorCode::InvalidInclusion, "map is not injective");
    hit[image] = true;
  }
  if (map[small->bottom()] != large->bottom())
    throw InputError(ErrorCode::InvalidInclusion, "bottom is not sent to bottom");
  for (int p = 0; p < small->size(); ++p) {
    const Bits& u = small->up(p);
    for (std::size_t q = u.find_first(); q != Bits::npos; q = u.find_next(q))
      if (!large->leq(map[p], map[q]))
        throw InputError(ErrorCode::InvalidInclusion,
                         "order not preserved at '" + small->label(p) + "' <= '" + small->label(q) + "'");
  }
}

PosetInclusion PosetInclusion::identity(const PosetRef& poset) {
  std::vector<int> m(poset->size());
  for (int i = 0; i < poset->size(); ++i) m[i] = i;
  return PosetInclusion(poset, poset, std::move(m));
}

PosetInclusion PosetInclusion::by_labels(const PosetRef& small_poset, const PosetRef& large_poset) {
  std::vector<int> m;
  for (const std::string& l : small_poset->labels()) {
    auto idx = large_poset->index_of(l);
    if (!idx) throw InputError(ErrorCode::InvalidInclusion, "label '" + l + "' missing from the larger poset");
    m.push_back(*idx);
  }
  return PosetInclusion(small_poset, large_poset, std::move(m));
}

PosetInclusion PosetInclusion::induced(const PosetRef& large_poset, const std::vector<int>& members) {
  std::vector<int> sorted = members;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  auto small_poset = share(large_poset->induced(sorted));
  return PosetInclusion(small_poset, large_poset, sorted);
}

PosetInclusion PosetInclusion::then(const PosetInclusion& next) const {
  if (large.get() != next.small.get() && !(*large == *next.small))
    throw InputError(ErrorCode::InvalidInclusion, "inclusions do not compose");
  std::vector<int> m(map.size());
  for (std::size_t i = 0; i < map.size(); ++i) m[i] = next.map[map[i]];
  return PosetInclusion(small, next.large, std::move(m));
}

bool PosetInclusion::preserves_incompatibility() const {
  for (int p = 0; p < small->size(); ++p)
    for (int q = p + 1; q < small->size(); ++q)
      if (!small->compatible(p, q) && large->compatible(map[p], map[q])) return false;
  return true;
}

bool is_complete_suborder(const PosetInclusion& inc, std::size_t element_cap) {
  const Poset& L = *inc.large;
  std::vector<Bits> compat_large(L.size());
  for (int image : inc.map) compat_large[image] = L.compatible_with(image);
  for (const ConditionSet& antichain : maximal_antichains(*inc.small, element_cap)) {
    Bits covered(L.size());
    for (std::size_t i = 0; i < antichain.members.size(); ++i) {
      const int image = inc.map[antichain.members[i]];
      for (std::size_t j = i + 1; j < antichain.members.size(); ++j)
        if (compat_large[image].test(inc.map[antichain.members[j]])) return false;
      covered |= compat_large[image];
    }
    if (!covered.all()) return false;
  }
  return true;
}

namespace {

// For q in large: {p in small : every extension of p is compatible with q}.
Bits reduction_bits_from(const PosetInclusion& inc, int q) {
  const Poset& S = *inc.small;
  const Poset& L = *inc.large;
  Bits good(S.size());
  for (int p = 0; p < S.size(); ++p)
    if (L.compatible(q, inc.map[p])) good.set(p);
  Bits out(S.size());
  for (int p = 0; p < S.size(); ++p)
    if (S.up(p).is_subset_of(good)) out.set(p);
  return out;
}

}  // namespace

ConditionSet reductions(const PosetInclusion& inc, int q) {
  inc.large->check_element(q);
  return ConditionSet::from_bits(reduction_bits_from(inc, q));
}

bool is_complete_suborder_via_reductions(const PosetInclusion& inc) {
  if (!inc.preserves_incompatibility()) return false;
  for (int q = 0; q < inc.large->size(); ++q)
    if (reduction_bits_from(inc, q).none()) return false;
  return true;
}

bool quotient_forces(const PosetInclusion& inc, int p, int q) { return QuotientOracle(inc).forces(p, q); }

QuotientOracle::QuotientOracle(PosetInclusion inc) : inc_(std::move(inc)) {
  if (!is_complete_suborder_via_reductions(inc_))
    throw PreconditionError("quotient forcing needs a complete suborder");
}

bool QuotientOracle::forces(int p, int q) const {
  inc_.small->check_element(p);
  return reduction_bits(q).test(p);
}

Bits QuotientOracle::reduction_bits(int q) const {
  inc_.large->check_element(q);
  return reduction_bits_from(inc_, q);
}

QuotientName::QuotientName(PosetInclusion inc)
    : inclusion(std::move(inc)), base_completion(regular_open_completion(inclusion.small)) {
  const Poset& S = *inclusion.small;
  const Poset& L = *inclusion.large;
  std::vector<Bits> compat(S.size());
  for (int p = 0; p < S.size(); ++p) compat[p] = L.compatible_with(inclusion.map[p]);
  for (int a = 0; a < base_completion.atom_count; ++a) {
    Bits row(L.size());
    row.set();
    for (int p = 0; p < S.size(); ++p)
      if (base_completion.dense_map[p] >> a & 1) row &= compat[p];
    table.push_back(std::move(row));
  }
}

bool QuotientName::forces_by_atoms(int p, int q) const {
  inclusion.small->check_element(p);
  inclusion.large->check_element(q);
  const AtomSet atoms = base_completion.dense_map[p];
  for (int a = 0; a < base_completion.atom_count; ++a)
    if ((atoms >> a & 1) && !table[a].test(q)) return false;
  return true;
}

Poset quotient_at_atom(const QuotientName& name, int atom, std::vector<int>* members) {
  if (atom < 0 || atom >= name.base_completion.atom_count)
    throw InputError(ErrorCode::UnknownElement, "unknown completion atom " + std::to_string(atom));
  std::vector<int> m = ConditionSet::from_bits(name.table[atom]).members;
  Poset out = name.inclusion.large->induced(m);
  if (members) *members = std::move(m);
  return out;
}

std::vector<int> atom_projection(const PosetInclusion& inc, const CompleteAlgebra& small_completion,
                                 const CompleteAlgebra& large_completion) {
  if (!is_complete_suborder_via_reductions(inc))
    throw PreconditionError("atom projection needs a complete suborder");
  const Poset& S = *inc.small;
  std::vector<int> out(large_completion.atom_count, -1);
  for (int t = 0; t < large_completion.atom_count; ++t) {
    // The filter of t restricted to small: {p : t in value(inc(p))}.
    AtomSet candidates = small_completion.full();
    for (int p = 0; p < S.size(); ++p) {
      const bool in_filter = large_completion.dense_map[inc.map[p]] >> t & 1;
      if (in_filter)
        candidates &= small_completion.dense_map[p];
      else
        candidates &= ~small_completion.dense_map[p];
    }
    if (std::popcount(candidates) != 1)
      throw PreconditionError("completion atom does not induce a unique small atom");
    out[t] = std::countr_zero(candidates);
  }
  return out;
}

CompleteEmbedding CompleteEmbedding::from_atom_images(int base_atoms, int target_atoms,
                                                      std::vector<AtomSet> images) {
  if (static_cast<int>(images.size()) != base_atoms)
    throw InputError(ErrorCode::InvalidEmbedding, "one image per base atom required");
  CompleteEmbedding out;
  out.source = share(algebra_poset(base_atoms));
  out.target_atoms = target_atoms;
  out.atom_images = std::move(images);
  for (int e = 0; e < out.source->size(); ++e) out.map.push_back(out.apply_to_element(algebra_poset_value(e)));
  return out;
}

AtomSet CompleteEmbedding::apply_to_element(AtomSet base_element) const {
  AtomSet out = 0;
  for (std::size_t a = 0; a < atom_images.size(); ++a)
    if (base_element >> a & 1) out |= atom_images[a];
  return out;
}

CompleteEmbedding::Check CompleteEmbedding::check(bool require_injective) const {
  Check c;
  const Poset& S = *source;
  const AtomSet full = full_set(target_atoms);
  if (static_cast<int>(map.size()) != S.size()) {
    c.nonzero = false;
    return c;
  }
  for (int p = 0; p < S.size(); ++p)
    if (map[p] == 0 || (map[p] & ~full)) c.nonzero = false;
  if (require_injective) {
    std::vector<AtomSet> sorted = map;
    std::sort(sorted.begin(), sorted.end());
    c.injective = std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
  }
  for (int p = 0; p < S.size(); ++p)
    for (int q = 0; q < S.size(); ++q) {
      if (S.leq(p, q) && (map[q] & ~map[p])) c.order_preserving = false;
      if (!S.compatible(p, q) && (map[p] & map[q])) c.incompatibility_preserving = false;
    }
  for (int t = 0; t < target_atoms; ++t) {
    bool reduced = false;
    for (int p = 0; p < S.size() && !reduced; ++p) {
      bool all = true;
      const Bits& u = S.up(p);
      for (std::size_t r = u.find_first(); r != Bits::npos && all; r = u.find_next(r))
        all = map[r] >> t & 1;
      reduced = all;
    }
    if (!reduced) c.complete = false;
  }
  return c;
}

void CompleteEmbedding::validate(bool require_injective) const {
  const Check c = check(require_injective);
  if (!c.ok()) {
    std::string why;
    if (!c.nonzero) why += " zero-or-foreign-image";
    if (!c.injective) why += " not-injective";
    if (!c.order_preserving) why += " order";
    if (!c.incompatibility_preserving) why += " incompatibility";
    if (!c.complete) why += " not-complete";
    throw InputError(ErrorCode::InvalidEmbedding, "not a complete embedding:" + why);
  }
}

}  // namespace forcelab
