#include "forcelab/iterate.hpp"

#include <algorithm>

namespace forcelab {

namespace {

int ipow(int base, int exp) {
  long long out = 1;
  for (int i = 0; i < exp; ++i) {
    out *= base;
    if (out > (1 << 24)) throw InputError(ErrorCode::CapExceeded, "Hechler order too large");
  }
  return static_cast<int>(out);
}

void check_params(HechlerParams p) {
  if (p.m < 1) throw InputError(ErrorCode::InvalidParams, "Hechler domain size must be at least 1");
  if (p.h < 0) throw InputError(ErrorCode::InvalidParams, "Hechler value bound must be non-negative");
}

}  // namespace

HechlerCondition hechler_condition(HechlerParams params, int index) {
  check_params(params);
  const int width = ipow(params.h + 1, params.m);
  if (index < 0 || index >= (params.m + 1) * width)
    throw InputError(ErrorCode::UnknownElement, "Hechler index out of range");
  HechlerCondition c;
  c.n = index / width;
  c.f.assign(params.m, 0);
  int rest = index % width;
  for (int k = params.m - 1; k >= 0; --k) {
    c.f[k] = rest % (params.h + 1);
    rest /= params.h + 1;
  }
  return c;
}

int hechler_index(HechlerParams params, const HechlerCondition& c) {
  check_params(params);
  if (c.n < 0 || c.n > params.m || static_cast<int>(c.f.size()) != params.m)
    throw InputError(ErrorCode::UnknownElement, "malformed Hechler condition");
  int value = 0;
  for (int v : c.f) {
    if (v < 0 || v > params.h) throw InputError(ErrorCode::UnknownElement, "Hechler value out of range");
    value = value * (params.h + 1) + v;
  }
  return c.n * ipow(params.h + 1, params.m) + value;
}

std::string hechler_label(HechlerParams params, const HechlerCondition& c) {
  std::string s = std::to_string(c.n) + "/";
  for (int k = 0; k < params.m; ++k) {
    if (params.h > 9 && k > 0) s += "_";
    s += std::to_string(c.f[k]);
  }
  return s;
}

Poset hechler_poset(HechlerParams params) {
  check_params(params);
  const int size = (params.m + 1) * ipow(params.h + 1, params.m);
  if (size > static_cast<int>(kTwoStepConditionCap))
    throw InputError(ErrorCode::CapExceeded, "Hechler order above the condition cap");
  std::vector<HechlerCondition> conds;
  std::vector<std::string> labels;
  for (int i = 0; i < size; ++i) {
    conds.push_back(hechler_condition(params, i));
    labels.push_back(hechler_label(params, conds.back()));
  }
  return Poset::from_predicate(
      std::move(labels),
      [&](int x, int y) {
        const HechlerCondition& a = conds[x];
        const HechlerCondition& b = conds[y];
        if (a.n > b.n) return false;
        for (int k = 0; k < params.m; ++k) {
          if (k < a.n && a.f[k] != b.f[k]) return false;
          if (a.f[k] > b.f[k]) return false;
        }
        return true;
      },
      0);
}

int TwoStep::index_of(int p, const std::vector<int>& name) const {
  std::vector<int> key(name.size(), -1);
  const AtomSet v = base_completion.dense_map.at(p);
  for (std::size_t a = 0; a < name.size(); ++a)
    if (v >> a & 1) key[a] = name[a];
  auto it = lookup.find({p, key});
  return it == lookup.end() ? -1 : it->second;
}

TwoStep two_step(const PosetRef& base, std::vector<PosetRef> fibers, std::size_t cap) {
  CompleteAlgebra c = regular_open_completion(base);
  if (static_cast<int>(fibers.size()) != c.atom_count)
    throw InputError(ErrorCode::InvalidParams, "need one fiber per completion atom (" +
                                                    std::to_string(c.atom_count) + "), got " +
                                                    std::to_string(fibers.size()));
  for (const auto& f : fibers)
    if (!f) throw InputError(ErrorCode::InvalidParams, "missing fiber");
  const Poset& P = *base;
  const int k = c.atom_count;

  std::vector<int> base_of;
  std::vector<std::vector<int>> names;
  std::vector<std::string> labels;
  for (int p = 0; p < P.size(); ++p) {
    std::vector<int> atoms;
    for (int a = 0; a < k; ++a)
      if (c.dense_map[p] >> a & 1) atoms.push_back(a);
    std::vector<int> name(k, -1);
    for (int a : atoms) name[a] = 0;
    // odometer over the fibers of the atoms below p, first atom most significant
    for (;;) {
      if (names.size() >= cap)
        throw InputError(ErrorCode::CapExceeded, "two-step iteration above " + std::to_string(cap) + " conditions");
      base_of.push_back(p);
      names.push_back(name);
      std::string label = "(" + P.label(p) + "|";
      for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (i) label += ".";
        label += fibers[atoms[i]]->label(name[atoms[i]]);
      }
      labels.push_back(label + ")");
      int i = static_cast<int>(atoms.size()) - 1;
      while (i >= 0 && ++name[atoms[i]] == fibers[atoms[i]]->size()) name[atoms[i--]] = 0;
      if (i < 0) break;
    }
  }

  TwoStep out{base, c, std::move(fibers), nullptr, std::move(base_of), std::move(names),
              PosetInclusion::identity(share(posets::trivial())), {}};
  for (std::size_t x = 0; x < out.names.size(); ++x) out.lookup[{out.base_of[x], out.names[x]}] = static_cast<int>(x);

  std::vector<int> bottom_name(k);
  for (int a = 0; a < k; ++a) bottom_name[a] = out.fibers[a]->bottom();
  const int bottom = out.index_of(P.bottom(), bottom_name);

  const auto& bo = out.base_of;
  const auto& nm = out.names;
  const auto& fb = out.fibers;
  out.poset = share(Poset::from_predicate(
      std::move(labels),
      [&](int x, int y) {
        if (!P.leq(bo[x], bo[y])) return false;
        const AtomSet v = c.dense_map[bo[y]];
        for (int a = 0; a < k; ++a)
          if ((v >> a & 1) && !fb[a]->leq(nm[x][a], nm[y][a])) return false;
        return true;
      },
      bottom));

  std::vector<int> emb(P.size());
  for (int p = 0; p < P.size(); ++p) emb[p] = out.index_of(p, bottom_name);
  out.embedding = PosetInclusion(base, out.poset, std::move(emb));
  return out;
}

TwoStep compose_hechler(const PosetRef& base, HechlerParams params, std::size_t cap) {
  const auto d = share(hechler_poset(params));
  const int k = regular_open_completion(base).atom_count;
  TwoStep out = two_step(base, std::vector<PosetRef>(k, d), cap);
  if (!is_complete_suborder_via_reductions(out.embedding))
    throw std::logic_error("ground poset is not a complete suborder of its Hechler extension");
  return out;
}

TwoStepEquivalence two_step_equivalence_report(const PosetInclusion& incl) {
  if (!is_complete_suborder_via_reductions(incl))
    throw PreconditionError("two-step equivalence needs a complete suborder");
  const QuotientName name(incl);
  const int k = name.base_completion.atom_count;
  std::vector<PosetRef> fibers;
  std::vector<std::vector<int>> members(k);
  for (int a = 0; a < k; ++a) fibers.push_back(share(quotient_at_atom(name, a, &members[a])));
  const TwoStep ts = two_step(incl.small, fibers);
  const Poset& Q = *incl.large;
  const CompleteAlgebra cq = regular_open_completion(incl.large);
  const CompleteAlgebra ct = regular_open_completion(ts.poset);

  TwoStepEquivalence rep;
  rep.quotient_atoms = cq.atom_count;
  rep.two_step_atoms = ct.atom_count;
  if (rep.quotient_atoms != rep.two_step_atoms) return rep;

  // Maximal element of P carrying each atom of BA(P).
  std::vector<int> maximal_of_atom(k, -1);
  for (int p = 0; p < incl.small->size(); ++p) {
    const AtomSet v = name.base_completion.dense_map[p];
    if (std::popcount(v) == 1 && incl.small->maximal_elements().test(p)) maximal_of_atom[std::countr_zero(v)] = p;
  }

  // Position of q inside the fiber of atom a, or -1.
  auto fiber_pos = [&](int a, int q) {
    auto it = std::lower_bound(members[a].begin(), members[a].end(), q);
    return (it != members[a].end() && *it == q) ? static_cast<int>(it - members[a].begin()) : -1;
  };

  // sigma: atom of BA(Q) (a maximal q) -> atom of BA(P * (Q : P)).
  std::vector<int> sigma(cq.atom_count, -1);
  rep.atoms_partitioned = true;
  for (int q = 0; q < Q.size(); ++q) {
    if (std::popcount(cq.dense_map[q]) != 1 || !Q.maximal_elements().test(q)) continue;
    const int t = std::countr_zero(cq.dense_map[q]);
    int owner = -1;
    for (int a = 0; a < k; ++a)
      if (fiber_pos(a, q) >= 0) owner = owner < 0 ? a : -2;
    if (owner < 0 || maximal_of_atom[owner] < 0) {
      rep.atoms_partitioned = false;
      return rep;
    }
    std::vector<int> nm(k, -1);
    nm[owner] = fiber_pos(owner, q);
    const int x = ts.index_of(maximal_of_atom[owner], nm);
    if (x < 0 || std::popcount(ct.dense_map[x]) != 1) {
      rep.atoms_partitioned = false;
      return rep;
    }
    sigma[t] = std::countr_zero(ct.dense_map[x]);
  }
  std::vector<int> sorted = sigma;
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() < 0 || std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    rep.atoms_partitioned = false;
    return rep;
  }

  auto through_sigma = [&](AtomSet v) {
    AtomSet out = 0;
    for (int t = 0; t < cq.atom_count; ++t)
      if (v >> t & 1) out |= AtomSet{1} << sigma[t];
    return out;
  };

  // For every p forcing q into the quotient, (p, q) is a condition of the
  // iteration whose value is the meet of the values of p and q in BA(Q);
  // these meets cover the value of q.
  rep.values_match = true;
  for (int q = 0; q < Q.size() && rep.values_match; ++q) {
    AtomSet covered = 0;
    for (int p = 0; p < incl.small->size() && rep.values_match; ++p) {
      if (!name.forces_by_atoms(p, q)) continue;
      std::vector<int> nm(k, -1);
      for (int a = 0; a < k; ++a)
        if (name.base_completion.dense_map[p] >> a & 1) nm[a] = fiber_pos(a, q);
      const int x = ts.index_of(p, nm);
      const AtomSet expected = through_sigma(cq.dense_map[incl.map[p]] & cq.dense_map[q]);
      if (x < 0 || ct.dense_map[x] != expected) rep.values_match = false;
      covered |= expected;
    }
    if (covered != through_sigma(cq.dense_map[q])) rep.values_match = false;
  }
  for (int p = 0; p < incl.small->size() && rep.values_match; ++p)
    if (ct.dense_map[ts.embedding.map[p]] != through_sigma(cq.dense_map[incl.map[p]])) rep.values_match = false;
  return rep;
}

bool two_step_equivalence(const PosetInclusion& incl) { return two_step_equivalence_report(incl).holds(); }

}  // namespace forcelab
