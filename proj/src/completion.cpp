#include "forcelab/completion.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>

namespace forcelab {

Bits regularize(const Poset& poset, const Bits& open_set) {
  const int n = poset.size();
  // meets[y]: some extension of y lies in U
  Bits meets(n);
  for (int y = 0; y < n; ++y)
    if (poset.up(y).intersects(open_set)) meets.set(y);
  Bits out(n);
  for (int x = 0; x < n; ++x)
    if (poset.up(x).is_subset_of(meets)) out.set(x);
  return out;
}

namespace {

// Atoms of a finite poset's completion are the regularized cones of its
// maximal elements; the value of p is the set of maximal elements above p.
CompleteAlgebra completion_from_maximal(const PosetRef& poset) {
  const Poset& P = *poset;
  const Bits maximal = P.maximal_elements();
  if (maximal.count() > static_cast<std::size_t>(kMaxAtoms))
    throw InputError(ErrorCode::CapExceeded,
                     "completion has " + std::to_string(maximal.count()) + " atoms (limit 64)");
  std::vector<int> index(P.size(), -1);
  int next = 0;
  for (std::size_t m = maximal.find_first(); m != Bits::npos; m = maximal.find_next(m)) index[m] = next++;
  CompleteAlgebra out;
  out.atom_count = next;
  out.source = poset;
  out.dense_map.assign(P.size(), 0);
  for (int p = 0; p < P.size(); ++p) {
    const Bits above = P.up(p) & maximal;
    for (std::size_t m = above.find_first(); m != Bits::npos; m = above.find_next(m))
      out.dense_map[p] |= AtomSet{1} << index[m];
  }
  return out;
}

}  // namespace

CompleteAlgebra regular_open_completion(const PosetRef& poset) {
  if (poset->size() > kRegularizationSizeCap) return completion_from_maximal(poset);
  return completion_by_regularization(poset);
}

CompleteAlgebra completion_by_regularization(const PosetRef& poset) {
  const Poset& P = *poset;
  const int n = P.size();
  std::vector<Bits> values(n);
  for (int p = 0; p < n; ++p) values[p] = regularize(P, P.up(p));

  std::vector<Bits> distinct = values;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<Bits> atoms;
  for (const Bits& v : distinct) {
    bool minimal = true;
    for (const Bits& w : distinct)
      if (w != v && w.is_subset_of(v)) {
        minimal = false;
        break;
      }
    if (minimal) atoms.push_back(v);
  }
  if (static_cast<int>(atoms.size()) > kMaxAtoms)
    throw InputError(ErrorCode::CapExceeded,
                     "completion has " + std::to_string(atoms.size()) + " atoms (limit 64)");

  const Bits maximal = P.maximal_elements();
  auto key = [&](const Bits& a) { return (a & maximal).find_first(); };
  std::sort(atoms.begin(), atoms.end(), [&](const Bits& a, const Bits& b) { return key(a) < key(b); });

  CompleteAlgebra out;
  out.atom_count = static_cast<int>(atoms.size());
  out.source = poset;
  out.dense_map.assign(n, 0);
  for (int p = 0; p < n; ++p)
    for (std::size_t a = 0; a < atoms.size(); ++a)
      if (atoms[a].is_subset_of(values[p])) out.dense_map[p] |= AtomSet{1} << a;
  return out;
}

CompleteAlgebra regular_open_completion(const Poset& poset) { return regular_open_completion(share(poset)); }

Poset algebra_poset(int atoms) {
  if (atoms < 1 || atoms > kSubalgebraAtomCap)
    throw InputError(ErrorCode::CapExceeded, "algebra poset needs 1.." + std::to_string(kSubalgebraAtomCap) +
                                                 " atoms, got " + std::to_string(atoms));
  const int n = static_cast<int>(full_set(atoms));
  const AtomSet full = full_set(atoms);
  std::vector<std::string> labels;
  for (int i = 0; i < n; ++i) {
    const AtomSet v = algebra_poset_value(i);
    if (v == full) {
      labels.push_back("1");
      continue;
    }
    std::string s;
    for (int a = 0; a < atoms; ++a)
      if (v >> a & 1) s += "a" + std::to_string(a);
    labels.push_back(s);
  }
  return Poset::from_predicate(
      std::move(labels),
      [](int p, int q) {
        const AtomSet vp = algebra_poset_value(p), vq = algebra_poset_value(q);
        return (vq & ~vp) == 0;
      },
      algebra_poset_element(full));
}

std::optional<std::vector<int>> matching_atom_bijection(const std::vector<AtomSet>& lhs_values,
                                                        const std::vector<AtomSet>& rhs_values, int lhs_atoms,
                                                        int rhs_atoms) {
  if (lhs_atoms != rhs_atoms || lhs_values.size() != rhs_values.size()) return std::nullopt;
  // Each atom is characterised by the set of value indices containing it.
  auto signatures = [](const std::vector<AtomSet>& values, int atoms) {
    std::vector<std::vector<bool>> sig(atoms, std::vector<bool>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i)
      for (int a = 0; a < atoms; ++a) sig[a][i] = values[i] >> a & 1;
    return sig;
  };
  const auto ls = signatures(lhs_values, lhs_atoms);
  const auto rs = signatures(rhs_values, rhs_atoms);
  std::vector<int> map(lhs_atoms, -1);
  std::vector<bool> used(rhs_atoms, false);
  for (int a = 0; a < lhs_atoms; ++a) {
    for (int b = 0; b < rhs_atoms; ++b)
      if (!used[b] && ls[a] == rs[b]) {
        map[a] = b;
        used[b] = true;
        break;
      }
    if (map[a] < 0) return std::nullopt;
  }
  // Equal signatures make the map carry each value onto its partner exactly.
  return map;
}

Subalgebra::Subalgebra(int parent_atoms, std::vector<AtomSet> blocks)
    : parent_atoms_(parent_atoms), blocks_(std::move(blocks)) {
  if (parent_atoms < 1 || parent_atoms > kMaxAtoms)
    throw InputError(ErrorCode::CapExceeded, "subalgebra parent atom count out of range");
  AtomSet seen = 0;
  for (AtomSet b : blocks_) {
    if (b == 0) throw InputError(ErrorCode::NotSubalgebra, "empty block");
    if (b & seen) throw InputError(ErrorCode::NotSubalgebra, "overlapping blocks");
    seen |= b;
  }
  if (seen != full_set(parent_atoms))
    throw InputError(ErrorCode::NotSubalgebra, "blocks do not cover the parent atoms");
  std::sort(blocks_.begin(), blocks_.end(),
            [](AtomSet a, AtomSet b) { return std::countr_zero(a) < std::countr_zero(b); });
}

Subalgebra Subalgebra::trivial(int parent_atoms) { return Subalgebra(parent_atoms, {full_set(parent_atoms)}); }

Subalgebra Subalgebra::whole(int parent_atoms) {
  std::vector<AtomSet> blocks;
  for (int a = 0; a < parent_atoms; ++a) blocks.push_back(AtomSet{1} << a);
  return Subalgebra(parent_atoms, std::move(blocks));
}

bool Subalgebra::contains(AtomSet element) const {
  if (element & ~full_set(parent_atoms_)) return false;
  for (AtomSet b : blocks_) {
    const AtomSet m = b & element;
    if (m != 0 && m != b) return false;
  }
  return true;
}

std::vector<AtomSet> Subalgebra::members() const {
  if (block_count() > kSubalgebraAtomCap)
    throw InputError(ErrorCode::CapExceeded, "too many blocks to list members");
  std::vector<AtomSet> out;
  const AtomSet n = AtomSet{1} << block_count();
  out.reserve(n);
  for (AtomSet s = 0; s < n; ++s) out.push_back(lift(s));
  std::sort(out.begin(), out.end());
  return out;
}

AtomSet Subalgebra::lower(AtomSet member) const {
  if (!contains(member)) throw InputError(ErrorCode::Membership, "not a member of the subalgebra");
  AtomSet out = 0;
  for (int i = 0; i < block_count(); ++i)
    if (blocks_[i] & member) out |= AtomSet{1} << i;
  return out;
}

AtomSet Subalgebra::lift(AtomSet over_blocks) const {
  AtomSet out = 0;
  for (int i = 0; i < block_count(); ++i)
    if (over_blocks >> i & 1) out |= blocks_[i];
  return out;
}

int Subalgebra::block_of_atom(int atom) const {
  for (int i = 0; i < block_count(); ++i)
    if (blocks_[i] >> atom & 1) return i;
  throw InputError(ErrorCode::UnknownElement, "atom outside the parent algebra");
}

CompleteAlgebra Subalgebra::as_algebra() const {
  CompleteAlgebra out;
  out.atom_count = block_count();
  return out;
}

bool Subalgebra::is_subalgebra_of(const Subalgebra& other) const {
  if (parent_atoms_ != other.parent_atoms_) return false;
  for (AtomSet b : blocks_)
    if (!other.contains(b)) return false;
  return true;
}

Subalgebra generated_subalgebra(int parent_atoms, const std::vector<AtomSet>& seeds) {
  const AtomSet full = full_set(parent_atoms);
  for (AtomSet s : seeds)
    if (s & ~full) throw InputError(ErrorCode::Membership, "seed is not an element of the algebra");
  // Atoms with equal membership signatures across the seeds share a block.
  std::map<std::vector<bool>, AtomSet> classes;
  for (int a = 0; a < parent_atoms; ++a) {
    std::vector<bool> sig;
    sig.reserve(seeds.size());
    for (AtomSet s : seeds) sig.push_back(s >> a & 1);
    classes[sig] |= AtomSet{1} << a;
  }
  std::vector<AtomSet> blocks;
  for (const auto& [sig, block] : classes) blocks.push_back(block);
  return Subalgebra(parent_atoms, std::move(blocks));
}

Subalgebra generated_subalgebra(const CompleteAlgebra& algebra, const std::vector<AtomSet>& seeds) {
  return generated_subalgebra(algebra.atom_count, seeds);
}

Subalgebra intersect_subalgebras(const Subalgebra& lhs, const Subalgebra& rhs) {
  if (lhs.parent_atoms() != rhs.parent_atoms())
    throw InputError(ErrorCode::ParentMismatch, "subalgebras of different algebras");
  // Join of the two block partitions: merge blocks that overlap, transitively.
  std::vector<int> parent(lhs.parent_atoms());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (const Subalgebra* s : {&lhs, &rhs})
    for (AtomSet b : s->blocks()) {
      const int first = std::countr_zero(b);
      for (int a = 0; a < lhs.parent_atoms(); ++a)
        if (b >> a & 1) parent[find(a)] = find(first);
    }
  std::map<int, AtomSet> blocks;
  for (int a = 0; a < lhs.parent_atoms(); ++a) blocks[find(a)] |= AtomSet{1} << a;
  std::vector<AtomSet> out;
  for (const auto& [root, block] : blocks) out.push_back(block);
  return Subalgebra(lhs.parent_atoms(), std::move(out));
}

namespace {

// Restricted-growth strings over `items` elements.
void partitions_of(int items, const std::function<void(const std::vector<int>&)>& emit) {
  std::vector<int> rgs(items, 0);
  std::function<void(int, int)> rec = [&](int i, int max_label) {
    if (i == items) {
      emit(rgs);
      return;
    }
    for (int l = 0; l <= max_label + 1; ++l) {
      rgs[i] = l;
      rec(i + 1, std::max(max_label, l));
    }
  };
  if (items == 0) {
    emit(rgs);
    return;
  }
  rgs[0] = 0;
  rec(1, 0);
}

}  // namespace

std::vector<Subalgebra> all_subalgebras(int parent_atoms) {
  if (parent_atoms > 10) throw InputError(ErrorCode::CapExceeded, "subalgebra enumeration capped at 10 atoms");
  std::vector<Subalgebra> out;
  partitions_of(parent_atoms, [&](const std::vector<int>& rgs) {
    std::vector<AtomSet> blocks(*std::max_element(rgs.begin(), rgs.end()) + 1, 0);
    for (int a = 0; a < parent_atoms; ++a) blocks[rgs[a]] |= AtomSet{1} << a;
    out.emplace_back(parent_atoms, std::move(blocks));
  });
  return out;
}

std::vector<Subalgebra> subalgebras_of(const Subalgebra& outer) {
  std::vector<Subalgebra> out;
  for (const Subalgebra& coarse : all_subalgebras(outer.block_count())) {
    std::vector<AtomSet> blocks;
    for (AtomSet b : coarse.blocks()) blocks.push_back(outer.lift(b));
    out.emplace_back(outer.parent_atoms(), std::move(blocks));
  }
  return out;
}

std::vector<Subalgebra> superalgebras_of(const Subalgebra& inner) {
  // Refine every block independently and take all combinations.
  std::vector<std::vector<std::vector<AtomSet>>> per_block;
  for (AtomSet b : inner.blocks()) {
    std::vector<int> atoms;
    for (int a = 0; a < inner.parent_atoms(); ++a)
      if (b >> a & 1) atoms.push_back(a);
    std::vector<std::vector<AtomSet>> options;
    for (const Subalgebra& local : all_subalgebras(static_cast<int>(atoms.size()))) {
      std::vector<AtomSet> pieces;
      for (AtomSet lb : local.blocks()) {
        AtomSet piece = 0;
        for (std::size_t i = 0; i < atoms.size(); ++i)
          if (lb >> i & 1) piece |= AtomSet{1} << atoms[i];
        pieces.push_back(piece);
      }
      options.push_back(std::move(pieces));
    }
    per_block.push_back(std::move(options));
  }
  std::vector<Subalgebra> out;
  std::vector<AtomSet> current;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == per_block.size()) {
      out.emplace_back(inner.parent_atoms(), current);
      return;
    }
    for (const auto& pieces : per_block[i]) {
      const std::size_t mark = current.size();
      current.insert(current.end(), pieces.begin(), pieces.end());
      rec(i + 1);
      current.resize(mark);
    }
  };
  rec(0);
  return out;
}

bool forces_in_quotient(const Subalgebra& base, AtomSet x, AtomSet y) {
  if (!base.contains(x) || x == 0) throw InputError(ErrorCode::Membership, "forcing condition not in the base");
  for (AtomSet b : base.blocks())
    if ((b & x) == b && (b & y) == 0) return false;
  return true;
}

}  // namespace forcelab
