#include "forcelab/tower.hpp"

#include <algorithm>

namespace forcelab {

namespace {

bool same_poset(const PosetRef& a, const PosetRef& b) { return a.get() == b.get() || *a == *b; }

CompleteAlgebra algebra(int atoms) {
  CompleteAlgebra a;
  a.atom_count = atoms;
  return a;
}

CompleteEmbedding trivial_into(int atoms) { return CompleteEmbedding::from_atom_images(1, atoms, {full_set(atoms)}); }

void check_witness(const TowerLeqWitness& c, int length) {
  if (c.C.empty()) throw InputError(ErrorCode::InvalidWitness, "empty index set");
  for (int i : c.C)
    if (i < 0 || i >= length)
      throw InputError(ErrorCode::InvalidWitness, "index " + std::to_string(i) + " outside the tower");
  if (!c.contains(length - 1)) throw InputError(ErrorCode::InvalidWitness, "index set must contain the top index");
}

std::vector<PosetInclusion> cross_by_labels(const Tower& t1, const Tower& t2) {
  std::vector<PosetInclusion> out;
  for (int i = 0; i < t1.length(); ++i) out.push_back(PosetInclusion::by_labels(t1.poset(i), t2.poset(i)));
  return out;
}

}  // namespace

Tower::Tower(std::vector<SweetModel> levels, std::vector<PosetInclusion> links)
    : levels_(std::move(levels)), links_(std::move(links)) {
  if (levels_.empty()) throw InputError(ErrorCode::InvalidTower, "a tower needs at least one level");
  if (links_.empty()) {
    for (int i = 0; i + 1 < length(); ++i) {
      try {
        links_.push_back(PosetInclusion::by_labels(poset(i), poset(i + 1)));
      } catch (const InputError& e) {
        throw InputError(ErrorCode::InvalidTower,
                         "level " + std::to_string(i) + " does not embed in level " + std::to_string(i + 1) + ": " +
                             e.what());
      }
    }
  }
  if (static_cast<int>(links_.size()) != length() - 1)
    throw InputError(ErrorCode::InvalidTower, "need one link between each pair of consecutive levels");
  for (int i = 0; i + 1 < length(); ++i)
    if (!same_poset(links_[i].small, poset(i)) || !same_poset(links_[i].large, poset(i + 1)))
      throw InputError(ErrorCode::InvalidTower, "link " + std::to_string(i) + " does not join its levels");
}

PosetInclusion Tower::into(int i, int j) const {
  if (i < 0 || j >= length() || i > j) throw InputError(ErrorCode::InvalidTower, "bad level range");
  PosetInclusion out = PosetInclusion::identity(poset(i));
  for (int k = i; k < j; ++k) out = out.then(links_[k]);
  return out;
}

SweetReport validate_tower(const Tower& t) {
  SweetReport rep;
  rep.checked = {"level-sweet", "complete-suborder"};
  for (int i = 0; i < t.length(); ++i) {
    const SweetReport s = validate_sweet(t.model(i));
    if (!s.holds()) {
      ClauseFailure f = s.failures.front();
      f.detail = f.clause;
      f.clause = "level-sweet";
      f.level = i;
      rep.failures.push_back(std::move(f));
    }
  }
  for (int i = 0; i < t.length(); ++i)
    for (int j = i + 1; j < t.length(); ++j)
      if (!is_complete_suborder_via_reductions(t.into(i, j)))
        rep.failures.push_back({"complete-suborder", {i, j}, -1, "level is not a complete suborder", i});
  return rep;
}

TowerLeqWitness TowerLeqWitness::all(int length) { return from(0, length); }

TowerLeqWitness TowerLeqWitness::from(int first, int length) {
  TowerLeqWitness w;
  for (int i = std::max(first, 0); i < length; ++i) w.C.push_back(i);
  return w;
}

bool TowerLeqWitness::contains(int i) const { return std::find(C.begin(), C.end(), i) != C.end(); }

int round_up(const TowerLeqWitness& c, int i, int length) {
  int best = length - 1;
  for (int x : c.C)
    if (x >= i && x < best) best = x;
  return best;
}

TowerLeqReport tower_leq(const Tower& t1, const Tower& t2, const TowerLeqWitness& c,
                         const std::vector<PosetInclusion>& cross_in) {
  if (t1.length() != t2.length())
    throw InputError(ErrorCode::IndexMismatch, "towers of lengths " + std::to_string(t1.length()) + " and " +
                                                   std::to_string(t2.length()));
  const int L = t1.length();
  check_witness(c, L);
  const std::vector<PosetInclusion> cross = cross_in.empty() ? cross_by_labels(t1, t2) : cross_in;
  if (static_cast<int>(cross.size()) != L) throw InputError(ErrorCode::IndexMismatch, "need one cross map per level");
  for (int i = 0; i < L; ++i)
    if (!same_poset(cross[i].small, t1.poset(i)) || !same_poset(cross[i].large, t2.poset(i)))
      throw InputError(ErrorCode::IndexMismatch, "cross map " + std::to_string(i) + " does not join the levels");

  TowerLeqReport out;
  SweetReport& rep = out.report;
  rep.checked = {"top-complete-suborder", "extends", "quotient-forcing"};
  const int top = L - 1;
  if (!is_complete_suborder_via_reductions(cross[top]))
    rep.failures.push_back({"top-complete-suborder", {}, -1, "top of the first tower is not a complete suborder", top});

  std::vector<int> levels = c.C;
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  for (int i : levels) {
    const SweetReport ext = validate_extends(t1.model(i), t2.model(i), cross[i]);
    for (ClauseFailure f : ext.failures) {
      f.detail = f.clause;
      f.clause = "extends";
      f.level = i;
      rep.failures.push_back(std::move(f));
    }
  }

  for (int i : levels) {
    const PosetInclusion inc1 = t1.into(i, top);
    const PosetInclusion inc2 = t2.into(i, top);
    if (!is_complete_suborder_via_reductions(inc1) || !is_complete_suborder_via_reductions(inc2))
      throw InputError(ErrorCode::InvalidTower, "level " + std::to_string(i) + " is not a complete suborder of its top");
    const QuotientOracle o1(inc1), o2(inc2);
    const QuotientName n1(inc1), n2(inc2);
    const Poset& P1 = *t1.poset(i);
    const Poset& Top1 = *t1.top();
    bool failed = false;
    for (int q = 0; q < Top1.size(); ++q)
      for (int p = 0; p < P1.size(); ++p) {
        const bool r1 = o1.forces(p, q);
        const bool a1 = n1.forces_by_atoms(p, q);
        if (r1 != a1) out.divergences.push_back({1, i, p, q, r1, a1});
        if (!r1 && !a1) continue;
        const int p2 = cross[i].map[p], q2 = cross[top].map[q];
        const bool r2 = o2.forces(p2, q2);
        const bool a2 = n2.forces_by_atoms(p2, q2);
        if (r2 != a2) out.divergences.push_back({2, i, p, q, r2, a2});
        if (r1 && !r2 && !failed) {
          rep.failures.push_back({"quotient-forcing", {p, q}, -1, "forced below, not forced above", i});
          failed = true;
        }
      }
  }
  return out;
}

bool MergedTower::holds() const {
  if (!invariants.holds()) return false;
  for (const auto& l : limits)
    if (!l.holds()) return false;
  for (const auto& c : checks)
    if (!c.holds()) return false;
  return true;
}

MergedTower tower_chain_merge(const std::vector<Tower>& towers, const std::vector<TowerLeqWitness>& witnesses) {
  if (towers.empty()) throw InputError(ErrorCode::ChainPrecondition, "empty chain of towers");
  if (witnesses.size() + 1 != towers.size())
    throw InputError(ErrorCode::InvalidWitness, "need one witness between each pair of consecutive towers");
  const int L = towers.front().length();
  for (const auto& t : towers)
    if (t.length() != L) throw InputError(ErrorCode::IndexMismatch, "towers of different lengths");
  for (std::size_t k = 0; k < witnesses.size(); ++k) {
    const TowerLeqReport r = tower_leq(towers[k], towers[k + 1], witnesses[k]);
    if (!r.holds())
      throw InputError(ErrorCode::ChainPrecondition, "tower " + std::to_string(k) + " is not below tower " +
                                                         std::to_string(k + 1) + " (" + r.report.failures[0].clause +
                                                         ")");
  }
  TowerLeqWitness C = TowerLeqWitness::all(L);
  for (const auto& w : witnesses) {
    TowerLeqWitness next;
    for (int i : C.C)
      if (w.contains(i)) next.C.push_back(i);
    C = std::move(next);
  }
  if (C.C.empty()) throw InputError(ErrorCode::InvalidWitness, "the witnesses share no index");

  const Tower& last = towers.back();
  std::vector<ConstructedModel> limits;
  std::vector<SweetModel> models;
  std::vector<int> rounded;
  for (int i = 0; i < L; ++i) {
    const int r = round_up(C, i, L);
    rounded.push_back(r);
    std::vector<SweetModel> chain;
    for (const auto& t : towers) chain.push_back(t.model(r));
    limits.push_back(chain_limit(chain));
    models.push_back(limits.back().model);
  }
  std::vector<PosetInclusion> links;
  for (int i = 0; i + 1 < L; ++i) links.push_back(last.into(rounded[i], rounded[i + 1]));
  Tower merged(std::move(models), std::move(links));

  MergedTower out{merged, C, std::move(limits), validate_tower(merged), {}};
  for (const auto& t : towers) {
    std::vector<PosetInclusion> cross;
    for (int i = 0; i < L; ++i)
      cross.push_back(t.into(i, rounded[i]).then(PosetInclusion::by_labels(t.poset(rounded[i]), last.poset(rounded[i]))));
    out.checks.push_back(tower_leq(t, merged, C, cross));
  }
  return out;
}

bool HechlerTower::holds() const {
  if (!invariants.holds() || !leq.holds()) return false;
  for (const auto& m : models)
    if (!m.holds()) return false;
  return true;
}

HechlerTower tower_hechler(const Tower& tower, HechlerParams params) {
  const int L = tower.length();
  std::vector<TwoStep> levels;
  std::vector<ConstructedModel> built;
  std::vector<SweetModel> models;
  std::vector<PosetInclusion> cross;
  for (int i = 0; i < L; ++i) {
    levels.push_back(compose_hechler(tower.poset(i), params));
    built.push_back(hechler_sweet(tower.model(i), levels.back()));
    models.push_back(built.back().model);
    cross.push_back(levels.back().embedding);
  }
  std::vector<PosetInclusion> links;
  for (int i = 0; i + 1 < L; ++i) {
    const TwoStep& lo = levels[i];
    const TwoStep& hi = levels[i + 1];
    const PosetInclusion& link = tower.links()[i];
    const std::vector<int> proj = atom_projection(link, lo.base_completion, hi.base_completion);
    const int k = hi.base_completion.atom_count;
    std::vector<int> map(lo.poset->size());
    for (int x = 0; x < lo.poset->size(); ++x) {
      const int p = link.map[lo.base_of[x]];
      const AtomSet v = hi.base_completion.dense_map[p];
      std::vector<int> name(k, -1);
      for (int b = 0; b < k; ++b)
        if (v >> b & 1) {
          name[b] = lo.names[x][proj[b]];
          if (name[b] < 0)
            throw InputError(ErrorCode::InvalidTower, "level " + std::to_string(i) + " name is undefined above");
        }
      map[x] = hi.index_of(p, name);
      if (map[x] < 0) throw InputError(ErrorCode::InvalidTower, "level " + std::to_string(i) + " name does not lift");
    }
    links.emplace_back(lo.poset, hi.poset, std::move(map));
  }
  Tower result(std::move(models), std::move(links));
  SweetReport inv = validate_tower(result);
  TowerLeqReport leq = tower_leq(tower, result, TowerLeqWitness::all(L), cross);
  return HechlerTower{std::move(result), std::move(levels), std::move(built), std::move(cross), std::move(inv),
                      std::move(leq)};
}

std::vector<AtomSet> level_blocks(const Tower& tower, int i) {
  const CompleteAlgebra lc = regular_open_completion(tower.poset(i));
  const CompleteAlgebra tc = regular_open_completion(tower.top());
  const std::vector<int> proj = atom_projection(tower.into(i, tower.top_index()), lc, tc);
  std::vector<AtomSet> blocks(lc.atom_count, 0);
  for (int t = 0; t < tc.atom_count; ++t) blocks[proj[t]] |= AtomSet{1} << t;
  return blocks;
}

Subalgebra level_subalgebra(const Tower& tower, int i) {
  return Subalgebra(regular_open_completion(tower.top()).atom_count, level_blocks(tower, i));
}

bool AmalgamTower::holds() const {
  if (!invariants.holds() || !left_leq.holds() || !right_leq.holds()) return false;
  for (const auto& m : models)
    if (!m.holds()) return false;
  return true;
}

AmalgamTower tower_amalgamate(const Tower& t1, const Tower& t3, const PartialIso& f, int i0) {
  if (t1.length() != t3.length()) throw InputError(ErrorCode::IndexMismatch, "towers of different lengths");
  const int L = t1.length();
  if (i0 < 0 || i0 >= L) throw InputError(ErrorCode::InvalidWitness, "i0 outside the towers");
  const int top1 = regular_open_completion(t1.top()).atom_count;
  const int top3 = regular_open_completion(t3.top()).atom_count;
  if (f.dom.parent_atoms() != top1 || f.rng.parent_atoms() != top3)
    throw InputError(ErrorCode::InvalidParams, "isomorphism does not live on the tops' completions");

  std::vector<std::vector<AtomSet>> blocks1(L), blocks3(L);
  std::vector<Subalgebra> base(L, Subalgebra::trivial(top1));
  for (int i = i0; i < L; ++i) {
    blocks1[i] = level_blocks(t1, i);
    blocks3[i] = level_blocks(t3, i);
    base[i] = intersect_subalgebras(f.dom, Subalgebra(top1, blocks1[i]));
    std::vector<AtomSet> image;
    for (AtomSet b : base[i].blocks()) image.push_back(f.apply(b));
    if (!(Subalgebra(top3, image) == intersect_subalgebras(f.rng, Subalgebra(top3, blocks3[i]))))
      throw InputError(ErrorCode::HypothesisViolation,
                       "isomorphism does not match the level subalgebras at index " + std::to_string(i));
  }

  auto level_image = [](const std::vector<AtomSet>& level, AtomSet top_element) {
    AtomSet out = 0;
    for (std::size_t a = 0; a < level.size(); ++a)
      if ((level[a] & ~top_element) == 0) out |= AtomSet{1} << a;
    return out;
  };
  std::vector<AmalgamInstance> instances;
  std::vector<ConstructedModel> built;
  for (int i = i0; i < L; ++i) {
    const auto& blocks = base[i].blocks();
    std::vector<AtomSet> f1, f2;
    for (AtomSet b : blocks) {
      f1.push_back(level_image(blocks1[i], b));
      f2.push_back(level_image(blocks3[i], f.apply(b)));
    }
    const int k = static_cast<int>(blocks.size());
    instances.push_back(amalgamate_posets(
        algebra(k), t1.poset(i), t3.poset(i),
        CompleteEmbedding::from_atom_images(k, static_cast<int>(blocks1[i].size()), std::move(f1)),
        CompleteEmbedding::from_atom_images(k, static_cast<int>(blocks3[i].size()), std::move(f2))));
    built.push_back(amalgam_sweet(t1.model(i), t3.model(i), instances.back()));
  }
  // levels below i0 repeat level i0
  std::vector<AmalgamInstance> levels;
  std::vector<ConstructedModel> models_built;
  std::vector<SweetModel> models;
  for (int i = 0; i < L; ++i) {
    const int j = std::max(i, i0) - i0;
    levels.push_back(instances[j]);
    models_built.push_back(built[j]);
    models.push_back(built[j].model);
  }
  std::vector<PosetInclusion> links;
  for (int i = 0; i + 1 < L; ++i) {
    if (i + 1 <= i0) {
      links.push_back(PosetInclusion::identity(levels[i].amalgam));
      continue;
    }
    const AmalgamInstance& lo = levels[i];
    const AmalgamInstance& hi = levels[i + 1];
    std::vector<int> map;
    for (const auto& [l, r] : lo.pairs) {
      const int x = hi.index_of(t1.links()[i].map[l], t3.links()[i].map[r]);
      if (x < 0) throw InputError(ErrorCode::InvalidTower, "level " + std::to_string(i) + " pairs do not lift");
      map.push_back(x);
    }
    links.emplace_back(lo.amalgam, hi.amalgam, std::move(map));
  }
  Tower result(std::move(models), std::move(links));
  std::vector<PosetInclusion> left_cross, right_cross;
  for (int i = 0; i < L; ++i) {
    const int j = std::max(i, i0);
    left_cross.push_back(t1.into(i, j).then(levels[j].inj_left));
    right_cross.push_back(t3.into(i, j).then(levels[j].inj_right));
  }
  const TowerLeqWitness w = TowerLeqWitness::from(i0, L);
  SweetReport inv = validate_tower(result);
  TowerLeqReport lleq = tower_leq(t1, result, w, left_cross);
  TowerLeqReport rleq = tower_leq(t3, result, w, right_cross);
  return AmalgamTower{std::move(result), std::move(levels), std::move(models_built), w, std::move(left_cross),
                      std::move(right_cross), std::move(inv), std::move(lleq), std::move(rleq)};
}

ExtendedTower product_tower(const Tower& tower, const SweetModel& factor, int from) {
  const int L = tower.length();
  if (from < 0 || from >= L) throw InputError(ErrorCode::InvalidParams, "first product level outside the tower");
  const int rk = regular_open_completion(factor.poset()).atom_count;
  std::vector<AmalgamInstance> inst;
  std::vector<ConstructedModel> built;
  std::vector<SweetModel> models;
  std::vector<PosetInclusion> cross;
  for (int i = 0; i < L; ++i) {
    if (i < from) {
      models.push_back(tower.model(i));
      cross.push_back(PosetInclusion::identity(tower.poset(i)));
      continue;
    }
    const int k = regular_open_completion(tower.poset(i)).atom_count;
    inst.push_back(amalgamate_posets(algebra(1), tower.poset(i), factor.poset(), trivial_into(k), trivial_into(rk)));
    built.push_back(amalgam_sweet(tower.model(i), factor, inst.back()));
    models.push_back(built.back().model);
    cross.push_back(inst.back().inj_left);
  }
  std::vector<PosetInclusion> links;
  for (int i = 0; i + 1 < L; ++i) {
    if (i + 1 < from) {
      links.push_back(tower.links()[i]);
    } else if (i + 1 == from) {
      links.push_back(tower.links()[i].then(inst[0].inj_left));
    } else {
      const AmalgamInstance& lo = inst[i - from];
      const AmalgamInstance& hi = inst[i + 1 - from];
      std::vector<int> map;
      for (const auto& [l, r] : lo.pairs) map.push_back(hi.index_of(tower.links()[i].map[l], r));
      links.emplace_back(lo.amalgam, hi.amalgam, std::move(map));
    }
  }
  return ExtendedTower{Tower(std::move(models), std::move(links)), std::move(built), std::move(cross)};
}

}  // namespace forcelab
