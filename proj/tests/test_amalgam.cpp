#include "doctest.h"
#include "forcelab/amalgam.hpp"
#include "forcelab/enumerate.hpp"
#include "oracles.hpp"

using namespace forcelab;

namespace {

CompleteAlgebra algebra(int atoms) {
  CompleteAlgebra a;
  a.atom_count = atoms;
  return a;
}

// Complete embedding of a k-atom base given by a surjective atom partition
// of the target: target atom t goes to base atom rgs[t].
CompleteEmbedding from_partition(int k, const std::vector<int>& rgs) {
  std::vector<AtomSet> images(k, 0);
  for (std::size_t t = 0; t < rgs.size(); ++t) images[rgs[t]] |= AtomSet{1} << t;
  return CompleteEmbedding::from_atom_images(k, static_cast<int>(rgs.size()), images);
}

CompleteEmbedding identity_embedding(int k) {
  std::vector<AtomSet> images;
  for (int a = 0; a < k; ++a) images.push_back(AtomSet{1} << a);
  return CompleteEmbedding::from_atom_images(k, k, images);
}

// Every surjection from the atoms of an n-atom algebra onto k base atoms.
std::vector<CompleteEmbedding> embeddings_into(int k, int n) {
  std::vector<CompleteEmbedding> out;
  std::vector<int> f(n, 0);
  for (;;) {
    std::vector<bool> hit(k, false);
    for (int v : f) hit[v] = true;
    if (std::all_of(hit.begin(), hit.end(), [](bool b) { return b; })) out.push_back(from_partition(k, f));
    int i = 0;
    while (i < n && ++f[i] == k) f[i++] = 0;
    if (i == n) break;
  }
  return out;
}

// base element b -> left algebra_poset element, as a poset inclusion.
PosetInclusion base_into_left(const AmalgamInstance& inst) {
  std::vector<int> m;
  for (int e = 0; e < inst.f1.source->size(); ++e) m.push_back(algebra_poset_element(inst.f1.map[e]));
  return PosetInclusion(inst.f1.source, inst.left, m);
}

}  // namespace

TEST_CASE("trivial base gives the full product") {
  for (int k1 = 1; k1 <= 3; ++k1)
    for (int k2 = 1; k2 <= 3; ++k2) {
      const auto inst = amalgamate(algebra(1), algebra(k1), algebra(k2), from_partition(1, std::vector<int>(k1, 0)),
                                   from_partition(1, std::vector<int>(k2, 0)));
      CHECK(*inst.amalgam == posets::product(algebra_poset(k1), algebra_poset(k2)));
    }
}

TEST_CASE("identity amalgam collapses to the base") {
  for (int k = 1; k <= 3; ++k) {
    const auto inst = amalgamate(algebra(k), algebra(k), algebra(k), identity_embedding(k), identity_embedding(k));
    for (int x = 0; x < inst.amalgam->size(); ++x) {
      const auto [l, r] = inst.pairs[x];
      CHECK((algebra_poset_value(l) & algebra_poset_value(r)) != 0);
    }
    std::size_t expected = 0;
    for (AtomSet b1 = 1; b1 <= full_set(k); ++b1)
      for (AtomSet b2 = 1; b2 <= full_set(k); ++b2) expected += (b1 & b2) != 0;
    CHECK(inst.amalgam->size() == static_cast<int>(expected));
    // (b1, b2) -> b1 & b2 is an isomorphism of completions
    std::vector<AtomSet> meets;
    for (const auto& [l, r] : inst.pairs) meets.push_back(algebra_poset_value(l) & algebra_poset_value(r));
    CHECK(matching_atom_bijection(inst.completion.dense_map, meets, inst.completion.atom_count, k));
    CHECK(check_identification(inst));
    // extension embedding sends b to the value of b under the same isomorphism
    const auto phi = extension_embedding(inst);
    const auto bij = matching_atom_bijection(inst.completion.dense_map, meets, inst.completion.atom_count, k);
    for (int e = 0; e < inst.left->size(); ++e) {
      AtomSet mapped = 0;
      for (int a = 0; a < inst.completion.atom_count; ++a)
        if (phi.map[e] >> a & 1) mapped |= AtomSet{1} << (*bij)[a];
      CHECK(mapped == algebra_poset_value(e));
    }
  }
}

TEST_CASE("membership criterion matches witness search on a 2-atom base into 4-atom factors") {
  const auto f1 = from_partition(2, {0, 0, 1, 1});
  const auto f2 = from_partition(2, {0, 1, 1, 1});
  const auto inst = amalgamate(algebra(2), algebra(4), algebra(4), f1, f2);
  int members = 0;
  for (int l = 0; l < inst.left->size(); ++l)
    for (int r = 0; r < inst.right->size(); ++r) {
      const bool w = amalgam_member_by_witness(inst.left_completion, inst.right_completion, f1, f2, l, r);
      CHECK(w == (inst.index_of(l, r) >= 0));
      members += w;
    }
  CHECK(members == inst.amalgam->size());
  CHECK(members < 15 * 15);
}

TEST_CASE("amalgam claims hold on every small instance") {
  int instances = 0;
  for (int k = 1; k <= 2; ++k)
    for (int n1 = k; n1 <= 3; ++n1)
      for (int n2 = k; n2 <= 3; ++n2)
        for (const auto& f1 : embeddings_into(k, n1))
          for (const auto& f2 : embeddings_into(k, n2)) {
            const auto inst = amalgamate(algebra(k), algebra(n1), algebra(n2), f1, f2);
            ++instances;
            for (int l = 0; l < inst.left->size(); ++l)
              for (int r = 0; r < inst.right->size(); ++r)
                REQUIRE(amalgam_member_by_witness(inst.left_completion, inst.right_completion, f1, f2, l, r) ==
                        (inst.index_of(l, r) >= 0));
            REQUIRE(inst.amalgam->bottom() == inst.index_of(inst.left->bottom(), inst.right->bottom()));
            REQUIRE(is_complete_suborder(inst.inj_left));
            REQUIRE(is_complete_suborder(inst.inj_right));
            REQUIRE(check_identification(inst));
            // identification read off the completion agrees with the trace comparison
            for (AtomSet b = 1; b <= full_set(k); ++b)
              REQUIRE(inst.lift_left(f1.apply_to_element(b)) == inst.lift_right(f2.apply_to_element(b)));
            const auto phi = extension_embedding(inst);
            REQUIRE(phi.check().ok());
            REQUIRE(phi.map[inst.left->bottom()] == inst.completion.full());
            // quotient preservation through the left injection
            const auto into_left = base_into_left(inst);
            const auto into_amalgam = into_left.then(inst.inj_left);
            REQUIRE(is_complete_suborder_via_reductions(into_amalgam));
            const QuotientOracle small_q(into_left), big_q(into_amalgam);
            for (int p = 0; p < into_left.small->size(); ++p)
              for (int q = 0; q < inst.left->size(); ++q)
                if (small_q.forces(p, q)) REQUIRE(big_q.forces(p, inst.inj_left.map[q]));
          }
  CHECK(instances == 73);
}

TEST_CASE("identification with distinct embeddings into 3-atom algebras") {
  const auto inst = amalgamate(algebra(2), algebra(3), algebra(3), from_partition(2, {0, 0, 1}),
                               from_partition(2, {0, 1, 0}));
  CHECK(check_identification(inst));
}

TEST_CASE("trivial base: extension embedding is the product factor embedding") {
  const auto inst = amalgamate(algebra(1), algebra(2), algebra(2), from_partition(1, {0, 0}),
                               from_partition(1, {0, 0}));
  const auto phi = extension_embedding(inst);
  // left element l sits above exactly the product atoms whose left coordinate is below l
  const auto c = inst.completion;
  CHECK(c.atom_count == 4);
  for (int l = 0; l < inst.left->size(); ++l) CHECK(atom_count_of(phi.map[l]) == 2 * atom_count_of(algebra_poset_value(l)));
}

TEST_CASE("non-complete factor embeddings are rejected") {
  const auto partial = CompleteEmbedding::from_atom_images(2, 3, {0b001, 0b010});
  CHECK_THROWS_AS(amalgamate(algebra(2), algebra(3), algebra(3), partial, from_partition(2, {0, 1, 1})), InputError);
  CHECK_THROWS_AS(amalgamate(algebra(2), algebra(4), algebra(3), from_partition(2, {0, 1, 1}),
                             from_partition(2, {0, 1, 1})),
                  InputError);
}

TEST_CASE("level sub-amalgams") {
  const auto inst = amalgamate(algebra(1), algebra(2), algebra(2), from_partition(1, {0, 0}),
                               from_partition(1, {0, 0}));
  Bits left(inst.left->size()), right(inst.right->size());
  left.set(inst.left->bottom());
  right.set();
  const auto level = level_inclusion(inst, left, right);
  CHECK(level.small->size() == 3);
  CHECK(is_complete_suborder(level));
}

TEST_CASE("partial isomorphisms") {
  const Subalgebra whole = Subalgebra::whole(2);
  const PartialIso swap(whole, whole, {1, 0});
  CHECK(swap.apply(0b01) == 0b10);
  CHECK(swap.verify_tables());
  CHECK(swap.inverse().block_map == std::vector<int>{1, 0});
  CHECK_THROWS_AS(swap.apply(0b100), InputError);
  CHECK_THROWS_AS(PartialIso(whole, whole, {0, 0}), InputError);
  CHECK_THROWS_AS(PartialIso(whole, Subalgebra::trivial(2), {0, 1}), InputError);
  const Subalgebra half = generated_subalgebra(4, {0b0011});
  const PartialIso cross(half, generated_subalgebra(4, {0b0101}), {1, 0});
  CHECK(cross.verify_tables());
  CHECK(cross.apply(0b0011) == 0b1010);
}

TEST_CASE("iso extension step") {
  const auto P = share(posets::flat(2));
  SUBCASE("identity on the trivial subalgebra") {
    const auto step = iso_extension_step(P, PartialIso::identity(Subalgebra::trivial(2)));
    CHECK(*step.instance.amalgam == posets::product(*P, *P));
    for (int t = 0; t < 2; ++t) CHECK(step.extended.apply(step.left_copy[t]) == step.right_copy[t]);
    CHECK(step.left_copy[0] != step.right_copy[0]);
    CHECK(step.extended.verify_tables());
  }
  SUBCASE("identity on everything collapses") {
    const auto step = iso_extension_step(P, PartialIso::identity(Subalgebra::whole(2)));
    CHECK(step.instance.completion.atom_count == 2);
    CHECK(step.left_copy == step.right_copy);
    for (AtomSet x = 0; x <= 3; ++x) CHECK(step.extended.apply(x) == x);
  }
  SUBCASE("atom swap") {
    const PartialIso swap(Subalgebra::whole(2), Subalgebra::whole(2), {1, 0});
    const auto step = iso_extension_step(P, swap);
    CHECK(step.extended.verify_tables());
    CHECK(extends_through(step.extended, swap, step.left_copy));
    for (int t = 0; t < 2; ++t) CHECK(step.extended.apply(step.left_copy[t]) == step.right_copy[t]);
  }
  SUBCASE("foreign isomorphism is rejected") {
    CHECK_THROWS_AS(iso_extension_step(P, PartialIso::identity(Subalgebra::whole(3))), InputError);
  }
}

TEST_CASE("iso extension over a non-trivial subalgebra of a larger poset") {
  const auto P = share(posets::flat(4));
  const Subalgebra dom = generated_subalgebra(4, {0b0011});
  const Subalgebra rng = generated_subalgebra(4, {0b0101});
  const PartialIso f(dom, rng, {0, 1});
  const auto step = iso_extension_step(P, f);
  CHECK(check_identification(step.instance));
  CHECK(extends_through(step.extended, f, step.left_copy));
  CHECK(step.extended.verify_tables());
}

TEST_CASE("back and forth") {
  const auto P = share(posets::flat(2));
  SUBCASE("one step is a single extension") {
    const PartialIso swap(Subalgebra::whole(2), Subalgebra::whole(2), {1, 0});
    const auto tower = back_and_forth_tower(P, swap, 1);
    REQUIRE(tower.size() == 2);
    const auto step = iso_extension_step(P, swap);
    CHECK(tower[1].iso.block_map == step.extended.block_map);
    CHECK(tower[1].embedding == step.left_copy);
  }
  SUBCASE("identity stays the identity on the original copy") {
    const auto id = PartialIso::identity(Subalgebra::whole(2));
    const auto tower = back_and_forth_tower(P, id, 3);
    std::vector<AtomSet> copy{0b01, 0b10};
    for (std::size_t m = 1; m < tower.size(); ++m) {
      for (AtomSet& c : copy) c = map_through(tower[m].embedding, c);
      for (AtomSet c : copy) CHECK(tower[m].iso.apply(c) == c);
    }
  }
  SUBCASE("swap alternates domain and range") {
    const PartialIso swap(Subalgebra::whole(2), Subalgebra::whole(2), {1, 0});
    const auto tower = back_and_forth_tower(P, swap, 2);
    REQUIRE(tower.size() == 3);
    for (int t = 0; t < tower[1].atom_count; ++t) {
      const AtomSet c = map_through(tower[2].embedding, AtomSet{1} << t);
      CHECK(tower[2].iso.dom.contains(c));
      CHECK(tower[2].iso.rng.contains(c));
    }
  }
  CHECK_THROWS_AS(back_and_forth_tower(P, PartialIso::identity(Subalgebra::whole(2)), 0), InputError);
}
