#include "doctest.h"
#include "forcelab/embed.hpp"
#include "forcelab/enumerate.hpp"
#include "oracles.hpp"

using namespace forcelab;

namespace {

PosetRef vee() { return share(posets::flat(2)); }

// {0, a, b, c} with c incompatible with a and b.
PosetRef vee3() { return share(posets::flat(3)); }

}  // namespace

TEST_CASE("inclusions validate their map") {
  CHECK_NOTHROW(PosetInclusion(vee(), vee3(), {0, 1, 2}));
  CHECK_THROWS_AS(PosetInclusion(vee(), vee3(), {0, 1, 1}), InputError);
  CHECK_THROWS_AS(PosetInclusion(vee(), vee3(), {1, 0, 2}), InputError);
  CHECK_THROWS_AS(PosetInclusion(vee(), vee3(), {0, 1, 9}), InputError);
  CHECK_THROWS_AS(PosetInclusion(share(posets::chain(2)), vee3(), {0, 1, 2}), InputError);
  CHECK_THROWS_AS(PosetInclusion(share(posets::chain(3)), vee3(), {0, 1, 2}), InputError);
  const auto by_label = PosetInclusion::by_labels(vee(), vee3());
  CHECK(by_label.map == std::vector<int>{0, 1, 2});
}

TEST_CASE("complete suborder examples") {
  const auto id = PosetInclusion::identity(vee3());
  CHECK(is_complete_suborder(id));
  CHECK(is_complete_suborder_via_reductions(id));

  const PosetInclusion bad(vee(), vee3(), {0, 1, 2});
  CHECK_FALSE(is_complete_suborder(bad));
  CHECK_FALSE(is_complete_suborder_via_reductions(bad));

  const auto t1 = share(posets::binary_tree(1));
  const auto t2 = share(posets::binary_tree(2));
  const auto tree = PosetInclusion::by_labels(t1, t2);
  CHECK(is_complete_suborder(tree));
  CHECK(is_complete_suborder_via_reductions(tree));
}

TEST_CASE("reductions") {
  const PosetInclusion bad(vee(), vee3(), {0, 1, 2});
  CHECK(reductions(bad, 0).members == std::vector<int>{0, 1, 2});
  CHECK(reductions(bad, 1).members == std::vector<int>{1});
  CHECK(reductions(bad, 3).members.empty());
  CHECK_THROWS_AS(reductions(bad, 4), InputError);
}

TEST_CASE("the two complete-suborder criteria agree exhaustively") {
  std::size_t checked = 0, positive = 0;
  // All inclusions (not only induced ones) for large posets up to 5 elements.
  for (int nl = 1; nl <= 5; ++nl)
    for (const Poset& L : enumerate::natural_posets(nl)) {
      const auto large = share(L);
      for (int ns = 1; ns <= nl; ++ns)
        for (const Poset& S : enumerate::posets_up_to_iso(ns))
          enumerate::for_each_inclusion(share(S), large, [&](const PosetInclusion& inc) {
            const bool a = is_complete_suborder(inc);
            REQUIRE(a == is_complete_suborder_via_reductions(inc));
            ++checked;
            positive += a;
          });
    }
  // Induced inclusions up to 7 elements.
  for (int nl = 6; nl <= 7; ++nl)
    for (const Poset& L : enumerate::posets_up_to_iso(nl))
      for (const auto& inc : enumerate::induced_inclusions(share(L))) {
        const bool a = is_complete_suborder(inc);
        REQUIRE(a == is_complete_suborder_via_reductions(inc));
        ++checked;
        positive += a;
      }
  MESSAGE("criterion pairs checked: " << checked << ", complete: " << positive);
  CHECK(positive > 0);
  CHECK(positive < checked);
}

TEST_CASE("quotient forcing") {
  const auto P = vee();
  const auto R = vee();
  const auto Q = share(posets::product(*P, *R));
  // p -> (p, 0)
  std::vector<int> m;
  for (int p = 0; p < P->size(); ++p) m.push_back(p * R->size() + R->bottom());
  const PosetInclusion inc(P, Q, m);
  REQUIRE(is_complete_suborder(inc));
  for (int p = 0; p < P->size(); ++p)
    for (int q = 0; q < Q->size(); ++q) {
      const int pp = q / R->size();
      bool expected = true;  // every extension of p is compatible with the P-part
      for (int e = 0; e < P->size(); ++e)
        if (P->leq(p, e) && !oracle::compatible(*P, e, pp)) expected = false;
      CHECK(quotient_forces(inc, p, q) == expected);
    }
  for (int p = 0; p < P->size(); ++p) CHECK(quotient_forces(inc, p, Q->bottom()));

  const PosetInclusion bad(vee(), vee3(), {0, 1, 2});
  CHECK_THROWS_AS(quotient_forces(bad, 0, 0), PreconditionError);
  CHECK_THROWS_AS(QuotientOracle{bad}, PreconditionError);
}

TEST_CASE("quotient forcing properties over enumerated complete suborders") {
  std::size_t pairs = 0;
  for (int nl = 2; nl <= 6; ++nl)
    for (const Poset& L : enumerate::posets_up_to_iso(nl))
      for (const auto& inc : enumerate::induced_inclusions(share(L))) {
        if (!is_complete_suborder_via_reductions(inc)) continue;
        const QuotientOracle qo(inc);
        const QuotientName name(inc);
        const Poset& S = *inc.small;
        for (int q = 0; q < inc.large->size(); ++q)
          for (int p = 0; p < S.size(); ++p) {
            const bool f = qo.forces(p, q);
            // atoms and reductions agree
            REQUIRE(f == name.forces_by_atoms(p, q));
            // monotone upward
            for (int p2 = 0; p2 < S.size(); ++p2)
              if (f && S.leq(p, p2)) REQUIRE(qo.forces(p2, q));
            ++pairs;
          }
        // image elements: forcing inj(p0) means every extension of p is compatible with p0
        for (int p0 = 0; p0 < S.size(); ++p0)
          for (int p = 0; p < S.size(); ++p) {
            bool expected = true;
            for (int e = 0; e < S.size(); ++e)
              if (S.leq(p, e) && !oracle::compatible(S, e, p0)) expected = false;
            REQUIRE(qo.forces(p, inc.map[p0]) == expected);
          }
        for (int a = 0; a < name.base_completion.atom_count; ++a)
          REQUIRE(name.table[a].test(inc.large->bottom()));
      }
  MESSAGE("forcing pairs checked: " << pairs);
}

TEST_CASE("quotient at an atom") {
  SUBCASE("identity inclusion") {
    const auto P = vee();
    const QuotientName name(PosetInclusion::identity(P));
    std::vector<int> members;
    quotient_at_atom(name, 0, &members);
    CHECK(members == std::vector<int>{0, 1});
  }
  SUBCASE("product") {
    const auto P = vee();
    const auto R = vee();
    const auto Q = share(posets::product(*P, *R));
    std::vector<int> m;
    for (int p = 0; p < 3; ++p) m.push_back(p * 3);
    const QuotientName name{PosetInclusion(P, Q, m)};
    std::vector<int> members;
    const Poset quotient = quotient_at_atom(name, 0, &members);
    CHECK(quotient.size() == 6);  // {0, a} x R
    for (int r = 0; r < 3; ++r) CHECK(std::find(members.begin(), members.end(), r) != members.end());
    CHECK_THROWS_AS(quotient_at_atom(name, 5), InputError);
  }
  SUBCASE("trivial base") {
    const auto Q = vee3();
    const QuotientName name{PosetInclusion(share(posets::trivial()), Q, {0})};
    CHECK(quotient_at_atom(name, 0) == *Q);
  }
}

TEST_CASE("complete embeddings of algebras") {
  auto f = CompleteEmbedding::from_atom_images(2, 4, {0b0011, 0b1100});
  CHECK(f.check().ok());
  CHECK(f.apply_to_element(0b11) == 0b1111);
  auto partial = CompleteEmbedding::from_atom_images(2, 4, {0b0011, 0b0100});
  CHECK_FALSE(partial.check().complete);
  CHECK_THROWS_AS(partial.validate(), InputError);
  auto overlap = CompleteEmbedding::from_atom_images(2, 4, {0b0111, 0b1100});
  CHECK_FALSE(overlap.check().incompatibility_preserving);
  auto empty = CompleteEmbedding::from_atom_images(2, 4, {0b1111, 0});
  CHECK_FALSE(empty.check().nonzero);
  CHECK_THROWS_AS(CompleteEmbedding::from_atom_images(2, 4, {0b1111}), InputError);
}

TEST_CASE("atom projection") {
  const auto t1 = share(posets::binary_tree(1));
  const auto t2 = share(posets::binary_tree(2));
  const auto inc = PosetInclusion::by_labels(t1, t2);
  const auto c1 = regular_open_completion(t1);
  const auto c2 = regular_open_completion(t2);
  const auto proj = atom_projection(inc, c1, c2);
  CHECK(proj == std::vector<int>{0, 0, 1, 1});
  const PosetInclusion bad(vee(), vee3(), {0, 1, 2});
  CHECK_THROWS_AS(atom_projection(bad, regular_open_completion(vee()), regular_open_completion(vee3())),
                  PreconditionError);
}
