#include <set>

#include "doctest.h"
#include "forcelab/enumerate.hpp"
#include "forcelab/sweet.hpp"
#include "models.hpp"
#include "oracles.hpp"

using namespace forcelab;
using fixture::at;
using fixture::ats;
using fixture::model;

namespace {

PosetRef vee() { return share(posets::flat(2)); }

CompleteAlgebra algebra(int atoms) {
  CompleteAlgebra a;
  a.atom_count = atoms;
  return a;
}

CompleteEmbedding trivial_into(int atoms) {
  return CompleteEmbedding::from_atom_images(1, atoms, {full_set(atoms)});
}

CompleteEmbedding identity_embedding(int k) {
  std::vector<AtomSet> images;
  for (int a = 0; a < k; ++a) images.push_back(AtomSet{1} << a);
  return CompleteEmbedding::from_atom_images(k, k, images);
}

// chain(2) x chain(2) with E0 grouping by the second coordinate.
SweetModel product_model(const PosetRef& sq) {
  return model(sq, {"(0|0)", "(c1|0)", "(0|c1)", "(c1|c1)"}, {{{"(0|0)", "(c1|0)"}, {"(0|c1)", "(c1|c1)"}}});
}

// Every model with one relation on P, using every dense subset.
std::vector<SweetModel> all_models(const PosetRef& P) {
  std::vector<SweetModel> out;
  const int n = P->size();
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    Bits d(n);
    std::vector<int> members;
    for (int i = 0; i < n; ++i)
      if (mask >> i & 1) {
        d.set(i);
        members.push_back(i);
      }
    if (!is_dense(*P, ConditionSet{members})) continue;
    for (const auto& rgs : enumerate::set_partitions(static_cast<int>(members.size()))) {
      std::vector<std::vector<int>> classes;
      for (std::size_t i = 0; i < rgs.size(); ++i) {
        if (rgs[i] >= static_cast<int>(classes.size())) classes.emplace_back();
        classes[rgs[i]].push_back(members[i]);
      }
      out.emplace_back(P, members, std::vector<std::vector<std::vector<int>>>{classes});
    }
  }
  return out;
}

}  // namespace

TEST_CASE("positive sweetness models") {
  CHECK(validate_sweet(SweetModel::single_class(share(posets::chain(3)))).holds());
  CHECK(validate_sweet(SweetModel::single_class(share(posets::trivial()))).holds());
  CHECK(validate_sweet(SweetModel::singletons(vee(), 3)).holds());
  CHECK(validate_sweet(SweetModel::singletons(share(posets::binary_tree(2)), 2)).holds());
  const auto sq = share(posets::product(posets::chain(2), posets::chain(2)));
  const auto rep = validate_sweet(product_model(sq));
  CHECK(rep.holds());
  CHECK(rep.checked == std::vector<std::string>{"density", "class-count", "directedness", "fusion", "continuity"});
}

TEST_CASE("each negative model fails exactly its clause") {
  const auto P = vee();
  struct Case {
    SweetModel m;
    std::string clause;
    std::vector<int> witness;
  };
  std::vector<Case> cases{
      {model(P, {"0", "a"}, {{{"0"}, {"a"}}}), "density", ats(P, {"b"})},
      {SweetModel::single_class(P), "directedness", ats(P, {"a", "b"})},
      {model(P, {"0", "a", "b"}, {{{"0", "a"}, {"b"}}, {{"0", "b"}, {"a"}}}), "fusion", ats(P, {"0", "0", "b"})},
      {model(P, {"0", "a", "b"}, {{{"0", "a"}, {"b"}}}), "continuity", ats(P, {"0", "b"})},
  };
  for (const auto& c : cases) {
    const auto rep = validate_sweet(c.m);
    REQUIRE(rep.failures.size() == 1);
    CHECK(rep.failures[0].clause == c.clause);
    CHECK(rep.failures[0].witness == c.witness);
    CHECK(rep.failed(c.clause));
  }
}

TEST_CASE("malformed partitions are input errors") {
  const auto P = vee();
  using C = std::vector<std::vector<std::vector<int>>>;
  CHECK_THROWS_AS(SweetModel(P, {0, 1, 2}, C{{{0, 1}, {1, 2}}}), InputError);
  CHECK_THROWS_AS(SweetModel(P, {0, 1, 2}, C{{{0, 1}}}), InputError);
  CHECK_THROWS_AS(SweetModel(P, {0, 1}, C{{{0, 1, 2}}}), InputError);
  CHECK_THROWS_AS(SweetModel(P, {0, 1, 2}, C{{{0, 1, 2}, {}}}), InputError);
  CHECK_THROWS_AS(SweetModel(P, {0, 1, 2}, C{}), InputError);
  CHECK_THROWS_AS(SweetModel(P, {0, 1, 1, 2}, C{{{0, 1, 2}}}), InputError);
  CHECK_THROWS_AS(SweetModel(P, {0, 7}, C{{{0, 7}}}), InputError);
  try {
    SweetModel(P, {0, 1, 2}, C{{{0, 1}}});
  } catch (const InputError& e) {
    CHECK(e.code() == ErrorCode::MalformedPartition);
  }
}

TEST_CASE("extension clauses") {
  const auto P = vee();
  const auto single = SweetModel::singletons(P);
  CHECK(validate_extends(single, single).holds());
  CHECK(validate_extends(single, single).checked.size() == 5);

  SUBCASE("class containment") {
    const auto m1 = model(P, {"0", "a"}, {{{"0"}, {"a"}}});
    const auto m2 = model(P, {"0", "a", "b"}, {{{"0"}, {"a", "b"}}});
    const auto rep = validate_extends(m1, m2);
    REQUIRE(rep.failures.size() == 1);
    CHECK(rep.failures[0].clause == "class-containment");
    CHECK(rep.failures[0].witness == ats(P, {"a", "b"}));
  }
  SUBCASE("restriction") {
    const auto m2 = model(P, {"0", "a", "b"}, {{{"0", "a"}, {"b"}}});
    const auto rep = validate_extends(single, m2);
    CHECK(rep.failed("restriction"));
    CHECK(rep.failure("restriction")->witness == ats(P, {"0", "a"}));
  }
  SUBCASE("dense subset") {
    const auto m2 = model(P, {"a", "b"}, {{{"a"}, {"b"}}});
    CHECK(validate_extends(single, m2).failed("dense-subset"));
  }
  SUBCASE("downward closure") {
    const auto C = share(posets::chain(3));
    const auto m1 = model(C, {"c2"}, {{{"c2"}}});
    const auto m2 = model(C, {"c1", "c2"}, {{{"c1"}, {"c2"}}});
    const auto rep = validate_extends(m1, m2);
    REQUIRE(rep.failures.size() == 1);
    CHECK(rep.failures[0].clause == "downward-closure");
    CHECK(rep.failures[0].witness == ats(C, {"c1", "c2"}));
  }
  SUBCASE("complete suborder") {
    const auto C = share(posets::chain(2));
    const auto rep = validate_extends(SweetModel::singletons(C), single, PosetInclusion(C, P, {0, 1}));
    CHECK(rep.failed("complete-suborder"));
  }
  SUBCASE("tree fixture") {
    const auto t1 = share(posets::binary_tree(1));
    const auto t2 = share(posets::binary_tree(2));
    CHECK(validate_extends(SweetModel::singletons(t1), SweetModel::singletons(t2)).holds());
  }
  SUBCASE("product fixture") {
    const auto c = share(posets::chain(2));
    const auto sq = share(posets::product(*c, *c));
    const PosetInclusion inc(c, sq, {at(sq, "(0|0)"), at(sq, "(c1|0)")});
    CHECK(validate_extends(SweetModel::single_class(c), product_model(sq), inc).holds());
  }
  SUBCASE("relation counts must agree") {
    CHECK_THROWS_AS(validate_extends(single, SweetModel::singletons(P, 2)), InputError);
  }
}

TEST_CASE("extension is transitive on one-relation models along induced suborders") {
  std::size_t triples = 0, premises = 0;
  for (int n = 1; n <= 4; ++n)
    for (const Poset& p : enumerate::posets_up_to_iso(n)) {
      const auto P = share(p);
      // every induced sub-poset containing bottom, with all its models
      std::vector<std::uint32_t> masks;
      std::vector<PosetRef> subs;
      std::vector<std::vector<SweetModel>> models;
      for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        if (!(mask >> P->bottom() & 1)) continue;
        std::vector<int> members;
        for (int i = 0; i < n; ++i)
          if (mask >> i & 1) members.push_back(i);
        masks.push_back(mask);
        subs.push_back(PosetInclusion::induced(P, members).small);
        models.push_back(all_models(subs.back()));
      }
      const std::size_t s = masks.size();
      // ext[a][b][i][j]: model i on sub a extends to model j on sub b
      std::vector<std::vector<std::vector<std::vector<char>>>> ext(s, std::vector<std::vector<std::vector<char>>>(s));
      for (std::size_t a = 0; a < s; ++a)
        for (std::size_t b = 0; b < s; ++b) {
          if ((masks[a] & ~masks[b]) != 0) continue;
          const auto inc = PosetInclusion::by_labels(subs[a], subs[b]);
          ext[a][b].assign(models[a].size(), std::vector<char>(models[b].size()));
          for (std::size_t i = 0; i < models[a].size(); ++i)
            for (std::size_t j = 0; j < models[b].size(); ++j)
              ext[a][b][i][j] = validate_extends(models[a][i], models[b][j], inc).holds();
        }
      for (std::size_t a = 0; a < s; ++a)
        for (std::size_t b = 0; b < s; ++b)
          for (std::size_t c = 0; c < s; ++c) {
            if ((masks[a] & ~masks[b]) != 0 || (masks[b] & ~masks[c]) != 0) continue;
            for (std::size_t i = 0; i < models[a].size(); ++i)
              for (std::size_t j = 0; j < models[b].size(); ++j) {
                if (!ext[a][b][i][j]) continue;
                for (std::size_t k = 0; k < models[c].size(); ++k) {
                  ++triples;
                  if (!ext[b][c][j][k]) continue;
                  ++premises;
                  REQUIRE(ext[a][c][i][k]);
                }
              }
          }
    }
  MESSAGE("triples " << triples << ", with both premises " << premises);
  CHECK(premises > 500);
}

TEST_CASE("centered cover") {
  const auto sq = share(posets::product(posets::chain(2), posets::chain(2)));
  const auto m = product_model(sq);
  const auto cover = centered_cover(m);
  CHECK(cover.size() == 2);
  Bits covered(sq->size());
  for (const auto& cls : cover) {
    for (int x : cls.members) covered.set(x);
    for (int x : cls.members)
      for (int y : cls.members) CHECK(oracle::compatible(*sq, x, y));
  }
  CHECK(covered == m.dense());
  CHECK_THROWS_AS(centered_cover(SweetModel::single_class(vee())), InputError);
}

TEST_CASE("chain limits") {
  const auto t1 = share(posets::binary_tree(1));
  const auto t2 = share(posets::binary_tree(2));
  const auto m1 = SweetModel::singletons(t1);
  const auto m2 = SweetModel::singletons(t2);

  const auto one = chain_limit({m1});
  CHECK(one.holds());
  CHECK(fixture::same_model(one.model, m1));

  const auto twice = chain_limit({m1, m1});
  CHECK(twice.holds());
  CHECK(fixture::same_model(twice.model, m1));

  const auto lim = chain_limit({m1, m2});
  CHECK(lim.holds());
  REQUIRE(lim.extends.size() == 2);
  CHECK(fixture::same_model(lim.model, m2));

  // splitting the chain does not change the limit
  const auto t3 = share(posets::binary_tree(3));
  const auto m3 = SweetModel::singletons(t3);
  const auto whole = chain_limit({m1, m2, m3});
  const auto split = chain_limit({chain_limit({m1, m2}).model, m3});
  CHECK(whole.holds());
  CHECK(fixture::same_model(whole.model, split.model));

  CHECK_THROWS_AS(chain_limit({m2, m1}), InputError);
  CHECK_THROWS_AS(chain_limit({}), InputError);
}

TEST_CASE("sweetness on amalgams") {
  SUBCASE("trivial models give the trivial product") {
    const auto T = share(posets::trivial());
    const auto inst = amalgamate_posets(algebra(1), T, T, trivial_into(1), trivial_into(1));
    const auto out = amalgam_sweet(SweetModel::singletons(T), SweetModel::singletons(T), inst);
    CHECK(out.holds());
    CHECK(out.model.poset()->size() == 1);
  }
  SUBCASE("chains over a trivial base") {
    const auto c = share(posets::chain(3));
    const auto inst = amalgamate_posets(algebra(1), c, c, trivial_into(1), trivial_into(1));
    const auto out = amalgam_sweet(SweetModel::singletons(c), SweetModel::singletons(c), inst);
    CHECK(out.construction.empty());
    CHECK(out.sweet.holds());
    CHECK(out.extends.size() == 2);
    CHECK(out.holds());
    CHECK(out.model.poset()->size() == 9);
  }
  SUBCASE("identity amalgam of a vee") {
    const auto P = vee();
    const auto inst = amalgamate_posets(algebra(2), P, P, identity_embedding(2), identity_embedding(2));
    const auto out = amalgam_sweet(SweetModel::singletons(P), SweetModel::singletons(P), inst);
    CHECK(out.holds());
    CHECK(regular_open_completion(out.model.poset()).atom_count == 2);
  }
  SUBCASE("bottom classes must be singletons") {
    const auto c = share(posets::chain(2));
    const auto inst = amalgamate_posets(algebra(1), c, c, trivial_into(1), trivial_into(1));
    const auto out = amalgam_sweet(SweetModel::single_class(c), SweetModel::single_class(c), inst);
    REQUIRE_FALSE(out.construction.empty());
    CHECK(out.construction[0].clause == "bottom-class");
    CHECK_FALSE(out.holds());
  }
  SUBCASE("mismatched instance") {
    const auto c = share(posets::chain(2));
    const auto inst = amalgamate_posets(algebra(1), c, c, trivial_into(1), trivial_into(1));
    CHECK_THROWS_AS(amalgam_sweet(SweetModel::singletons(vee()), SweetModel::singletons(c), inst), InputError);
    CHECK_THROWS_AS(amalgam_sweet(SweetModel::singletons(c), SweetModel::singletons(c, 2), inst), InputError);
  }
}

TEST_CASE("sweetness on Hechler compositions") {
  SUBCASE("trivial model") {
    const auto T = share(posets::trivial());
    const auto ts = compose_hechler(T, {1, 1});
    const auto out = hechler_sweet(SweetModel::singletons(T), ts);
    CHECK(out.holds());
    CHECK(out.model.dense().count() == 4);
    CHECK(out.model.class_count(0) == 4);
  }
  SUBCASE("chain model") {
    const auto c = share(posets::chain(3));
    const auto ts = compose_hechler(c, {2, 1});
    const auto out = hechler_sweet(SweetModel::single_class(c), ts);
    CHECK(out.holds());
    // different constant values never share a class
    const auto& T = *out.model.poset();
    for (int x = 0; x < T.size(); ++x)
      for (int y = 0; y < T.size(); ++y)
        if (out.model.in_dense(x) && out.model.in_dense(y) && ts.names[x][0] != ts.names[y][0])
          CHECK(out.model.class_of(0, x) != out.model.class_of(0, y));
  }
  SUBCASE("vee with singletons") {
    const auto P = vee();
    const auto ts = compose_hechler(P, {1, 1});
    const auto out = hechler_sweet(SweetModel::singletons(P, 2), ts);
    CHECK(out.holds());
    // bottom with a non-constant name is outside D*
    CHECK_FALSE(out.model.in_dense(ts.index_of(P->bottom(), {0, 1})));
    CHECK(out.model.in_dense(ts.index_of(P->bottom(), {1, 1})));
  }
  SUBCASE("mismatched iteration") {
    const auto ts = compose_hechler(vee(), {1, 1});
    CHECK_THROWS_AS(hechler_sweet(SweetModel::singletons(share(posets::chain(2))), ts), InputError);
  }
}
