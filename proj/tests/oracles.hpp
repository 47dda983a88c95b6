// Brute-force reference computations used as independent oracles in tests.
#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "forcelab/completion.hpp"
#include "forcelab/poset.hpp"

namespace oracle {

using forcelab::AtomSet;
using forcelab::Poset;

inline bool compatible(const Poset& P, int p, int q) {
  for (int r = 0; r < P.size(); ++r)
    if (P.leq(p, r) && P.leq(q, r)) return true;
  return false;
}

/// Every subset, kept if pairwise incompatible and not extendable.
inline std::vector<std::vector<int>> maximal_antichains(const Poset& P) {
  const int n = P.size();
  std::vector<std::vector<int>> out;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::vector<int> members;
    for (int i = 0; i < n; ++i)
      if (mask >> i & 1) members.push_back(i);
    bool anti = true;
    for (std::size_t i = 0; i < members.size() && anti; ++i)
      for (std::size_t j = i + 1; j < members.size() && anti; ++j)
        anti = !oracle::compatible(P, members[i], members[j]);
    if (!anti) continue;
    bool maximal = true;
    for (int r = 0; r < n && maximal; ++r) {
      if (mask >> r & 1) continue;
      bool clash = false;
      for (int m : members) clash = clash || oracle::compatible(P, r, m);
      maximal = clash;
    }
    if (maximal) out.push_back(members);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Completion atoms of a finite poset are its maximal elements; a condition's
/// value is the set of maximal elements above it. Atom i is the i-th maximal
/// element in index order.
struct MaximalCompletion {
  std::vector<int> maximal;
  std::vector<AtomSet> value;
};

inline MaximalCompletion completion_by_maximal_elements(const Poset& P) {
  MaximalCompletion out;
  for (int m = 0; m < P.size(); ++m) {
    bool is_max = true;
    for (int r = 0; r < P.size() && is_max; ++r) is_max = r == m || !P.leq(m, r);
    if (is_max) out.maximal.push_back(m);
  }
  for (int p = 0; p < P.size(); ++p) {
    AtomSet v = 0;
    for (std::size_t i = 0; i < out.maximal.size(); ++i)
      if (P.leq(p, out.maximal[i])) v |= AtomSet{1} << i;
    out.value.push_back(v);
  }
  return out;
}

/// Closure of seeds under union, intersection and complement by saturation.
inline std::vector<AtomSet> boolean_closure(int atoms, const std::vector<AtomSet>& seeds) {
  const AtomSet full = forcelab::full_set(atoms);
  std::vector<AtomSet> set{0, full};
  for (AtomSet s : seeds) set.push_back(s);
  bool grew = true;
  while (grew) {
    grew = false;
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());
    const std::vector<AtomSet> snapshot = set;
    for (AtomSet x : snapshot) {
      auto add = [&](AtomSet y) {
        if (!std::binary_search(snapshot.begin(), snapshot.end(), y) &&
            std::find(set.begin(), set.end(), y) == set.end()) {
          set.push_back(y);
          grew = true;
        }
      };
      add(full & ~x);
      for (AtomSet y : snapshot) {
        add(x & y);
        add(x | y);
      }
    }
  }
  std::sort(set.begin(), set.end());
  set.erase(std::unique(set.begin(), set.end()), set.end());
  return set;
}

}  // namespace oracle
