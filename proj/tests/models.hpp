// Label-based builders shared by the sweetness and tower tests.
#pragma once

#include <string>
#include <vector>

#include "forcelab/sweet.hpp"

namespace fixture {

using forcelab::PosetRef;
using forcelab::SweetModel;

inline int at(const PosetRef& P, const std::string& label) { return P->index_of(label).value(); }

inline std::vector<int> ats(const PosetRef& P, const std::vector<std::string>& labels) {
  std::vector<int> out;
  for (const auto& l : labels) out.push_back(at(P, l));
  return out;
}

/// classes[n] = E_n as label lists.
inline SweetModel model(const PosetRef& P, const std::vector<std::string>& dense,
                        const std::vector<std::vector<std::vector<std::string>>>& classes) {
  std::vector<std::vector<std::vector<int>>> idx;
  for (const auto& family : classes) {
    idx.emplace_back();
    for (const auto& cls : family) idx.back().push_back(ats(P, cls));
  }
  return SweetModel(P, ats(P, dense), idx);
}

inline bool same_model(const SweetModel& a, const SweetModel& b) {
  if (!(*a.poset() == *b.poset()) || a.dense() != b.dense() || a.relation_count() != b.relation_count())
    return false;
  for (int n = 0; n < a.relation_count(); ++n)
    if (a.classes(n) != b.classes(n)) return false;
  return true;
}

}  // namespace fixture
