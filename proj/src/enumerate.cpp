#include "forcelab/enumerate.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace forcelab::enumerate {

namespace {

std::string element_label(int i) {
  if (i == 0) return "0";
  std::string s;
  for (int k = i - 1;; k = k / 26 - 1) {
    s.insert(s.begin(), static_cast<char>('a' + k % 26));
    if (k < 26) break;
  }
  return s;
}

// down[i] = strict down set of i as a bitmask.
Poset from_down_masks(const std::vector<std::uint32_t>& down) {
  const int n = static_cast<int>(down.size());
  std::vector<std::string> labels;
  for (int i = 0; i < n; ++i) labels.push_back(element_label(i));
  return Poset::from_predicate(
      std::move(labels), [&](int p, int q) { return p == q || (down[q] >> p & 1); }, 0);
}

void extend(std::vector<std::uint32_t>& down, int n, std::vector<Poset>& out) {
  const int k = static_cast<int>(down.size());
  if (k == n) {
    out.push_back(from_down_masks(down));
    return;
  }
  // Down-closed subsets of {0..k-1} that contain 0.
  for (std::uint32_t s = 1; s < (1u << k); s += 2) {
    bool closed = true;
    for (int i = 0; i < k && closed; ++i)
      if ((s >> i & 1) && (down[i] & ~s)) closed = false;
    if (!closed) continue;
    down.push_back(s);
    extend(down, n, out);
    down.pop_back();
  }
}

}  // namespace

std::vector<Poset> natural_posets(int n) {
  if (n < 1) throw InputError(ErrorCode::InvalidParams, "poset size must be positive");
  if (n > 10) throw InputError(ErrorCode::CapExceeded, "natural poset enumeration above 10 elements");
  std::vector<Poset> out;
  std::vector<std::uint32_t> down{0};
  extend(down, n, out);
  return out;
}

std::uint64_t canonical_code(const Poset& poset) {
  const int n = poset.size();
  if (n > 8) throw InputError(ErrorCode::CapExceeded, "canonical code above 8 elements");
  std::vector<int> others;
  for (int i = 0; i < n; ++i)
    if (i != poset.bottom()) others.push_back(i);
  std::uint64_t best = ~std::uint64_t{0};
  do {
    std::vector<int> order{poset.bottom()};
    order.insert(order.end(), others.begin(), others.end());
    std::uint64_t code = 0;
    int bit = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j, ++bit)
        if (poset.leq(order[i], order[j])) code |= std::uint64_t{1} << bit;
    best = std::min(best, code);
  } while (std::next_permutation(others.begin(), others.end()));
  // Sizes below 8 use at most 49 bits; tag them so different sizes never collide.
  return n < 8 ? best | (static_cast<std::uint64_t>(n) << 60) : best;
}

std::vector<Poset> posets_up_to_iso(int n) {
  if (n > kIsoEnumerationCap) throw InputError(ErrorCode::CapExceeded, "isomorphism reduction above the cap");
  std::vector<Poset> out;
  std::set<std::uint64_t> seen;
  for (Poset& p : natural_posets(n))
    if (seen.insert(canonical_code(p)).second) out.push_back(std::move(p));
  return out;
}

std::vector<PosetInclusion> induced_inclusions(const PosetRef& large) {
  const int n = large->size();
  if (n > 20) throw InputError(ErrorCode::CapExceeded, "subset enumeration above 20 elements");
  std::vector<int> others;
  for (int i = 0; i < n; ++i)
    if (i != large->bottom()) others.push_back(i);
  std::vector<PosetInclusion> out;
  for (std::uint32_t mask = 0; mask < (1u << others.size()); ++mask) {
    std::vector<int> members{large->bottom()};
    for (std::size_t i = 0; i < others.size(); ++i)
      if (mask >> i & 1) members.push_back(others[i]);
    out.push_back(PosetInclusion::induced(large, members));
  }
  return out;
}

std::vector<std::vector<int>> set_partitions(int n) {
  std::vector<std::vector<int>> out;
  if (n <= 0) {
    out.emplace_back();
    return out;
  }
  std::vector<int> rgs(n, 0);
  auto rec = [&](auto&& self, int i, int max_block) -> void {
    if (i == n) {
      out.push_back(rgs);
      return;
    }
    for (int b = 0; b <= max_block + 1; ++b) {
      rgs[i] = b;
      self(self, i + 1, std::max(max_block, b));
    }
  };
  rgs[0] = 0;
  rec(rec, 1, 0);
  return out;
}

void for_each_inclusion(const PosetRef& small, const PosetRef& large,
                        const std::function<void(const PosetInclusion&)>& fn) {
  const int ns = small->size(), nl = large->size();
  std::vector<int> map(ns, -1);
  std::vector<bool> used(nl, false);
  auto rec = [&](auto&& self, int i) -> void {
    if (i == ns) {
      fn(PosetInclusion(small, large, map));
      return;
    }
    auto try_image = [&](int t) {
      for (int p = 0; p < i; ++p) {
        if (small->leq(p, i) && !large->leq(map[p], t)) return;
        if (small->leq(i, p) && !large->leq(t, map[p])) return;
      }
      map[i] = t;
      used[t] = true;
      self(self, i + 1);
      used[t] = false;
    };
    if (i == small->bottom()) {
      if (!used[large->bottom()]) try_image(large->bottom());
      return;
    }
    for (int t = 0; t < nl; ++t)
      if (!used[t] && t != large->bottom()) try_image(t);
  };
  rec(rec, 0);
}

}  // namespace forcelab::enumerate
