#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "forcelab/embed.hpp"
#include "forcelab/poset.hpp"

namespace forcelab::enumerate {

/// Largest poset size the isomorphism-reduced enumeration accepts.
inline constexpr int kIsoEnumerationCap = 7;

/// Every poset on n elements with bottom 0 and a natural labeling (p below q
/// implies p < q as indices). Each order type appears at least once. Labels
/// are "0", "a", "b", ...
std::vector<Poset> natural_posets(int n);

/// One representative per isomorphism class, in a deterministic order.
/// Throws CapExceeded above kIsoEnumerationCap.
std::vector<Poset> posets_up_to_iso(int n);

/// Canonical code of a poset with at most 8 elements, invariant under
/// relabelings that fix bottom.
std::uint64_t canonical_code(const Poset& poset);

/// All induced sub-posets that contain bottom, as inclusions, in order of
/// the member bitmask.
std::vector<PosetInclusion> induced_inclusions(const PosetRef& large);

/// Every injective, order-preserving, bottom-preserving map from `small`
/// into `large`, in lexicographic order of the image sequence.
void for_each_inclusion(const PosetRef& small, const PosetRef& large,
                        const std::function<void(const PosetInclusion&)>& fn);

/// Restricted growth strings of length n (one per set partition), in
/// lexicographic order.
std::vector<std::vector<int>> set_partitions(int n);

}  // namespace forcelab::enumerate
