#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

namespace malsched {

/// Subsets of a ground set (machines, items, slots) as bitmasks over the
/// element indices. Ground sets are capped at 60 elements project-wide;
/// stage-3 coverage needs instances beyond 40 machines, which is why the
/// mask is 64-bit.
using Mask = std::uint64_t;

inline constexpr int kMaxGroundSize = 60;

inline constexpr Mask full_mask(int n) { return (n >= 64) ? ~Mask{0} : ((Mask{1} << n) - 1); }
inline constexpr bool contains(Mask s, int i) { return (s >> i) & 1u; }
inline constexpr Mask with(Mask s, int i) { return s | (Mask{1} << i); }
inline constexpr Mask without(Mask s, int i) { return s & ~(Mask{1} << i); }
inline constexpr int popcount(Mask s) { return std::popcount(s); }

inline std::vector<int> elements(Mask s) {
  std::vector<int> out;
  while (s) {
    int i = std::countr_zero(s);
    out.push_back(i);
    s &= s - 1;
  }
  return out;
}

/// All subsets of `universe`, ascending as integers (so ∅ first).
/// The standard trick: iterate t = (t - universe) & universe.
template <typename F>
void for_each_subset(Mask universe, F&& f) {
  Mask t = 0;
  while (true) {
    f(t);
    if (t == universe) break;
    t = (t - universe) & universe;
  }
}

std::string mask_to_string(Mask s, const std::vector<std::string>& names);

inline std::string mask_to_string(Mask s, const std::vector<std::string>& names) {
  std::string out = "{";
  bool first = true;
  for (int i : elements(s)) {
    if (!first) out += ",";
    out += names.at(static_cast<size_t>(i));
    first = false;
  }
  return out + "}";
}

}  // namespace malsched
