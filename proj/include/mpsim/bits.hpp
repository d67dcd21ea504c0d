#pragma once

#include <bit>
#include <cstdint>
#include <string>

#include "mpsim/errors.hpp"

namespace mpsim {

// Component sets are single-word bitmasks; bit i stands for component i
// (0-based internally, components are numbered from 1 at I/O boundaries).
using Mask = std::uint64_t;

inline constexpr int kMaxComponents = 64;

constexpr Mask bit(int i) { return Mask{1} << i; }

constexpr Mask full_mask(int n) {
  return n >= 64 ? ~Mask{0} : (Mask{1} << n) - 1;
}

inline int popcount(Mask m) { return std::popcount(m); }

template <typename Fn>
void for_each_bit(Mask m, Fn&& fn) {
  while (m) {
    fn(std::countr_zero(m));
    m &= m - 1;
  }
}

// Membership rendering in component order, e.g. {1,3} over n=3 -> "101".
inline std::string mask_to_bitstring(Mask m, int n) {
  std::string s(static_cast<std::size_t>(n), '0');
  for (int i = 0; i < n; ++i)
    if (m & bit(i)) s[static_cast<std::size_t>(i)] = '1';
  return s;
}

// Exact binomial coefficient in 64 bits. Throws on saturation instead of
// silently wrapping; every n <= 63 is representable.
inline std::uint64_t binomial_checked(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  unsigned __int128 acc = 1;
  for (int i = 1; i <= k; ++i) {
    acc = acc * static_cast<unsigned __int128>(n - k + i) /
          static_cast<unsigned __int128>(i);
    if (acc > ~std::uint64_t{0})
      throw BudgetError("binomial(" + std::to_string(n) + "," +
                        std::to_string(k) + ") exceeds 64 bits");
  }
  return static_cast<std::uint64_t>(acc);
}

}  // namespace mpsim
