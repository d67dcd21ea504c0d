#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "mpsim/bits.hpp"
#include "mpsim/errors.hpp"
#include "mpsim/network.hpp"

namespace mpsim {

// A sub-hypercube of the n-cube: each cell is 0, 1 or free. Canonical form
// keeps fixed_bits zero at free positions so equality is plain field equality.
struct Subhypercube {
  std::uint64_t fixed_bits = 0;
  Mask free_mask = 0;
  int n = 0;

  static Subhypercube of(const Configuration& x, Mask free) {
    return {x.bits & ~free & full_mask(x.n), free & full_mask(x.n), x.n};
  }

  static Subhypercube parse(std::string_view text) {
    if (text.empty() || text.size() > kMaxComponents)
      throw UsageError("bad sub-hypercube literal length");
    Subhypercube h;
    h.n = static_cast<int>(text.size());
    for (int i = 0; i < h.n; ++i) {
      switch (text[static_cast<std::size_t>(i)]) {
        case '0':
          break;
        case '1':
          h.fixed_bits |= bit(i);
          break;
        case '*':
          h.free_mask |= bit(i);
          break;
        default:
          throw UsageError("bad sub-hypercube character: " +
                           std::string(1, text[static_cast<std::size_t>(i)]));
      }
    }
    return h;
  }

  int rank() const { return popcount(free_mask); }

  std::uint64_t vertex_count() const { return std::uint64_t{1} << rank(); }

  bool contains(const Configuration& x) const {
    return x.n == n && ((x.bits ^ fixed_bits) & ~free_mask & full_mask(n)) == 0;
  }

  // True iff this is smaller than (contained in) `other`: every cell fixed in
  // `other` is fixed to the same value here.
  bool smaller_eq(const Subhypercube& other) const {
    if (n != other.n) return false;
    if (free_mask & ~other.free_mask) return false;
    return ((fixed_bits ^ other.fixed_bits) & ~other.free_mask) == 0;
  }

  // Vertex with all free cells at 0.
  Configuration anchor() const { return {fixed_bits, n}; }

  std::string to_string() const {
    std::string s(static_cast<std::size_t>(n), '0');
    for (int i = 0; i < n; ++i) {
      if (free_mask & bit(i))
        s[static_cast<std::size_t>(i)] = '*';
      else if (fixed_bits & bit(i))
        s[static_cast<std::size_t>(i)] = '1';
    }
    return s;
  }

  friend bool operator==(const Subhypercube&, const Subhypercube&) = default;
};

}  // namespace mpsim
