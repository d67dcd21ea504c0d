#pragma once

// Brute-force reference implementations used to certify the engine at desk
// scale. Everything here enumerates configurations exhaustively and shares no
// algorithmic code with the engine or the sampler: flip tests evaluate every
// vertex instead of consulting the influence graph, trap spaces come from
// scanning all 3^n sub-hypercubes, and step distributions are built
// analytically instead of sampled.

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mpsim/attractors.hpp"
#include "mpsim/bits.hpp"
#include "mpsim/errors.hpp"
#include "mpsim/hypercube.hpp"
#include "mpsim/network.hpp"
#include "mpsim/params.hpp"

namespace mpsim::oracle {

namespace detail {

// Truth tables of every local function over all 2^n configurations.
class TruthTable {
 public:
  explicit TruthTable(const Network& net) : n_(net.size()) {
    if (n_ > 20) throw BudgetError("truth table too large: n = " + std::to_string(n_));
    std::uint64_t count = std::uint64_t{1} << n_;
    table_.assign(static_cast<std::size_t>(n_), std::vector<std::uint8_t>(count));
    for (std::uint64_t x = 0; x < count; ++x)
      for (int i = 0; i < n_; ++i)
        table_[static_cast<std::size_t>(i)][x] = net.eval_component(i, x) ? 1 : 0;
  }

  int n() const { return n_; }
  bool value(int i, std::uint64_t x) const {
    return table_[static_cast<std::size_t>(i)][x] != 0;
  }

  // Does f_i attain `v` on some vertex of (anchor with `free` free)?
  bool attains(int i, std::uint64_t anchor, Mask free, bool v) const {
    std::uint64_t base = anchor & ~free;
    Mask sub = free;
    for (;;) {
      if (value(i, base | sub) == v) return true;
      if (sub == 0) return false;
      sub = (sub - 1) & free;
    }
  }

 private:
  int n_;
  std::vector<std::vector<std::uint8_t>> table_;
};

// Smallest K-closed sub-hypercube containing x, by fixed-point iteration:
// free any component of K whose function leaves its fixed value somewhere.
inline Mask k_closure(const TruthTable& tt, std::uint64_t x, Mask k_set) {
  Mask free = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    for_each_bit(k_set & ~free, [&](int i) {
      bool xi = (x >> i) & 1;
      if (tt.attains(i, x, free, !xi)) {
        free |= bit(i);
        changed = true;
      }
    });
  }
  return free;
}

}  // namespace detail

// All y with a transition x -> y: some K whose closure contains y as a vertex
// and witnesses every K-component's new value. Includes the self-loop y = x
// (witnessed by K = empty set).
inline std::vector<Configuration> mp_successors_bruteforce(const Network& net,
                                                           const Configuration& x,
                                                           int cap = 14) {
  int n = net.size();
  if (n > cap)
    throw BudgetError("brute-force relation capped at n = " + std::to_string(cap));
  detail::TruthTable tt(net);
  std::vector<bool> reached(std::size_t{1} << n, false);
  for (Mask k_set = 0;; ++k_set) {
    Mask free = detail::k_closure(tt, x.bits, k_set);
    // Values each K-component can take anywhere on the closure.
    Mask can_be_one = 0;
    Mask can_be_zero = 0;
    for_each_bit(k_set, [&](int i) {
      if (tt.attains(i, x.bits, free, true)) can_be_one |= bit(i);
      if (tt.attains(i, x.bits, free, false)) can_be_zero |= bit(i);
    });
    std::uint64_t base = x.bits & ~free;
    Mask sub = free;
    for (;;) {
      std::uint64_t y = base | sub;
      bool ok = true;
      for_each_bit(k_set, [&](int i) {
        bool yi = (y >> i) & 1;
        if (yi ? !(can_be_one & bit(i)) : !(can_be_zero & bit(i))) ok = false;
      });
      if (ok) reached[y] = true;
      if (sub == 0) break;
      sub = (sub - 1) & free;
    }
    if (k_set == full_mask(n)) break;
  }
  std::vector<Configuration> out;
  for (std::uint64_t y = 0; y < (std::uint64_t{1} << n); ++y)
    if (reached[y]) out.push_back({y, n});
  return out;
}

// y != x differing exactly on a nonempty set of components that all take
// their image value f_i(x).
inline std::vector<Configuration> async_successors(const Network& net,
                                                   const Configuration& x) {
  Configuration fx = net.apply(x);
  Mask changable = delta(x, fx);
  std::vector<Configuration> out;
  for (Mask sub = changable; sub; sub = (sub - 1) & changable)
    out.push_back({x.bits ^ sub, x.n});
  std::sort(out.begin(), out.end(),
            [](const Configuration& a, const Configuration& b) {
              return a.bits < b.bits;
            });
  return out;
}

inline std::vector<Configuration> fully_async_successors(const Network& net,
                                                         const Configuration& x) {
  Configuration fx = net.apply(x);
  std::vector<Configuration> out;
  for_each_bit(delta(x, fx), [&](int i) { out.push_back({x.bits ^ bit(i), x.n}); });
  return out;
}

struct TransitionRelation {
  int n = 0;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;
};

inline TransitionRelation mp_relation(const Network& net, int cap = 14) {
  TransitionRelation rel;
  rel.n = net.size();
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << rel.n); ++x)
    for (const Configuration& y :
         mp_successors_bruteforce(net, {x, rel.n}, cap))
      if (y.bits != x) rel.pairs.emplace_back(x, y.bits);
  return rel;
}

inline TransitionRelation async_relation(const Network& net, int cap = 14) {
  TransitionRelation rel;
  rel.n = net.size();
  if (rel.n > cap)
    throw BudgetError("relation capped at n = " + std::to_string(cap));
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << rel.n); ++x)
    for (const Configuration& y : async_successors(net, {x, rel.n}))
      rel.pairs.emplace_back(x, y.bits);
  return rel;
}

inline TransitionRelation fully_async_relation(const Network& net, int cap = 14) {
  TransitionRelation rel;
  rel.n = net.size();
  if (rel.n > cap)
    throw BudgetError("relation capped at n = " + std::to_string(cap));
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << rel.n); ++x)
    for (const Configuration& y : fully_async_successors(net, {x, rel.n}))
      rel.pairs.emplace_back(x, y.bits);
  return rel;
}

// Scan all 3^n sub-hypercubes, keep the closed ones, keep the
// inclusion-minimal ones. Processing by ascending rank means a closed h is
// minimal iff no already-kept member sits inside it.
inline AttractorSet trap_spaces_bruteforce(const Network& net, int cap = 10) {
  int n = net.size();
  if (n > cap)
    throw BudgetError("brute-force trap spaces capped at n = " +
                      std::to_string(cap));
  detail::TruthTable tt(net);
  std::vector<Subhypercube> closed;
  for (Mask free = 0;; ++free) {
    Mask fixed_positions = full_mask(n) & ~free;
    std::uint64_t base = fixed_positions;  // iterate sub-bits of the fixed set
    Mask values = fixed_positions;
    for (;;) {
      // `values` ranges over all assignments of the fixed positions.
      bool ok = true;
      for_each_bit(fixed_positions, [&](int i) {
        if (!ok) return;
        bool hi = (values >> i) & 1;
        if (tt.attains(i, values, free, !hi)) ok = false;
      });
      if (ok) closed.push_back(Subhypercube{values, free, n});
      if (values == 0) break;
      values = (values - 1) & base;
    }
    if (free == full_mask(n)) break;
  }
  std::sort(closed.begin(), closed.end(),
            [](const Subhypercube& a, const Subhypercube& b) {
              return a.rank() < b.rank();
            });
  std::vector<Subhypercube> minimal;
  for (const Subhypercube& h : closed) {
    bool has_smaller = false;
    for (const Subhypercube& m : minimal)
      if (m.smaller_eq(h)) {
        has_smaller = true;
        break;
      }
    if (!has_smaller) minimal.push_back(h);
  }
  return AttractorSet(std::move(minimal));
}

namespace detail {

// Reachable spaces per the published worklist, with flip tests done by
// exhaustive vertex enumeration (assumption-free, works for non-monotone
// functions).
struct BruteSpace {
  Mask flippable = 0;
  Mask forced = 0;
};

inline Mask brute_spread(const TruthTable& tt, std::uint64_t x, Mask k_set,
                         int depth) {
  Mask free = 0;
  Mask remaining = k_set;
  for (int round = 0; round < depth && remaining; ++round) {
    Mask found = 0;
    for_each_bit(remaining, [&](int i) {
      bool xi = (x >> i) & 1;
      if (tt.attains(i, x, free, !xi)) found |= bit(i);
    });
    if (!found) break;
    free |= found;
    remaining &= ~free;
  }
  return free;
}

inline std::vector<BruteSpace> brute_spaces(const TruthTable& tt,
                                            std::uint64_t x, int depth) {
  std::vector<BruteSpace> out;
  std::vector<Mask> queue{full_mask(tt.n())};
  std::vector<Mask> seen{full_mask(tt.n())};
  std::size_t head = 0;
  while (head < queue.size()) {
    Mask key = queue[head++];
    Mask flippable = brute_spread(tt, x, key, depth);
    Mask forced = 0;
    if (depth > 1) {
      for_each_bit(flippable, [&](int i) {
        bool xi = (x >> i) & 1;
        if (!tt.attains(i, x, flippable, xi)) forced |= bit(i);
      });
    }
    for (Mask m = forced; m; m = (m - 1) & forced) {
      Mask next = key & ~m;
      if (std::find(seen.begin(), seen.end(), next) == seen.end()) {
        seen.push_back(next);
        queue.push_back(next);
      }
    }
    out.push_back({flippable, forced});
  }
  return out;
}

// Exact distribution of the next configuration from x, marginalised over the
// depth distribution. The self-loop mass (zero total rate at a depth) stays
// on x.
inline std::map<std::uint64_t, double> step_distribution(
    const TruthTable& tt, std::uint64_t x, const std::vector<double>& depth_probs,
    const WeightVector& weights, LRowMode mode) {
  std::map<std::uint64_t, double> dist;
  for (int d = 1; d <= static_cast<int>(depth_probs.size()); ++d) {
    double pd = depth_probs[static_cast<std::size_t>(d - 1)];
    if (pd <= 0) continue;
    std::vector<BruteSpace> spaces = brute_spaces(tt, x, d);
    double total = 0;
    std::vector<std::vector<double>> rates;
    for (const BruteSpace& s : spaces) {
      int l = popcount(s.forced);
      int h = popcount(s.flippable);
      std::vector<double> row(static_cast<std::size_t>(tt.n()) + 1, 0.0);
      if (l > 0)
        row[static_cast<std::size_t>(l)] =
            (mode == LRowMode::kListing ? l : 1) * weights.weight(l);
      for (int m = l + 1; m <= h; ++m)
        row[static_cast<std::size_t>(m)] =
            static_cast<double>(binomial_checked(h - l, m - l)) *
            weights.weight(m);
      for (double r : row) total += r;
      rates.push_back(std::move(row));
    }
    if (total <= 0) {
      dist[x] += pd;
      continue;
    }
    for (std::size_t si = 0; si < spaces.size(); ++si) {
      const BruteSpace& s = spaces[si];
      int l = popcount(s.forced);
      Mask optional = s.flippable & ~s.forced;
      Mask sub = optional;
      for (;;) {
        Mask flips = s.forced | sub;
        if (flips) {
          int m = popcount(flips);
          double cell = rates[si][static_cast<std::size_t>(m)];
          if (cell > 0) {
            double share =
                cell / static_cast<double>(binomial_checked(
                           popcount(optional), m - l));
            dist[x ^ flips] += pd * share / total;
          }
        }
        if (sub == 0) break;
        sub = (sub - 1) & optional;
      }
    }
  }
  return dist;
}

}  // namespace detail

struct ExactPropensities {
  AttractorSet attractors;
  std::vector<double> probabilities;  // aligned with attractors
};

// Absorption probabilities of the sampled walk into each attractor, by
// solving the linear system of the absorbing chain over all configurations.
// States inside an attractor are absorbing (trap spaces are closed, so the
// walk cannot leave them).
inline ExactPropensities exact_propensities(const Network& net,
                                            const Configuration& x0,
                                            const DepthDistribution& depth,
                                            const WeightVector& weights,
                                            LRowMode mode = LRowMode::kListing,
                                            int cap = 10) {
  int n = net.size();
  if (n > cap)
    throw BudgetError("exact propensities capped at n = " + std::to_string(cap));
  detail::TruthTable tt(net);
  ExactPropensities out;
  out.attractors = trap_spaces_bruteforce(net, cap);
  std::size_t a_count = out.attractors.size();
  std::vector<double> depth_probs = depth.probabilities(n);

  std::uint64_t state_count = std::uint64_t{1} << n;
  std::vector<int> absorbing_into(static_cast<std::size_t>(state_count), -1);
  std::vector<std::uint64_t> transient;
  std::vector<int> transient_index(static_cast<std::size_t>(state_count), -1);
  for (std::uint64_t s = 0; s < state_count; ++s) {
    absorbing_into[s] = out.attractors.find_containing({s, n});
    if (absorbing_into[s] < 0) {
      transient_index[s] = static_cast<int>(transient.size());
      transient.push_back(s);
    }
  }

  if (absorbing_into[x0.bits] >= 0) {
    out.probabilities.assign(a_count, 0.0);
    out.probabilities[static_cast<std::size_t>(absorbing_into[x0.bits])] = 1.0;
    return out;
  }

  // (I - Q) P = B, one right-hand side per attractor.
  std::size_t t_count = transient.size();
  std::vector<std::vector<double>> matrix(
      t_count, std::vector<double>(t_count + a_count, 0.0));
  for (std::size_t r = 0; r < t_count; ++r) {
    matrix[r][r] = 1.0;
    auto dist = detail::step_distribution(tt, transient[r], depth_probs,
                                          weights, mode);
    for (const auto& [y, p] : dist) {
      int a = absorbing_into[y];
      if (a >= 0)
        matrix[r][t_count + static_cast<std::size_t>(a)] += p;
      else
        matrix[r][static_cast<std::size_t>(transient_index[y])] -= p;
    }
  }

  // Gaussian elimination with partial pivoting.
  for (std::size_t col = 0; col < t_count; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < t_count; ++r)
      if (std::abs(matrix[r][col]) > std::abs(matrix[pivot][col])) pivot = r;
    if (std::abs(matrix[pivot][col]) < 1e-12)
      throw std::logic_error(
          "absorbing-chain system is singular: the sampled dynamics has a "
          "recurrent class outside every attractor");
    std::swap(matrix[col], matrix[pivot]);
    double inv = 1.0 / matrix[col][col];
    for (std::size_t c = col; c < t_count + a_count; ++c) matrix[col][c] *= inv;
    for (std::size_t r = 0; r < t_count; ++r) {
      if (r == col) continue;
      double factor = matrix[r][col];
      if (factor == 0) continue;
      for (std::size_t c = col; c < t_count + a_count; ++c)
        matrix[r][c] -= factor * matrix[col][c];
    }
  }

  std::size_t row = static_cast<std::size_t>(transient_index[x0.bits]);
  out.probabilities.assign(a_count, 0.0);
  for (std::size_t a = 0; a < a_count; ++a)
    out.probabilities[a] = matrix[row][t_count + a];
  return out;
}

}  // namespace mpsim::oracle
