#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "mpsim/bits.hpp"
#include "mpsim/errors.hpp"
#include "mpsim/hypercube.hpp"
#include "mpsim/network.hpp"
#include "mpsim/rng.hpp"

namespace mpsim {

struct EngineOptions {
  // Upper bound on the number of spaces one anchor may generate. The bound
  // aborts instead of truncating: a truncated space set would silently drop
  // transitions.
  std::size_t max_spaces = std::size_t{1} << 20;
  // Cap on exhaustive enumerations (influence signs, ambiguous-variable
  // fallback in flip tests).
  int fanin_cap = 24;
};

// One K-closure of the anchor, reduced to the sets that matter for
// transition generation: `flippable` (the free components, H) and `forced`
// (the subset that can never return to the anchor value, L). Every generated
// transition flips all of `forced` plus any nonempty-by-m choice from
// `flippable \ forced`.
struct Space {
  Mask key = 0;        // the component set K this closure was computed for
  Mask flippable = 0;  // H
  Mask forced = 0;     // L, subset of H
};

class SpaceSet {
 public:
  SpaceSet(Configuration anchor, int depth)
      : anchor_(anchor), depth_(depth) {}

  const Configuration& anchor() const { return anchor_; }
  int depth() const { return depth_; }
  std::size_t size() const { return spaces_.size(); }
  bool empty() const { return spaces_.empty(); }
  const Space& operator[](std::size_t i) const { return spaces_[i]; }
  const std::vector<Space>& spaces() const { return spaces_; }
  void push(Space s) { spaces_.push_back(s); }

  auto begin() const { return spaces_.begin(); }
  auto end() const { return spaces_.end(); }

 private:
  Configuration anchor_;
  int depth_;
  std::vector<Space> spaces_;
};

// Number of transitions of a space that flip exactly m components.
inline std::uint64_t transition_count(const Space& s, int m) {
  int l = popcount(s.forced);
  int h = popcount(s.flippable);
  if (m < 1 || m < l || m > h) return 0;
  return binomial_checked(h - l, m - l);
}

inline std::uint64_t total_transition_count(const Space& s) {
  int l = popcount(s.forced);
  int h = popcount(s.flippable);
  std::uint64_t total = 0;
  for (int m = std::max(1, l); m <= h; ++m) {
    std::uint64_t c = transition_count(s, m);
    if (total > ~std::uint64_t{0} - c)
      throw BudgetError("transition count exceeds 64 bits");
    total += c;
  }
  return total;
}

// Uniformly chosen flip set of size m: all of `forced` plus a random
// (m - |forced|)-subset of the remaining flippable components, via a partial
// Fisher-Yates over the expanded index list.
inline Mask sample_flip_mask(const Space& s, int m, RandomStream& rng) {
  int l = popcount(s.forced);
  int h = popcount(s.flippable);
  if (m < 1 || m < l || m > h)
    throw UsageError("flip size " + std::to_string(m) + " out of range for |L|=" +
                     std::to_string(l) + ", |H|=" + std::to_string(h));
  std::array<int, kMaxComponents> idx{};
  int count = 0;
  for_each_bit(s.flippable & ~s.forced, [&](int i) { idx[static_cast<std::size_t>(count++)] = i; });
  Mask flips = s.forced;
  for (int t = 0; t < m - l; ++t) {
    int j = t + static_cast<int>(rng.below(static_cast<std::uint64_t>(count - t)));
    std::swap(idx[static_cast<std::size_t>(t)], idx[static_cast<std::size_t>(j)]);
    flips |= bit(idx[static_cast<std::size_t>(t)]);
  }
  return flips;
}

// Visits every target configuration of a space (all flip sizes m >= 1).
// Exponential in |H \ L|; callers guard with transition counts first.
template <typename Fn>
void enumerate_transitions(const Configuration& x, const Space& s, Fn&& fn) {
  Mask optional = s.flippable & ~s.forced;
  Mask sub = optional;
  for (;;) {
    Mask flips = s.forced | sub;
    if (flips != 0) fn(Configuration{x.bits ^ flips, x.n});
    if (sub == 0) break;
    sub = (sub - 1) & optional;
  }
}

// Flip tests, closure spreading and reachable-space enumeration.
//
// Flip tests run in constant time per call on locally monotone inputs by
// evaluating the local function at an extreme vertex built from the influence
// graph. Components influencing a target with both signs cannot be extremised
// independently; those are enumerated exhaustively (the hook to replace with
// an external decision procedure if a model ever needs it).
class Engine {
 public:
  explicit Engine(const Network& net, EngineOptions options = {})
      : net_(&net), options_(options), graph_(influence_graph(net, options.fanin_cap)) {
    int n = net.size();
    support_.resize(static_cast<std::size_t>(n));
    pure_positive_.resize(static_cast<std::size_t>(n));
    pure_negative_.resize(static_cast<std::size_t>(n));
    ambiguous_.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      Mask pos = graph_.positive[static_cast<std::size_t>(i)];
      Mask neg = graph_.negative[static_cast<std::size_t>(i)];
      support_[static_cast<std::size_t>(i)] = net.local(i).support();
      pure_positive_[static_cast<std::size_t>(i)] = pos & ~neg;
      pure_negative_[static_cast<std::size_t>(i)] = neg & ~pos;
      ambiguous_[static_cast<std::size_t>(i)] = pos & neg;
    }
  }

  const Network& network() const { return *net_; }
  const InfluenceGraph& influences() const { return graph_; }
  const EngineOptions& options() const { return options_; }
  bool locally_monotone() const { return graph_.locally_monotone(); }

  // Vertex of (x with `free` free) minimising f_i, by the sign construction:
  // positive influencers dropped to 0, negative raised to 1, everything else
  // kept at x. Only valid when no influencer of i in `free` is ambiguous.
  std::uint64_t min_vertex(int i, std::uint64_t bits, Mask free) const {
    return (bits & ~(free & pure_positive_[static_cast<std::size_t>(i)])) |
           (free & pure_negative_[static_cast<std::size_t>(i)]);
  }

  std::uint64_t max_vertex(int i, std::uint64_t bits, Mask free) const {
    return (bits | (free & pure_positive_[static_cast<std::size_t>(i)])) &
           ~(free & pure_negative_[static_cast<std::size_t>(i)]);
  }

  bool min_value(int i, std::uint64_t bits, Mask free) const {
    Mask amb = free & ambiguous_[static_cast<std::size_t>(i)];
    if (!amb) return net_->eval_component(i, min_vertex(i, bits, free));
    bool lo = true;
    enumerate_ambiguous(i, min_vertex(i, bits, free), amb, [&](std::uint64_t z) {
      if (!net_->eval_component(i, z)) lo = false;
      return lo;  // stop once a 0 is found
    });
    return lo;
  }

  bool max_value(int i, std::uint64_t bits, Mask free) const {
    Mask amb = free & ambiguous_[static_cast<std::size_t>(i)];
    if (!amb) return net_->eval_component(i, max_vertex(i, bits, free));
    bool hi = false;
    enumerate_ambiguous(i, max_vertex(i, bits, free), amb, [&](std::uint64_t z) {
      if (net_->eval_component(i, z)) hi = true;
      return !hi;
    });
    return hi;
  }

  // (min, max) of f_i over the sub-hypercube (bits with `free` free).
  std::pair<bool, bool> value_bounds(int i, std::uint64_t bits, Mask free) const {
    return {min_value(i, bits, free), max_value(i, bits, free)};
  }

  // True iff some vertex z of (x with `free` free) has f_i(z) != v.
  bool can_flip(const Configuration& x, int i, Mask free, bool v) const {
    return v ? !min_value(i, x.bits, free) : max_value(i, x.bits, free);
  }

  // Runs `depth` rounds of closure spreading over the candidate set K: each
  // round frees every remaining candidate whose local function can leave its
  // anchor value somewhere in the current sub-hypercube. Rounds use the set
  // of free components as it stood when the round started. Stops early once
  // stable (extra rounds cannot add components).
  Mask spread(const Configuration& x, Mask candidates, int depth) const {
    check_depth(depth);
    Mask free = 0;
    Mask remaining = candidates & full_mask(net_->size());
    for (int round = 0; round < depth && remaining; ++round) {
      Mask found = 0;
      for_each_bit(remaining, [&](int i) {
        if (can_flip(x, i, free, x.get(i))) found |= bit(i);
      });
      if (!found) break;
      free |= found;
      remaining &= ~free;
    }
    return free;
  }

  // Subset of `flippable` whose local function never returns to the anchor
  // value anywhere in the sub-hypercube: flipping them cannot be undone while
  // staying inside it.
  Mask irreversible(const Configuration& x, Mask flippable) const {
    Mask out = 0;
    for_each_bit(flippable, [&](int i) {
      if (!can_flip(x, i, flippable, !x.get(i))) out |= bit(i);
    });
    return out;
  }

  // Worklist enumeration of the spaces reachable from x at the given depth.
  // Starting from K = all components, each processed key K yields (H, L);
  // whenever L is nonempty, every key K \ M for nonempty M subset of L is
  // queued, so transitions that keep some forced component at its anchor
  // value are recovered from smaller closures.
  SpaceSet reachable_spaces(const Configuration& x, int depth) const {
    check_depth(depth);
    SpaceSet out(x, depth);
    std::deque<Mask> queue;
    std::unordered_set<Mask> seen;
    Mask all = full_mask(net_->size());
    queue.push_back(all);
    seen.insert(all);
    int max_forced = 0;
    while (!queue.empty()) {
      Mask key = queue.front();
      queue.pop_front();
      Mask flippable = spread(x, key, depth);
      Mask forced = depth > 1 ? irreversible(x, flippable) : 0;
      max_forced = std::max(max_forced, popcount(forced));
      for (Mask m = forced; m; m = (m - 1) & forced) {
        Mask next = key & ~m;
        if (seen.insert(next).second) {
          if (seen.size() > options_.max_spaces)
            throw BudgetError(
                "space explosion from anchor " + x.to_string() + ": more than " +
                std::to_string(options_.max_spaces) +
                " spaces; largest irreversible set so far has " +
                std::to_string(max_forced) + " components");
          queue.push_back(next);
        }
      }
      out.push({key, flippable, forced});
    }
    return out;
  }

  // Smallest trap space containing x: the full-component closure at depth n.
  Subhypercube closure(const Configuration& x) const {
    return Subhypercube::of(x, spread(x, full_mask(net_->size()), net_->size()));
  }

 public:
  Mask support(int i) const { return support_[static_cast<std::size_t>(i)]; }

 private:
  // Walks the vertices reachable by assigning the ambiguous variables while
  // the rest stay at the given extreme vertex. `fn` returns false to stop.
  template <typename Fn>
  void enumerate_ambiguous(int i, std::uint64_t extreme, Mask amb,
                           Fn&& fn) const {
    int k = popcount(amb);
    if (k > options_.fanin_cap)
      throw BudgetError("ambiguous fan-in too large for " + net_->name(i) +
                        ": " + std::to_string(k) + " (cap " +
                        std::to_string(options_.fanin_cap) + ")");
    std::array<int, kMaxComponents> vars{};
    int count = 0;
    for_each_bit(amb, [&](int j) { vars[static_cast<std::size_t>(count++)] = j; });
    std::uint64_t base = extreme & ~amb;
    for (std::uint64_t a = 0; a < (std::uint64_t{1} << k); ++a) {
      std::uint64_t z = base;
      for (int p = 0; p < k; ++p)
        if ((a >> p) & 1) z |= bit(vars[static_cast<std::size_t>(p)]);
      if (!fn(z)) return;
    }
  }

  void check_depth(int depth) const {
    if (depth < 1 || depth > net_->size())
      throw UsageError("depth " + std::to_string(depth) + " out of range 1.." +
                       std::to_string(net_->size()));
  }

  const Network* net_;
  EngineOptions options_;
  InfluenceGraph graph_;
  std::vector<Mask> support_;
  std::vector<Mask> pure_positive_;
  std::vector<Mask> pure_negative_;
  std::vector<Mask> ambiguous_;
};

}  // namespace mpsim
