#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "mpsim/engine.hpp"
#include "mpsim/hypercube.hpp"
#include "mpsim/sampler.hpp"

namespace mpsim {

using TrapSpace = Subhypercube;

// Inclusion-minimal trap spaces with stable {0,1,*}-string identifiers.
// Members are kept sorted by identifier so ids and indices do not depend on
// enumeration order.
class AttractorSet {
 public:
  AttractorSet() = default;

  explicit AttractorSet(std::vector<TrapSpace> members)
      : members_(std::move(members)) {
    std::sort(members_.begin(), members_.end(),
              [](const TrapSpace& a, const TrapSpace& b) {
                return a.to_string() < b.to_string();
              });
    ids_.reserve(members_.size());
    for (const TrapSpace& t : members_) ids_.push_back(t.to_string());
  }

  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  const TrapSpace& operator[](std::size_t i) const { return members_[i]; }
  const std::string& id(std::size_t i) const { return ids_[i]; }
  const std::vector<TrapSpace>& members() const { return members_; }

  // Members are pairwise disjoint, so at most one can contain x.
  int find_containing(const Configuration& x) const {
    for (std::size_t i = 0; i < members_.size(); ++i)
      if (members_[i].contains(x)) return static_cast<int>(i);
    return -1;
  }

  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }

 private:
  std::vector<TrapSpace> members_;
  std::vector<std::string> ids_;
};

// h is a trap space iff every fixed component's local function is constantly
// the fixed value across the vertices of h.
inline bool is_trap_space(const Engine& engine, const Subhypercube& h) {
  int n = engine.network().size();
  for (int i = 0; i < n; ++i) {
    if (h.free_mask & bit(i)) continue;
    auto [lo, hi] = engine.value_bounds(i, h.fixed_bits, h.free_mask);
    if (lo != hi || lo != ((h.fixed_bits >> i) & 1)) return false;
  }
  return true;
}

struct TrapSpaceOptions {
  std::size_t node_budget = std::size_t{1} << 20;
};

namespace detail {

// Minimal-trap-space search: branch-and-percolate with decomposition along
// strongly connected components of the dependency graph.
//
// A call resolves the cells of `scope` (a subset of the free components)
// while everything outside the scope is background: fixed cells are
// constants, other free cells stay free. Percolation fixes any scope
// component whose local function is constant over the region (leaving such a
// component free can never be minimal) and discharges or refutes the
// `pending` components fixed by branching. A repair branch handles pending
// components whose function is still not constant: any solution must fix one
// of their free inputs in scope.
//
// On a closed region the scope is split along its dependency SCCs: a top SCC
// is self-contained (its functions read only scope cells inside it plus
// background), so its minimal completions can be enumerated independently
// and every minimal trap space factorises into minimal completions per SCC.
// An irreducible scope (a single SCC) falls back to probing every single
// fixing; if none admits a completion, keeping the whole SCC free is the
// unique minimal completion.
class TrapSpaceSearch {
 public:
  TrapSpaceSearch(const Engine& engine, TrapSpaceOptions options)
      : engine_(engine), options_(options), n_(engine.network().size()) {}

  std::vector<Subhypercube> run() {
    std::vector<Region> regions = solve(0, full_mask(n_), full_mask(n_), 0);
    std::vector<Subhypercube> out;
    out.reserve(regions.size());
    for (const Region& r : regions)
      out.push_back(Subhypercube{r.values & ~r.free, r.free, n_});
    return out;
  }

 private:
  struct Region {
    std::uint64_t values;
    Mask free;
    friend bool operator==(const Region&, const Region&) = default;
  };

  std::vector<Region> solve(std::uint64_t values, Mask free, Mask scope,
                            Mask pending) {
    if (++nodes_ > options_.node_budget)
      throw BudgetError("trap-space enumeration budget exceeded (" +
                        std::to_string(options_.node_budget) + " nodes)");
    values &= ~free;

    // Percolation to fixpoint.
    bool changed = true;
    while (changed) {
      changed = false;
      Mask probe = scope & free;
      bool pruned = false;
      for_each_bit(probe, [&](int i) {
        if (pruned || !(free & bit(i))) return;
        auto [lo, hi] = engine_.value_bounds(i, values, free);
        if (lo != hi) return;
        free &= ~bit(i);
        scope &= ~bit(i);
        values |= static_cast<Mask>(lo) << i;
        changed = true;
      });
      for_each_bit(pending, [&](int i) {
        if (pruned) return;
        auto [lo, hi] = engine_.value_bounds(i, values, free);
        if (lo != hi) return;
        if (lo != ((values >> i) & 1)) {
          pruned = true;
          return;
        }
        pending &= ~bit(i);  // constant over every smaller region too
        changed = true;
      });
      if (pruned) return {};
    }

    if (pending) {
      // Repair: every completion must fix a free scoped input of a pending
      // component. Branch on the one with the fewest candidates.
      int best = -1;
      int best_size = kMaxComponents + 1;
      for_each_bit(pending, [&](int j) {
        int size = popcount(engine_.support(j) & scope);
        if (size < best_size) {
          best = j;
          best_size = size;
        }
      });
      Mask candidates = engine_.support(best) & scope;
      if (!candidates) return {};
      return branch(values, free, scope, pending, candidates);
    }

    if (!scope) return {Region{values & ~free, free}};

    Mask component = top_scc(scope);
    if (component == scope) {
      // Irreducible: probe all single fixings; the fully-free scope is the
      // unique minimal completion iff no probe admits one.
      std::vector<Region> results = branch(values, free, scope, 0, scope);
      if (results.empty()) results.push_back(Region{values & ~free, free});
      return results;
    }

    std::vector<Region> results;
    for (const Region& t : solve(values, free, component, 0))
      for (const Region& r : solve(t.values, t.free, scope & ~component, 0))
        push_unique(results, r);
    return results;
  }

  std::vector<Region> branch(std::uint64_t values, Mask free, Mask scope,
                             Mask pending, Mask candidates) {
    std::vector<Region> results;
    for_each_bit(candidates, [&](int i) {
      for (int v = 0; v <= 1; ++v) {
        std::uint64_t child_values =
            (values & ~bit(i)) | (static_cast<Mask>(v) << i);
        for (const Region& r :
             solve(child_values, free & ~bit(i), scope & ~bit(i),
                   pending | bit(i)))
          push_unique(results, r);
      }
    });
    return results;
  }

  static void push_unique(std::vector<Region>& results, const Region& r) {
    for (const Region& existing : results)
      if (existing == r) return;
    results.push_back(r);
  }

  // Smallest source SCC of the dependency graph restricted to the scope
  // (edge j -> i when f_i reads j). A source SCC reads nothing else in scope.
  Mask top_scc(Mask scope) const {
    std::vector<Mask> components = sccs(scope);
    Mask best = 0;
    int best_size = kMaxComponents + 1;
    for (Mask c : components) {
      Mask inputs = 0;
      for_each_bit(c, [&](int i) { inputs |= engine_.support(i) & scope; });
      if (inputs & ~c) continue;
      int size = popcount(c);
      if (size < best_size) {
        best = c;
        best_size = size;
      }
    }
    return best;
  }

  // Tarjan over the scope-restricted dependency graph.
  std::vector<Mask> sccs(Mask scope) const {
    std::vector<int> nodes;
    for_each_bit(scope, [&](int i) { nodes.push_back(i); });
    std::vector<int> index(static_cast<std::size_t>(n_), -1);
    std::vector<int> low(static_cast<std::size_t>(n_), 0);
    std::vector<bool> on_stack(static_cast<std::size_t>(n_), false);
    std::vector<int> stack;
    std::vector<Mask> out;
    int counter = 0;

    // i depends on j (edge j -> i); traverse dependencies from each node.
    auto strongconnect = [&](auto&& self, int i) -> void {
      index[static_cast<std::size_t>(i)] = low[static_cast<std::size_t>(i)] = counter++;
      stack.push_back(i);
      on_stack[static_cast<std::size_t>(i)] = true;
      for_each_bit(engine_.support(i) & scope, [&](int j) {
        if (index[static_cast<std::size_t>(j)] < 0) {
          self(self, j);
          low[static_cast<std::size_t>(i)] =
              std::min(low[static_cast<std::size_t>(i)], low[static_cast<std::size_t>(j)]);
        } else if (on_stack[static_cast<std::size_t>(j)]) {
          low[static_cast<std::size_t>(i)] =
              std::min(low[static_cast<std::size_t>(i)], index[static_cast<std::size_t>(j)]);
        }
      });
      if (low[static_cast<std::size_t>(i)] == index[static_cast<std::size_t>(i)]) {
        Mask component = 0;
        for (;;) {
          int j = stack.back();
          stack.pop_back();
          on_stack[static_cast<std::size_t>(j)] = false;
          component |= bit(j);
          if (j == i) break;
        }
        out.push_back(component);
      }
    };
    for (int i : nodes)
      if (index[static_cast<std::size_t>(i)] < 0) strongconnect(strongconnect, i);
    return out;
  }

  const Engine& engine_;
  TrapSpaceOptions options_;
  int n_;
  std::size_t nodes_ = 0;
};

}  // namespace detail

inline AttractorSet minimal_trap_spaces(const Engine& engine,
                                        TrapSpaceOptions options = {}) {
  detail::TrapSpaceSearch search(engine, options);
  return AttractorSet(search.run());
}

// Keeps the attractors still inside the smallest trap space around x: once
// the walk has entered a region, attractors outside it can no longer be
// reached, so the candidate set only ever shrinks along a trajectory.
inline AttractorSet filter_reachable_attractors(const AttractorSet& attractors,
                                                const Engine& engine,
                                                const Configuration& x) {
  Subhypercube region = engine.closure(x);
  std::vector<TrapSpace> kept;
  for (const TrapSpace& a : attractors)
    if (a.smaller_eq(region)) kept.push_back(a);
  return AttractorSet(std::move(kept));
}

inline bool in_attractor(const Configuration& x, const AttractorSet& attractors) {
  return attractors.find_containing(x) >= 0;
}

struct AttractorSample {
  int attractor = -1;  // index into the AttractorSet, -1 if not converged
  long steps = 0;
  bool converged = false;
};

// Walk until the current configuration lies inside an attractor, testing
// membership every check-interval steps.
inline AttractorSample sample_reachable_attractor(const Engine& engine,
                                                  const AttractorSet& attractors,
                                                  const Configuration& x0,
                                                  const SimulationParams& params,
                                                  RandomStream& rng) {
  AttractorSample out;
  int idx = attractors.find_containing(x0);
  if (idx >= 0) return {idx, 0, true};
  int interval = params.resolved_check_interval(x0.n);
  Configuration x = x0;
  for (long step = 1; step <= params.max_steps; ++step) {
    x = sample_next_configuration(engine, x, params, rng);
    if (step % interval == 0) {
      idx = attractors.find_containing(x);
      if (idx >= 0) return {idx, step, true};
    }
  }
  return out;
}

// Strong-basin variant: keep the set of attractors still reachable from the
// current configuration and stop as soon as exactly one remains. Terminates
// earlier than membership testing since entering a strong basin suffices.
inline AttractorSample sample_reachable_attractor_bis(
    const Engine& engine, const AttractorSet& attractors,
    const Configuration& x0, const SimulationParams& params,
    RandomStream& rng) {
  auto resolve = [&](const AttractorSet& current) {
    // Map back to the index in the full set via the identifier.
    for (std::size_t i = 0; i < attractors.size(); ++i)
      if (attractors.id(i) == current.id(0)) return static_cast<int>(i);
    return -1;
  };
  AttractorSet current = filter_reachable_attractors(attractors, engine, x0);
  if (current.empty())
    throw std::logic_error("no attractor inside the closure of " +
                           x0.to_string());
  if (current.size() == 1) return {resolve(current), 0, true};
  int interval = params.resolved_check_interval(x0.n);
  Configuration x = x0;
  for (long step = 1; step <= params.max_steps; ++step) {
    x = sample_next_configuration(engine, x, params, rng);
    if (step % interval == 0) {
      current = filter_reachable_attractors(current, engine, x);
      if (current.empty())
        throw std::logic_error("attractor filter emptied at " + x.to_string());
      if (current.size() == 1) return {resolve(current), step, true};
    }
  }
  return {};
}

// Sampling-based attractor statistics require every attractor of the sampled
// dynamics to coincide with a minimal trap space. Sufficient: the parameters
// cover the full dynamics (depth n reachable, strictly positive weights), or
// no cyclic attractor exists (all minimal trap spaces are single
// configurations).
inline bool sampling_matches_attractors(const AttractorSet& attractors,
                                        const SimulationParams& params, int n) {
  if (params.depth.reaches(n) && params.weights.strictly_positive()) return true;
  for (const TrapSpace& t : attractors)
    if (t.rank() > 0) return false;
  return true;
}

struct PropensityEstimate {
  std::vector<std::uint64_t> counts;  // per attractor index
  std::uint64_t non_converged = 0;
  std::uint64_t runs = 0;

  std::uint64_t converged() const { return runs - non_converged; }

  // Fractions over converged runs; sums to 1 when any run converged.
  std::vector<double> fractions() const {
    std::vector<double> out(counts.size(), 0.0);
    std::uint64_t denom = converged();
    if (denom == 0) return out;
    for (std::size_t i = 0; i < counts.size(); ++i)
      out[i] = static_cast<double>(counts[i]) / static_cast<double>(denom);
    return out;
  }
};

// Independent attractor samples with per-run streams derived from the master
// seed and the run index; results do not depend on the worker count or on
// scheduling, only on (model, params, seed, runs).
inline PropensityEstimate estimate_propensities(
    const Engine& engine, const AttractorSet& attractors,
    const Configuration& x0, const SimulationParams& params,
    std::uint64_t runs, std::uint64_t master_seed, unsigned workers = 1) {
  if (runs < 1) throw UsageError("runs must be >= 1");
  if (workers < 1) workers = 1;
  if (workers > runs) workers = static_cast<unsigned>(runs);

  auto one_run = [&](std::uint64_t run_index,
                     std::vector<std::uint64_t>& counts,
                     std::uint64_t& non_converged) {
    RandomStream rng = RandomStream::derive(master_seed, run_index);
    AttractorSample sample;
    switch (params.stop) {
      case StopPolicy::kStrongBasin:
        sample = sample_reachable_attractor_bis(engine, attractors, x0, params, rng);
        break;
      case StopPolicy::kAttractor:
        sample = sample_reachable_attractor(engine, attractors, x0, params, rng);
        break;
      case StopPolicy::kMaxSteps: {
        // Fixed-length walk; credit the final configuration if it happens to
        // sit inside an attractor.
        Configuration x = x0;
        for (long step = 1; step <= params.max_steps; ++step)
          x = sample_next_configuration(engine, x, params, rng);
        int idx = attractors.find_containing(x);
        sample = {idx, params.max_steps, idx >= 0};
        break;
      }
    }
    if (sample.converged)
      ++counts[static_cast<std::size_t>(sample.attractor)];
    else
      ++non_converged;
  };

  PropensityEstimate estimate;
  estimate.runs = runs;
  estimate.counts.assign(attractors.size(), 0);

  if (workers == 1) {
    for (std::uint64_t r = 0; r < runs; ++r)
      one_run(r, estimate.counts, estimate.non_converged);
    return estimate;
  }

  std::vector<std::vector<std::uint64_t>> counts(
      workers, std::vector<std::uint64_t>(attractors.size(), 0));
  std::vector<std::uint64_t> non_converged(workers, 0);
  std::vector<std::thread> threads;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (unsigned w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (std::uint64_t r = w; r < runs; r += workers)
          one_run(r, counts[w], non_converged[w]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
  for (unsigned w = 0; w < workers; ++w) {
    for (std::size_t i = 0; i < attractors.size(); ++i)
      estimate.counts[i] += counts[w][i];
    estimate.non_converged += non_converged[w];
  }
  return estimate;
}

}  // namespace mpsim
