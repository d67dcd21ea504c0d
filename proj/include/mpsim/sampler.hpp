#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mpsim/engine.hpp"
#include "mpsim/params.hpp"
#include "mpsim/rng.hpp"

namespace mpsim {

// Apparent rates per (space, flip size). rows[s][m] for m = 1..n; index 0 is
// unused. Binomial counts are computed exactly in integers, weights enter
// once when the double is formed.
struct RateMatrix {
  std::vector<std::vector<double>> rows;
  double total = 0;
};

inline RateMatrix transition_rates(const SpaceSet& spaces,
                                   const WeightVector& weights,
                                   LRowMode mode = LRowMode::kListing) {
  int n = spaces.anchor().n;
  RateMatrix rates;
  rates.rows.reserve(spaces.size());
  for (const Space& s : spaces) {
    std::vector<double> row(static_cast<std::size_t>(n) + 1, 0.0);
    int l = popcount(s.forced);
    int h = popcount(s.flippable);
    if (l > 0) {
      double factor = mode == LRowMode::kListing ? static_cast<double>(l) : 1.0;
      row[static_cast<std::size_t>(l)] = factor * weights.weight(l);
    }
    for (int m = l + 1; m <= h; ++m)
      row[static_cast<std::size_t>(m)] =
          static_cast<double>(binomial_checked(h - l, m - l)) *
          weights.weight(m);
    for (int m = 1; m <= n; ++m) rates.total += row[static_cast<std::size_t>(m)];
    rates.rows.push_back(std::move(row));
  }
  return rates;
}

struct StepSample {
  Configuration next;
  int depth = 0;             // depth drawn for this step
  std::size_t space_count = 0;
  bool moved = false;        // false: zero total rate at the drawn depth
};

// One sampling step: draw a depth, enumerate the reachable spaces, build the
// rate matrix, then pick (space, flip size) by a cumulative scan in space
// insertion order with ascending flip size, and flip a uniformly chosen set.
inline StepSample sample_step(const Engine& engine, const Configuration& x,
                              const SimulationParams& params,
                              RandomStream& rng) {
  int depth = params.depth.draw(rng);
  SpaceSet spaces = engine.reachable_spaces(x, depth);
  RateMatrix rates = transition_rates(spaces, params.weights, params.l_row_mode);
  StepSample out{x, depth, spaces.size(), false};
  if (rates.total <= 0) return out;  // fixed point at this depth
  double r = rng.real01() * rates.total;
  double acc = 0;
  std::size_t chosen_space = spaces.size() - 1;
  int chosen_m = 0;
  bool found = false;
  for (std::size_t s = 0; s < spaces.size() && !found; ++s) {
    const auto& row = rates.rows[s];
    for (int m = 1; m < static_cast<int>(row.size()); ++m) {
      double cell = row[static_cast<std::size_t>(m)];
      if (cell <= 0) continue;
      acc += cell;
      chosen_space = s;
      chosen_m = m;
      if (r < acc) {
        found = true;
        break;
      }
    }
  }
  // Rounding may leave r a hair past the last cell; the scan then keeps the
  // final positive cell, which is the correct limit behaviour.
  Mask flips = sample_flip_mask(spaces[chosen_space], chosen_m, rng);
  out.next = Configuration{x.bits ^ flips, x.n};
  out.moved = true;
  return out;
}

inline Configuration sample_next_configuration(const Engine& engine,
                                               const Configuration& x,
                                               const SimulationParams& params,
                                               RandomStream& rng) {
  return sample_step(engine, x, params, rng).next;
}

enum class StopReason { kAttractor, kStrongBasin, kMaxSteps };

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::kAttractor:
      return "attractor";
    case StopReason::kStrongBasin:
      return "strong-basin";
    case StopReason::kMaxSteps:
      return "max-steps";
  }
  return "?";
}

struct Trajectory {
  std::vector<Configuration> states;  // visited configurations, x0 first
  StopReason reason = StopReason::kMaxSteps;
  long steps = 0;
};

// Walks until the stop condition fires (checked on the initial configuration
// and then every check-interval steps) or max_steps is exhausted. The stop
// condition may keep state; it is probed with the current configuration.
template <typename StopFn>
Trajectory simulate_trajectory(const Engine& engine, const Configuration& x0,
                               const SimulationParams& params,
                               RandomStream& rng, StopFn&& stop,
                               StopReason fired_reason) {
  Trajectory traj;
  traj.states.push_back(x0);
  if (stop(x0)) {
    traj.reason = fired_reason;
    return traj;
  }
  int interval = params.resolved_check_interval(x0.n);
  Configuration x = x0;
  for (long step = 1; step <= params.max_steps; ++step) {
    x = sample_next_configuration(engine, x, params, rng);
    traj.states.push_back(x);
    traj.steps = step;
    if (step % interval == 0 && stop(x)) {
      traj.reason = fired_reason;
      return traj;
    }
  }
  traj.reason = StopReason::kMaxSteps;
  return traj;
}

}  // namespace mpsim
