#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mpsim/bits.hpp"
#include "mpsim/errors.hpp"
#include "mpsim/expr.hpp"

namespace mpsim {

// A full assignment of binary states, one per component.
struct Configuration {
  std::uint64_t bits = 0;
  int n = 0;

  bool get(int i) const { return (bits >> i) & 1; }

  void assign(int i, bool v) {
    bits = (bits & ~bit(i)) | (static_cast<Mask>(v) << i);
  }

  std::string to_string() const {
    std::string s(static_cast<std::size_t>(n), '0');
    for (int i = 0; i < n; ++i)
      if (get(i)) s[static_cast<std::size_t>(i)] = '1';
    return s;
  }

  friend bool operator==(const Configuration&, const Configuration&) = default;
};

// Components on which two configurations differ.
inline Mask delta(const Configuration& x, const Configuration& y) {
  if (x.n != y.n)
    throw UsageError("configuration length mismatch: " + std::to_string(x.n) +
                     " vs " + std::to_string(y.n));
  return x.bits ^ y.bits;
}

// A Boolean network: named components with one local function each.
// Immutable after construction; safe to share across threads.
class Network {
 public:
  Network(std::vector<std::string> names, std::vector<Expr> locals)
      : names_(std::move(names)), locals_(std::move(locals)) {
    n_ = static_cast<int>(names_.size());
    if (n_ == 0) throw UsageError("empty network");
    if (n_ > kMaxComponents)
      throw UsageError("network too large: " + std::to_string(n_) +
                       " components (max " + std::to_string(kMaxComponents) +
                       ")");
    if (locals_.size() != names_.size())
      throw UsageError("one local function required per component");
    for (int i = 0; i < n_; ++i) {
      if (names_[static_cast<std::size_t>(i)].empty())
        throw UsageError("component name must be nonempty");
      if (!index_.emplace(names_[static_cast<std::size_t>(i)], i).second)
        throw UsageError("duplicate component name: " +
                         names_[static_cast<std::size_t>(i)]);
      if (locals_[static_cast<std::size_t>(i)].support() & ~full_mask(n_))
        throw UsageError("local function of " +
                         names_[static_cast<std::size_t>(i)] +
                         " references a component outside the network");
    }
  }

  int size() const { return n_; }
  const std::string& name(int i) const {
    return names_[static_cast<std::size_t>(i)];
  }
  const std::vector<std::string>& names() const { return names_; }
  const Expr& local(int i) const { return locals_[static_cast<std::size_t>(i)]; }

  int index_of(std::string_view name) const {
    auto it = index_.find(std::string(name));
    return it == index_.end() ? -1 : it->second;
  }

  bool eval_component(int i, std::uint64_t bits) const {
    return locals_[static_cast<std::size_t>(i)].eval(bits);
  }

  Configuration configuration(std::uint64_t bits) const {
    return {bits & full_mask(n_), n_};
  }

  // Synchronous image y = f(x).
  Configuration apply(const Configuration& x) const {
    if (x.n != n_) throw UsageError("configuration length mismatch");
    std::uint64_t out = 0;
    for (int i = 0; i < n_; ++i)
      if (eval_component(i, x.bits)) out |= bit(i);
    return {out, n_};
  }

 private:
  std::vector<std::string> names_;
  std::vector<Expr> locals_;
  std::unordered_map<std::string, int> index_;
  int n_ = 0;
};

// Pins a component's local function to a constant.
struct Mutation {
  int component = 0;
  bool value = false;
};

inline Network apply_mutations(const Network& net,
                               std::span<const Mutation> mutations) {
  Mask seen = 0;
  std::vector<Expr> locals;
  locals.reserve(static_cast<std::size_t>(net.size()));
  for (int i = 0; i < net.size(); ++i) locals.push_back(net.local(i));
  for (const Mutation& m : mutations) {
    if (m.component < 0 || m.component >= net.size())
      throw UsageError("mutation index out of range");
    if (seen & bit(m.component))
      throw UsageError("component mutated twice: " + net.name(m.component));
    seen |= bit(m.component);
    locals[static_cast<std::size_t>(m.component)] = Expr::constant(m.value);
  }
  return Network(net.names(), std::move(locals));
}

// Signed dependency graph: edge j -> i with sign s iff raising j alone can
// change f_i in direction s for some context. Both signs may coexist.
struct InfluenceGraph {
  int n = 0;
  std::vector<Mask> positive;  // positive[i] = sources acting positively on i
  std::vector<Mask> negative;

  struct Edge {
    int source;
    int sign;  // +1 or -1
    int target;
  };

  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (int i = 0; i < n; ++i) {
      for_each_bit(positive[static_cast<std::size_t>(i)],
                   [&](int j) { out.push_back({j, +1, i}); });
      for_each_bit(negative[static_cast<std::size_t>(i)],
                   [&](int j) { out.push_back({j, -1, i}); });
    }
    return out;
  }

  bool locally_monotone() const {
    for (int i = 0; i < n; ++i)
      if (positive[static_cast<std::size_t>(i)] &
          negative[static_cast<std::size_t>(i)])
        return false;
    return true;
  }
};

// Exhaustive sign detection over the syntactic support of each local
// function: 2^k evaluations per component, k = support size. The cap guards
// against pathological fan-in; raise it deliberately if a model needs to.
inline InfluenceGraph influence_graph(const Network& net, int fanin_cap = 24) {
  InfluenceGraph g;
  g.n = net.size();
  g.positive.assign(static_cast<std::size_t>(g.n), 0);
  g.negative.assign(static_cast<std::size_t>(g.n), 0);
  for (int i = 0; i < g.n; ++i) {
    Mask sup = net.local(i).support();
    int k = popcount(sup);
    if (k > fanin_cap)
      throw BudgetError("fan-in too large for " + net.name(i) + ": " +
                        std::to_string(k) + " inputs (cap " +
                        std::to_string(fanin_cap) + ")");
    if (k == 0) continue;
    std::vector<int> vars;
    vars.reserve(static_cast<std::size_t>(k));
    for_each_bit(sup, [&](int j) { vars.push_back(j); });
    std::vector<std::uint8_t> value(std::size_t{1} << k);
    for (std::uint64_t a = 0; a < (std::uint64_t{1} << k); ++a) {
      std::uint64_t bits = 0;
      for (int p = 0; p < k; ++p)
        if ((a >> p) & 1) bits |= bit(vars[static_cast<std::size_t>(p)]);
      value[a] = net.eval_component(i, bits) ? 1 : 0;
    }
    for (int p = 0; p < k; ++p) {
      for (std::uint64_t a = 0; a < (std::uint64_t{1} << k); ++a) {
        if ((a >> p) & 1) continue;
        int diff = static_cast<int>(value[a | (std::uint64_t{1} << p)]) -
                   static_cast<int>(value[a]);
        if (diff > 0)
          g.positive[static_cast<std::size_t>(i)] |=
              bit(vars[static_cast<std::size_t>(p)]);
        else if (diff < 0)
          g.negative[static_cast<std::size_t>(i)] |=
              bit(vars[static_cast<std::size_t>(p)]);
      }
    }
  }
  return g;
}

inline bool is_locally_monotone(const Network& net, int fanin_cap = 24) {
  return influence_graph(net, fanin_cap).locally_monotone();
}

}  // namespace mpsim
