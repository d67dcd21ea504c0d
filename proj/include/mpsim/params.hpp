#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "mpsim/errors.hpp"
#include "mpsim/rng.hpp"

namespace mpsim {

// Per-step distribution over the permissive depth 1..n.
//
//   constant(d)          always d
//   exponential_decay(n) P(d) = 2^-d / M with M = sum_{i=1..n} 2^-i
//   custom(p)            explicit probabilities, p[d-1] = P(d)
class DepthDistribution {
 public:
  static DepthDistribution constant(int d) {
    if (d < 1) throw UsageError("depth must be >= 1");
    DepthDistribution dist;
    dist.constant_ = d;
    dist.spec_ = "const:" + std::to_string(d);
    return dist;
  }

  static DepthDistribution exponential_decay(int n) {
    if (n < 1) throw UsageError("dimension must be >= 1");
    DepthDistribution dist;
    double norm = 1.0 - std::ldexp(1.0, -n);  // sum of 2^-i, i = 1..n
    dist.probs_.resize(static_cast<std::size_t>(n));
    for (int d = 1; d <= n; ++d)
      dist.probs_[static_cast<std::size_t>(d - 1)] = std::ldexp(1.0, -d) / norm;
    dist.spec_ = "exp";
    return dist;
  }

  static DepthDistribution custom(std::vector<double> probs) {
    if (probs.empty()) throw UsageError("empty depth distribution");
    double sum = 0;
    for (double p : probs) {
      if (p < 0) throw UsageError("negative depth probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw UsageError("depth probabilities sum to " + std::to_string(sum) +
                       ", expected 1");
    DepthDistribution dist;
    dist.probs_ = std::move(probs);
    dist.spec_ = "custom:";
    for (std::size_t i = 0; i < dist.probs_.size(); ++i) {
      if (i) dist.spec_ += ',';
      dist.spec_ += std::to_string(dist.probs_[i]);
    }
    return dist;
  }

  bool is_constant() const { return constant_ > 0; }

  // Largest depth this distribution can produce.
  int max_depth() const {
    if (constant_ > 0) return constant_;
    int d = static_cast<int>(probs_.size());
    while (d > 1 && probs_[static_cast<std::size_t>(d - 1)] == 0.0) --d;
    return d;
  }

  // True when depth n is drawn with positive probability (full dynamics is
  // covered by the sampling).
  bool reaches(int n) const {
    if (constant_ > 0) return constant_ >= n;
    return static_cast<int>(probs_.size()) >= n &&
           probs_[static_cast<std::size_t>(n - 1)] > 0.0;
  }

  // Probability vector over 1..n; constants are expanded on demand.
  std::vector<double> probabilities(int n) const {
    if (constant_ > 0) {
      if (constant_ > n)
        throw UsageError("constant depth " + std::to_string(constant_) +
                         " exceeds dimension " + std::to_string(n));
      std::vector<double> p(static_cast<std::size_t>(n), 0.0);
      p[static_cast<std::size_t>(constant_ - 1)] = 1.0;
      return p;
    }
    if (static_cast<int>(probs_.size()) != n)
      throw UsageError("depth distribution has support 1.." +
                       std::to_string(probs_.size()) + ", model dimension is " +
                       std::to_string(n));
    return probs_;
  }

  int draw(RandomStream& rng) const {
    if (constant_ > 0) return constant_;
    double r = rng.real01();
    double acc = 0;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
      acc += probs_[i];
      if (r < acc) return static_cast<int>(i) + 1;
    }
    return static_cast<int>(probs_.size());
  }

  const std::string& spec_string() const { return spec_; }

 private:
  DepthDistribution() = default;
  int constant_ = 0;
  std::vector<double> probs_;
  std::string spec_;
};

// W[m] is the relative weight of a transition flipping m components at once.
class WeightVector {
 public:
  static WeightVector uniform(int n) {
    WeightVector w;
    w.weights_.assign(static_cast<std::size_t>(n), 1.0);
    w.spec_ = "uniform";
    return w;
  }

  static WeightVector single(int n) {
    WeightVector w;
    w.weights_.assign(static_cast<std::size_t>(n), 0.0);
    w.weights_[0] = 1.0;
    w.spec_ = "single";
    return w;
  }

  static WeightVector custom(std::vector<double> weights) {
    if (weights.empty()) throw UsageError("empty weight vector");
    bool any = false;
    for (double w : weights) {
      if (w < 0) throw UsageError("negative weight");
      if (w > 0) any = true;
    }
    if (!any) throw UsageError("weight vector must have a positive entry");
    WeightVector w;
    w.weights_ = std::move(weights);
    w.spec_ = "custom:";
    for (std::size_t i = 0; i < w.weights_.size(); ++i) {
      if (i) w.spec_ += ',';
      w.spec_ += std::to_string(w.weights_[i]);
    }
    return w;
  }

  int size() const { return static_cast<int>(weights_.size()); }

  double weight(int m) const {
    return m >= 1 && m <= size() ? weights_[static_cast<std::size_t>(m - 1)]
                                 : 0.0;
  }

  bool strictly_positive() const {
    for (double w : weights_)
      if (w <= 0) return false;
    return true;
  }

  const std::string& spec_string() const { return spec_; }

 private:
  WeightVector() = default;
  std::vector<double> weights_;
  std::string spec_;
};

// How the exact-|L| row of the rate matrix is weighted: Listing mode uses
// |L| * W[|L|]; Count mode uses 1 * W[|L|], matching the single transition
// that flips exactly L. The two agree whenever |L| <= 1.
enum class LRowMode { kListing, kCount };

inline const char* to_string(LRowMode mode) {
  return mode == LRowMode::kListing ? "listing" : "count";
}

enum class StopPolicy { kAttractor, kStrongBasin, kMaxSteps };

inline const char* to_string(StopPolicy policy) {
  switch (policy) {
    case StopPolicy::kAttractor:
      return "attractor";
    case StopPolicy::kStrongBasin:
      return "strong-basin";
    case StopPolicy::kMaxSteps:
      return "max-steps";
  }
  return "?";
}

struct SimulationParams {
  DepthDistribution depth;
  WeightVector weights;
  LRowMode l_row_mode = LRowMode::kListing;
  StopPolicy stop = StopPolicy::kStrongBasin;
  long max_steps = 100000;
  int check_interval = 0;  // 0 = auto: 1 for n <= 16, else 10

  int resolved_check_interval(int n) const {
    if (check_interval > 0) return check_interval;
    return n <= 16 ? 1 : 10;
  }
};

// CLI-facing grammars: depth `const:K` | `exp` | `custom:p1,...,pn` and
// weights `uniform` | `single` | `custom:w1,...,wn`.
namespace detail {

// Locale-independent numeric parsing for CLI specs.
inline double parse_double(const std::string& item, const char* what) {
  double value = 0;
  const char* first = item.data();
  const char* last = item.data() + item.size();
  while (first < last && (*first == ' ' || *first == '\t')) ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last)
    throw UsageError(std::string("bad ") + what + ": " + item);
  return value;
}

inline int parse_int(const std::string& item, const char* what) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
  if (ec != std::errc{} || ptr != item.data() + item.size())
    throw UsageError(std::string("bad ") + what + ": " + item);
  return value;
}

}  // namespace detail

inline DepthDistribution parse_depth_spec(const std::string& spec, int n) {
  if (spec == "exp") return DepthDistribution::exponential_decay(n);
  if (spec.rfind("const:", 0) == 0) {
    int d = detail::parse_int(spec.substr(6), "depth");
    if (d < 1 || d > n)
      throw UsageError("depth " + std::to_string(d) + " out of range 1.." +
                       std::to_string(n));
    return DepthDistribution::constant(d);
  }
  if (spec.rfind("custom:", 0) == 0) {
    std::vector<double> probs;
    std::string body = spec.substr(7);
    std::size_t pos = 0;
    while (pos <= body.size()) {
      std::size_t comma = body.find(',', pos);
      std::string item = body.substr(
          pos, comma == std::string::npos ? body.size() - pos : comma - pos);
      probs.push_back(detail::parse_double(item, "depth probability"));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (static_cast<int>(probs.size()) != n)
      throw UsageError("custom depth distribution needs " + std::to_string(n) +
                       " probabilities, got " + std::to_string(probs.size()));
    return DepthDistribution::custom(std::move(probs));
  }
  throw UsageError("bad depth spec: " + spec +
                   " (expected const:K, exp, or custom:p1,...,pn)");
}

inline WeightVector parse_weight_spec(const std::string& spec, int n) {
  if (spec == "uniform") return WeightVector::uniform(n);
  if (spec == "single") return WeightVector::single(n);
  if (spec.rfind("custom:", 0) == 0) {
    std::vector<double> weights;
    std::string body = spec.substr(7);
    std::size_t pos = 0;
    while (pos <= body.size()) {
      std::size_t comma = body.find(',', pos);
      std::string item = body.substr(
          pos, comma == std::string::npos ? body.size() - pos : comma - pos);
      weights.push_back(detail::parse_double(item, "weight"));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (static_cast<int>(weights.size()) != n)
      throw UsageError("custom weight vector needs " + std::to_string(n) +
                       " entries, got " + std::to_string(weights.size()));
    return WeightVector::custom(std::move(weights));
  }
  throw UsageError("bad weight spec: " + spec +
                   " (expected uniform, single, or custom:w1,...,wn)");
}

}  // namespace mpsim
