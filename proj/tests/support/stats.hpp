#pragma once

// Minimal statistics helpers for the test suites: the chi-square upper-tail
// probability via the regularized incomplete gamma function (series and
// continued-fraction forms).

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

namespace mpsim::testing {

inline double gamma_p_series(double a, double x) {
  double sum = 1.0 / a;
  double term = sum;
  for (int k = 1; k < 500; ++k) {
    term *= x / (a + k);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double gamma_q_continued_fraction(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int k = 1; k < 500; ++k) {
    double an = -k * (k - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-15) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// P(X > statistic) for X chi-square distributed with df degrees of freedom.
inline double chi_square_pvalue(double statistic, int df) {
  if (statistic <= 0) return 1.0;
  double a = df / 2.0;
  double x = statistic / 2.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_continued_fraction(a, x);
}

// Chi-square goodness-of-fit p-value for observed counts against expected
// probabilities.
inline double chi_square_gof(const std::map<std::uint64_t, std::uint64_t>& observed,
                             const std::map<std::uint64_t, double>& expected,
                             std::uint64_t draws) {
  double statistic = 0;
  int cells = 0;
  for (const auto& [value, p] : expected) {
    if (p <= 0) continue;
    double exp_count = p * static_cast<double>(draws);
    auto it = observed.find(value);
    double obs = it == observed.end() ? 0.0 : static_cast<double>(it->second);
    statistic += (obs - exp_count) * (obs - exp_count) / exp_count;
    ++cells;
  }
  for (const auto& [value, count] : observed)
    if (!expected.contains(value) && count > 0)
      throw std::logic_error("observed value outside expected support");
  if (cells <= 1) return 1.0;
  return chi_square_pvalue(statistic, cells - 1);
}

}  // namespace mpsim::testing
