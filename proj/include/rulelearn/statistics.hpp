#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "rulelearn/covering.hpp"

namespace rulelearn {

/// log(k!) with a per-thread cache; every call for k within the cache is a table lookup.
inline double log_factorial(std::size_t k) {
  thread_local std::vector<double> cache{0.0, 0.0};
  if (k >= cache.size()) {
    std::size_t target = std::max(k + 1, cache.size() * 2);
    cache.reserve(target);
    for (std::size_t i = cache.size(); i < target; ++i) cache.push_back(std::lgamma(static_cast<double>(i) + 1.0));
  }
  return cache[k];
}

inline double log_binomial(std::size_t n, std::size_t k) {
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

/// One-sided P(X >= p) for X ~ Hypergeometric(population P+N, successes P, draws p+n).
inline double hypergeometric_pvalue(const Covering& c) {
  c.validate();
  const std::size_t population = c.P + c.N;
  const std::size_t successes = c.P;
  const std::size_t draws = c.p + c.n;
  const std::size_t lowest = draws > c.N ? draws - c.N : 0;
  const std::size_t highest = std::min(draws, successes);
  if (c.p <= lowest) return 1.0;
  if (c.p > highest) return 0.0;

  const double log_total = log_binomial(population, draws);
  std::vector<double> logs;
  logs.reserve(highest - c.p + 1);
  for (std::size_t k = c.p; k <= highest; ++k) {
    logs.push_back(log_binomial(successes, k) + log_binomial(population - successes, draws - k) - log_total);
  }
  const double peak = *std::max_element(logs.begin(), logs.end());
  double sum = 0.0;
  for (double l : logs) sum += std::exp(l - peak);
  return std::clamp(std::exp(peak + std::log(sum)), 0.0, 1.0);
}

/// Upper tail of the chi-square distribution with one degree of freedom.
inline double chi_square_1_sf(double statistic) {
  if (!(statistic > 0.0)) return 1.0;
  return std::clamp(std::erfc(std::sqrt(statistic / 2.0)), 0.0, 1.0);
}

/// Running mean and population variance with O(1) insertion and removal (Welford).
class StatAccumulator {
 public:
  void push(double y) {
    ++count_;
    const double delta = y - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (y - mean_);
  }

  /// Removes a value previously pushed.
  void remove(double y) {
    if (count_ == 0) throw std::logic_error("remove from an empty accumulator");
    if (count_ == 1) {
      *this = StatAccumulator{};
      return;
    }
    const double old_mean = mean_;
    --count_;
    mean_ = old_mean - (y - old_mean) / static_cast<double>(count_);
    m2_ -= (y - mean_) * (y - old_mean);
    if (m2_ < 0.0) m2_ = 0.0;
  }

  std::size_t count() const { return count_; }
  double mean() const { return mean_; }
  double m2() const { return m2_; }
  double variance() const { return count_ == 0 ? 0.0 : m2_ / static_cast<double>(count_); }
  double stddev() const { return std::sqrt(variance()); }

 private:
  std::size_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace rulelearn
