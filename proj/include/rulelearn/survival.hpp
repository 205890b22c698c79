#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rulelearn/statistics.hpp"

namespace rulelearn {

struct SurvivalObservation {
  double time = 0.0;
  bool event = false;
};

inline std::vector<SurvivalObservation> make_observations(std::span<const double> times,
                                                          std::span<const double> events) {
  if (times.size() != events.size()) throw std::invalid_argument("times and events differ in length");
  std::vector<SurvivalObservation> out(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (events[i] != 0.0 && events[i] != 1.0) throw std::invalid_argument("event indicator outside {0,1}");
    out[i] = {times[i], events[i] == 1.0};
  }
  return out;
}

/// Right-continuous, non-increasing step function; S(t) = 1 before the first step.
struct KaplanMeierEstimate {
  std::vector<double> times;
  std::vector<double> probabilities;

  double probability_at(double t) const {
    auto it = std::upper_bound(times.begin(), times.end(), t);
    if (it == times.begin()) return 1.0;
    return probabilities[static_cast<std::size_t>(it - times.begin()) - 1];
  }

  /// Left limit S(t-).
  double probability_before(double t) const {
    auto it = std::lower_bound(times.begin(), times.end(), t);
    if (it == times.begin()) return 1.0;
    return probabilities[static_cast<std::size_t>(it - times.begin()) - 1];
  }

  bool operator==(const KaplanMeierEstimate&) const = default;
};

inline double km_probability_at(const KaplanMeierEstimate& estimate, double t) { return estimate.probability_at(t); }

/// Product-limit estimate. At tied times events are processed before censorings, so subjects
/// censored at t are still at risk for the events at t.
inline KaplanMeierEstimate kaplan_meier(std::span<const SurvivalObservation> sample) {
  if (sample.empty()) throw std::invalid_argument("Kaplan-Meier estimate of an empty sample");
  std::vector<SurvivalObservation> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.time < b.time; });
  KaplanMeierEstimate out;
  double survival = 1.0;
  std::size_t at_risk = sorted.size();
  for (std::size_t i = 0; i < sorted.size();) {
    const double t = sorted[i].time;
    std::size_t events = 0, leaving = 0;
    for (; i < sorted.size() && sorted[i].time == t; ++i, ++leaving) events += sorted[i].event ? 1 : 0;
    if (events > 0) {
      survival *= 1.0 - static_cast<double>(events) / static_cast<double>(at_risk);
      out.times.push_back(t);
      out.probabilities.push_back(survival);
    }
    at_risk -= leaving;
  }
  return out;
}

inline KaplanMeierEstimate kaplan_meier(std::span<const double> times, std::span<const double> events) {
  auto sample = make_observations(times, events);
  return kaplan_meier(sample);
}

/// Pointwise arithmetic mean of several estimates over the union of their step times.
inline KaplanMeierEstimate average_estimates(std::span<const KaplanMeierEstimate* const> estimates) {
  if (estimates.empty()) throw std::invalid_argument("average of no estimates");
  if (estimates.size() == 1) return *estimates.front();
  std::vector<double> grid;
  for (const auto* e : estimates) grid.insert(grid.end(), e->times.begin(), e->times.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  KaplanMeierEstimate out;
  out.times = grid;
  out.probabilities.resize(grid.size());
  const double count = static_cast<double>(estimates.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double sum = 0.0;
    for (const auto* e : estimates) sum += e->probability_at(grid[g]);
    out.probabilities[g] = sum / count;
  }
  return out;
}

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Per distinct event time: totals (at_risk, events) and group-a counts. Rows with zero events
/// contribute nothing. Shared by the public test and the incremental evaluation in induction so
/// both produce bit-identical results from identical counts.
inline TestResult log_rank_from_counts(std::span<const std::size_t> at_risk, std::span<const std::size_t> events,
                                       std::span<const std::size_t> at_risk_a, std::span<const std::size_t> events_a) {
  double observed_minus_expected = 0.0;
  double variance = 0.0;
  for (std::size_t j = 0; j < at_risk.size(); ++j) {
    if (events[j] == 0 || at_risk[j] == 0) continue;
    const double n = static_cast<double>(at_risk[j]);
    const double d = static_cast<double>(events[j]);
    const double na = static_cast<double>(at_risk_a[j]);
    const double nb = n - na;
    observed_minus_expected += static_cast<double>(events_a[j]) - d * na / n;
    if (at_risk[j] > 1) variance += d * (na * nb) * (n - d) / (n * n * (n - 1.0));
  }
  if (!(variance > 0.0)) return {};
  const double statistic = observed_minus_expected * observed_minus_expected / variance;
  return {statistic, chi_square_1_sf(statistic)};
}

/// Two-group log-rank test.
inline TestResult log_rank(std::span<const SurvivalObservation> group_a, std::span<const SurvivalObservation> group_b) {
  if (group_a.empty() || group_b.empty()) throw std::invalid_argument("log-rank test needs two non-empty groups");
  std::vector<double> event_times;
  for (auto group : {group_a, group_b}) {
    for (const auto& o : group) {
      if (o.event) event_times.push_back(o.time);
    }
  }
  std::sort(event_times.begin(), event_times.end());
  event_times.erase(std::unique(event_times.begin(), event_times.end()), event_times.end());
  const std::size_t m = event_times.size();

  // Bucket u(x) = number of event times <= time(x); x is at risk at event time j iff j < u(x).
  auto tally = [&](std::span<const SurvivalObservation> group, std::vector<std::size_t>& at_risk,
                   std::vector<std::size_t>& events) {
    std::vector<std::size_t> by_bucket(m + 1, 0);
    for (const auto& o : group) {
      auto u = static_cast<std::size_t>(std::upper_bound(event_times.begin(), event_times.end(), o.time) -
                                        event_times.begin());
      ++by_bucket[u];
      if (o.event) ++events[u - 1];
    }
    std::size_t running = 0;
    for (std::size_t j = m; j-- > 0;) {
      running += by_bucket[j + 1];
      at_risk[j] = running;
    }
  };
  std::vector<std::size_t> at_risk_a(m, 0), events_a(m, 0), at_risk_b(m, 0), events_b(m, 0);
  tally(group_a, at_risk_a, events_a);
  tally(group_b, at_risk_b, events_b);
  std::vector<std::size_t> at_risk(m), events(m);
  for (std::size_t j = 0; j < m; ++j) {
    at_risk[j] = at_risk_a[j] + at_risk_b[j];
    events[j] = events_a[j] + events_b[j];
  }
  return log_rank_from_counts(at_risk, events, at_risk_a, events_a);
}

}  // namespace rulelearn
