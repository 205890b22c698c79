#pragma once

// Test-side generators and naive reference implementations. Nothing here calls the library's
// statistical code; each oracle recomputes its quantity from the definition.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rulelearn/dataset.hpp"
#include "rulelearn/survival.hpp"

namespace testing_support {

using rulelearn::AttributeKind;
using rulelearn::AttributeMeta;
using rulelearn::DataSet;
using rulelearn::Role;
using rulelearn::Task;

inline std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline bool chance(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

inline AttributeMeta nominal(std::string name, std::vector<std::string> domain, Role role = Role::regular) {
  return {std::move(name), AttributeKind::nominal, std::move(domain), role};
}

inline AttributeMeta numeric(std::string name, Role role = Role::regular) {
  return {std::move(name), AttributeKind::numeric, {}, role};
}

/// Small random table: up to `max_attributes` regular attributes (nominal or numeric on a coarse
/// grid so ties occur), optional missing cells, and a label loosely tied to the first attribute.
inline DataSet random_dataset(std::mt19937_64& rng, Task task, std::size_t rows, std::size_t max_attributes,
                              double missing_rate = 0.05) {
  const std::size_t attributes = uniform(rng, 1, max_attributes);
  std::vector<AttributeMeta> meta;
  std::vector<std::vector<double>> columns;
  for (std::size_t a = 0; a < attributes; ++a) {
    std::vector<double> column(rows);
    if (chance(rng, 0.5)) {
      const std::size_t symbols = uniform(rng, 2, 4);
      std::vector<std::string> domain;
      for (std::size_t s = 0; s < symbols; ++s) domain.push_back("s" + std::to_string(s));
      meta.push_back(nominal("a" + std::to_string(a), domain));
      for (auto& v : column) v = static_cast<double>(uniform(rng, 0, symbols - 1));
    } else {
      meta.push_back(numeric("a" + std::to_string(a)));
      const std::size_t grid = uniform(rng, 3, 12);
      for (auto& v : column) v = static_cast<double>(uniform(rng, 0, grid)) * 0.5;
    }
    for (auto& v : column) {
      if (chance(rng, missing_rate)) v = rulelearn::missing_value;
    }
    columns.push_back(std::move(column));
  }
  auto driver = [&](std::size_t r) {
    const double v = columns[0][r];
    return std::isnan(v) ? 0.0 : v;
  };
  std::vector<double> label(rows);
  switch (task) {
    case Task::classification: {
      const std::size_t classes = uniform(rng, 2, 3);
      std::vector<std::string> domain;
      for (std::size_t c = 0; c < classes; ++c) domain.push_back("c" + std::to_string(c));
      for (std::size_t r = 0; r < rows; ++r) {
        label[r] = chance(rng, 0.7) ? std::fmod(driver(r), static_cast<double>(classes))
                                    : static_cast<double>(uniform(rng, 0, classes - 1));
        label[r] = std::floor(label[r]);
      }
      meta.push_back(nominal("class", domain, Role::label));
      columns.push_back(std::move(label));
      break;
    }
    case Task::regression: {
      std::normal_distribution<double> noise(0.0, 1.0);
      for (std::size_t r = 0; r < rows; ++r) label[r] = std::round((3.0 * driver(r) + noise(rng)) * 4.0) / 4.0;
      meta.push_back(numeric("y", Role::label));
      columns.push_back(std::move(label));
      break;
    }
    case Task::survival: {
      std::vector<double> time(rows);
      for (std::size_t r = 0; r < rows; ++r) {
        const double rate = 0.05 + 0.1 * driver(r);
        time[r] = std::round(std::exponential_distribution<double>(rate)(rng) * 2.0) / 2.0;
        label[r] = chance(rng, 0.75) ? 1.0 : 0.0;
      }
      meta.push_back(numeric("time", Role::survival_time));
      columns.push_back(std::move(time));
      meta.push_back(nominal("status", {"0", "1"}, Role::label));
      columns.push_back(std::move(label));
      break;
    }
  }
  return DataSet("random", std::move(meta), std::move(columns));
}

/// Regression data whose target is a step function of one numeric attribute plus small noise;
/// the remaining attributes are distractors.
inline DataSet piecewise_regression(std::mt19937_64& rng, std::size_t rows, std::size_t pieces) {
  std::uniform_real_distribution<double> unit(0.0, 10.0);
  std::normal_distribution<double> noise(0.0, 0.25);
  std::vector<double> levels(pieces);
  for (auto& l : levels) l = std::round(unit(rng) * 4.0);
  std::vector<double> cuts(pieces - 1);
  for (auto& c : cuts) c = unit(rng);
  std::sort(cuts.begin(), cuts.end());
  std::vector<AttributeMeta> meta{numeric("x"), numeric("z"), nominal("g", {"u", "v", "w"}), numeric("y", Role::label)};
  std::vector<std::vector<double>> columns(4, std::vector<double>(rows));
  for (std::size_t r = 0; r < rows; ++r) {
    const double x = std::round(unit(rng) * 100.0) / 100.0;
    const auto piece = static_cast<std::size_t>(std::upper_bound(cuts.begin(), cuts.end(), x) - cuts.begin());
    columns[0][r] = x;
    columns[1][r] = std::round(unit(rng) * 100.0) / 100.0;
    columns[2][r] = static_cast<double>(uniform(rng, 0, 2));
    columns[3][r] = levels[piece] + noise(rng);
  }
  return DataSet("piecewise", std::move(meta), std::move(columns));
}

// ---------------------------------------------------------------- statistics oracles

struct Step {
  double time;
  double probability;
};

/// Product-limit estimate recomputed per distinct event time by full scans (O(k^2)).
inline std::vector<Step> naive_kaplan_meier(const std::vector<double>& times, const std::vector<int>& events) {
  std::vector<double> event_times;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (events[i]) event_times.push_back(times[i]);
  }
  std::sort(event_times.begin(), event_times.end());
  event_times.erase(std::unique(event_times.begin(), event_times.end()), event_times.end());
  std::vector<Step> out;
  double s = 1.0;
  for (double t : event_times) {
    double at_risk = 0, died = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (times[i] >= t) ++at_risk;
      if (times[i] == t && events[i]) ++died;
    }
    s *= 1.0 - died / at_risk;
    out.push_back({t, s});
  }
  return out;
}

/// S(t) of a naive estimate, right-continuous.
inline double naive_survival_at(const std::vector<Step>& steps, double t) {
  double s = 1.0;
  for (const auto& step : steps) {
    if (step.time <= t) s = step.probability;
  }
  return s;
}

/// S(t-) of a naive estimate.
inline double naive_survival_before(const std::vector<Step>& steps, double t) {
  double s = 1.0;
  for (const auto& step : steps) {
    if (step.time < t) s = step.probability;
  }
  return s;
}

struct Group {
  std::vector<double> times;
  std::vector<int> events;
};

/// Log-rank statistic from observed-minus-expected sums over the pooled distinct event times.
inline std::pair<double, double> naive_log_rank(const Group& a, const Group& b) {
  std::vector<double> event_times;
  for (const auto* g : {&a, &b}) {
    for (std::size_t i = 0; i < g->times.size(); ++i) {
      if (g->events[i]) event_times.push_back(g->times[i]);
    }
  }
  std::sort(event_times.begin(), event_times.end());
  event_times.erase(std::unique(event_times.begin(), event_times.end()), event_times.end());
  double observed_minus_expected = 0.0, variance = 0.0;
  for (double t : event_times) {
    double n_a = 0, n_b = 0, d_a = 0, d_b = 0;
    for (std::size_t i = 0; i < a.times.size(); ++i) {
      if (a.times[i] >= t) ++n_a;
      if (a.times[i] == t && a.events[i]) ++d_a;
    }
    for (std::size_t i = 0; i < b.times.size(); ++i) {
      if (b.times[i] >= t) ++n_b;
      if (b.times[i] == t && b.events[i]) ++d_b;
    }
    const double n = n_a + n_b, d = d_a + d_b;
    observed_minus_expected += d_a - d * n_a / n;
    if (n > 1) variance += d * (n_a / n) * (1.0 - n_a / n) * (n - d) / (n - 1.0);
  }
  if (variance <= 0.0) return {0.0, 1.0};
  const double statistic = observed_minus_expected * observed_minus_expected / variance;
  return {statistic, std::erfc(std::sqrt(statistic / 2.0))};
}

inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) result = result * (n - k + i) / i;  // exact at every step
  return result;
}

/// P(X >= p) for X ~ Hypergeometric(P+N, P, p+n), summed over exact integer counts.
inline double exact_hypergeometric_tail(std::uint64_t p, std::uint64_t n, std::uint64_t P, std::uint64_t N) {
  const std::uint64_t draws = p + n;
  unsigned __int128 numerator = 0;
  for (std::uint64_t k = p; k <= std::min(P, draws); ++k) {
    numerator += static_cast<unsigned __int128>(binomial(P, k)) * binomial(N, draws - k);
  }
  const auto denominator = static_cast<unsigned __int128>(binomial(P + N, draws));
  return static_cast<double>(static_cast<long double>(numerator) / static_cast<long double>(denominator));
}

inline std::pair<double, double> two_pass_mean_variance(const std::vector<double>& values) {
  if (values.empty()) return {0.0, 0.0};
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  double squares = 0.0;
  for (double v : values) squares += (v - mean) * (v - mean);
  return {mean, squares / static_cast<double>(values.size())};
}

/// IPCW integrated Brier score by direct evaluation of BS(t) on every piece of the step grid.
/// `curve(i, t)` returns the predicted S_i(t).
template <class Curve>
double naive_integrated_brier(const std::vector<double>& times, const std::vector<int>& events, Curve curve,
                              const std::vector<double>& curve_breakpoints) {
  double t_max = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (events[i]) t_max = std::max(t_max, times[i]);
  }
  std::vector<int> reversed(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) reversed[i] = events[i] ? 0 : 1;
  const auto censoring = naive_kaplan_meier(times, reversed);

  std::vector<double> grid{0.0, t_max};
  for (double t : times) {
    if (t < t_max) grid.push_back(t);
  }
  for (double t : curve_breakpoints) {
    if (t > 0.0 && t < t_max) grid.push_back(t);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  double area = 0.0;
  for (std::size_t g = 0; g + 1 < grid.size(); ++g) {
    const double t = 0.5 * (grid[g] + grid[g + 1]);  // BS is constant on the open piece
    double score = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double s = curve(i, t);
      if (times[i] <= t) {
        if (events[i]) score += s * s / naive_survival_before(censoring, times[i]);
      } else {
        score += (1.0 - s) * (1.0 - s) / naive_survival_at(censoring, t);
      }
    }
    area += score / static_cast<double>(times.size()) * (grid[g + 1] - grid[g]);
  }
  return area / t_max;
}

// ---------------------------------------------------------------- files

inline std::filesystem::path scratch_directory(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("rulelearn_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

}  // namespace testing_support
