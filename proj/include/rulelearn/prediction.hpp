#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "rulelearn/dataset.hpp"
#include "rulelearn/induction.hpp"
#include "rulelearn/rule.hpp"
#include "rulelearn/survival.hpp"

namespace rulelearn {

/// Class index, real value, or survival curve.
using Prediction = std::variant<std::size_t, double, KaplanMeierEstimate>;

inline void check_schema(const RuleSet& rs, const DataSet& ds) {
  if (!same_schema(rs.schema, ds.attributes())) throw SchemaError("dataset schema does not match the model schema");
}

/// Applies a rule set to one example.
inline Prediction predict_one(const RuleSet& rs, const DataSet& ds, std::size_t row) {
  switch (rs.task) {
    case Task::classification: {
      const std::size_t classes = rs.class_counts.size();
      std::vector<double> votes(classes, 0.0);
      bool covered = false;
      for (const auto& rule : rs.rules) {
        if (!rule.premise.covers(ds, row)) continue;
        covered = true;
        votes[std::get<ClassConsequence>(rule.consequence).label] += rule.voting_weight;
      }
      if (!covered) return std::get<ClassConsequence>(rs.default_model).label;
      std::size_t best = 0;
      for (std::size_t c = 1; c < classes; ++c) {
        if (votes[c] > votes[best] || (votes[c] == votes[best] && rs.class_counts[c] > rs.class_counts[best])) best = c;
      }
      return best;
    }
    case Task::regression: {
      double weighted = 0.0, weights = 0.0, plain = 0.0;
      std::size_t count = 0;
      for (const auto& rule : rs.rules) {
        if (!rule.premise.covers(ds, row)) continue;
        const double mean = std::get<RegressionConsequence>(rule.consequence).mean;
        const double w = std::max(rule.voting_weight, 0.0);
        weighted += w * mean;
        weights += w;
        plain += mean;
        ++count;
      }
      if (count == 0) return std::get<RegressionConsequence>(rs.default_model).mean;
      return weights > 0.0 ? weighted / weights : plain / static_cast<double>(count);
    }
    case Task::survival: {
      std::vector<const KaplanMeierEstimate*> curves;
      for (const auto& rule : rs.rules) {
        if (rule.premise.covers(ds, row)) curves.push_back(&std::get<SurvivalConsequence>(rule.consequence).estimate);
      }
      if (curves.empty()) return std::get<SurvivalConsequence>(rs.default_model).estimate;
      return average_estimates(curves);
    }
  }
  throw std::logic_error("unknown task");
}

inline std::vector<Prediction> predict(const RuleSet& rs, const DataSet& ds) {
  check_schema(rs, ds);
  std::vector<Prediction> out;
  out.reserve(ds.size());
  for (std::size_t r = 0; r < ds.size(); ++r) out.push_back(predict_one(rs, ds, r));
  return out;
}

/// Mean per-class recall over the classes present in `actual`.
inline double balanced_accuracy(std::span<const std::size_t> actual, std::span<const std::size_t> predicted,
                                std::size_t classes) {
  std::vector<std::size_t> support(classes, 0), hits(classes, 0);
  for (std::size_t i = 0; i < actual.size(); ++i) {
    ++support[actual[i]];
    if (actual[i] == predicted[i]) ++hits[actual[i]];
  }
  double sum = 0.0;
  std::size_t present = 0;
  for (std::size_t c = 0; c < classes; ++c) {
    if (support[c] == 0) continue;
    sum += static_cast<double>(hits[c]) / static_cast<double>(support[c]);
    ++present;
  }
  return present == 0 ? 0.0 : sum / static_cast<double>(present);
}

/// Root relative squared error; empty when the actual values are constant.
inline std::optional<double> root_relative_squared_error(std::span<const double> actual,
                                                         std::span<const double> predicted) {
  if (actual.empty()) return std::nullopt;
  double mean = 0.0;
  for (double y : actual) mean += y;
  mean /= static_cast<double>(actual.size());
  double error = 0.0, baseline = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    error += (predicted[i] - actual[i]) * (predicted[i] - actual[i]);
    baseline += (mean - actual[i]) * (mean - actual[i]);
  }
  if (baseline == 0.0) return std::nullopt;
  return std::sqrt(error / baseline);
}

/// Integrated Brier score with inverse-probability-of-censoring weights, integrated exactly over
/// [0, t_max] (t_max = largest event time). Every function involved is a right-continuous step
/// function, so the score is constant between consecutive breakpoints. Empty when the sample has
/// no event after time 0.
inline std::optional<double> integrated_brier_score(std::span<const SurvivalObservation> sample,
                                                    std::span<const KaplanMeierEstimate> predicted) {
  if (sample.size() != predicted.size()) throw std::invalid_argument("one prediction per observation required");
  if (sample.empty()) return std::nullopt;
  double t_max = -1.0;
  for (const auto& o : sample) {
    if (o.event) t_max = std::max(t_max, o.time);
  }
  if (!(t_max > 0.0)) return std::nullopt;

  std::vector<SurvivalObservation> reversed(sample.begin(), sample.end());
  for (auto& o : reversed) o.event = !o.event;
  const auto censoring = kaplan_meier(reversed);

  std::vector<double> grid{0.0, t_max};
  for (const auto& o : sample) {
    if (o.time < t_max) grid.push_back(o.time);
  }
  for (const auto& curve : predicted) {
    for (double t : curve.times) {
      if (t < t_max) grid.push_back(t);
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::vector<double> event_weight(sample.size(), 0.0);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (sample[i].event) event_weight[i] = 1.0 / censoring.probability_before(sample[i].time);
  }
  const double n = static_cast<double>(sample.size());
  double area = 0.0;
  for (std::size_t g = 0; g + 1 < grid.size(); ++g) {
    const double t = grid[g];
    const double g_t = censoring.probability_at(t);
    double score = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
      const double s = predicted[i].probability_at(t);
      if (sample[i].time <= t) {
        if (sample[i].event) score += s * s * event_weight[i];
      } else {
        score += (1.0 - s) * (1.0 - s) / g_t;
      }
    }
    area += score / n * (grid[g + 1] - t);
  }
  return area / t_max;
}

struct RuleRecord {
  std::string text;
  Covering covering;
  double p_value = 1.0;
};

struct EvaluationReport {
  Task task = Task::classification;
  std::string metric_name;
  std::optional<double> metric;  // empty when undefined on this test set
  std::vector<std::vector<std::size_t>> confusion;  // [actual][predicted], classification only
  std::size_t rule_count = 0;
  std::vector<RuleRecord> rules;
};

inline std::string_view metric_name(Task task) {
  switch (task) {
    case Task::classification: return "BAcc";
    case Task::regression: return "RRSE";
    case Task::survival: return "IBS";
  }
  return "";
}

inline EvaluationReport evaluate(const RuleSet& rs, const DataSet& test) {
  if (test.size() == 0) throw std::invalid_argument("evaluation needs a non-empty test set");
  if (test.task() != rs.task) throw SchemaError("test set task does not match the model task");
  const auto predictions = predict(rs, test);
  EvaluationReport report;
  report.task = rs.task;
  report.metric_name = metric_name(rs.task);
  report.rule_count = rs.rules.size();
  for (const auto& rule : rs.rules) {
    report.rules.push_back({format_rule(rule, rs.schema), rule.covering, rule.p_value});
  }
  const auto labels = test.labels();
  switch (rs.task) {
    case Task::classification: {
      const std::size_t classes = rs.class_counts.size();
      std::vector<std::size_t> actual(test.size()), predicted(test.size());
      report.confusion.assign(classes, std::vector<std::size_t>(classes, 0));
      for (std::size_t r = 0; r < test.size(); ++r) {
        actual[r] = static_cast<std::size_t>(labels[r]);
        predicted[r] = std::get<std::size_t>(predictions[r]);
        ++report.confusion[actual[r]][predicted[r]];
      }
      report.metric = balanced_accuracy(actual, predicted, classes);
      break;
    }
    case Task::regression: {
      std::vector<double> predicted(test.size());
      for (std::size_t r = 0; r < test.size(); ++r) predicted[r] = std::get<double>(predictions[r]);
      report.metric = root_relative_squared_error(labels, predicted);
      break;
    }
    case Task::survival: {
      auto sample = make_observations(test.survival_times(), labels);
      std::vector<KaplanMeierEstimate> curves;
      curves.reserve(test.size());
      for (auto& p : predictions) curves.push_back(std::get<KaplanMeierEstimate>(p));
      report.metric = integrated_brier_score(sample, curves);
      break;
    }
  }
  return report;
}

namespace detail {

/// Uniform integer in [0, bound) by rejection; identical on every platform for a given engine.
inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t threshold = (0 - bound) % bound;
  while (true) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % bound;
  }
}

inline void shuffle(std::vector<std::size_t>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[bounded(rng, i)]);
  }
}

}  // namespace detail

/// Fold index of every example: seeded shuffle (within each class for classification), then
/// round-robin dealing, so fold sizes differ by at most one.
inline std::vector<std::size_t> fold_assignment(const DataSet& ds, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("cross-validation needs k >= 2");
  if (k > ds.size()) throw std::invalid_argument("more folds than examples");
  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::size_t>> strata;
  if (ds.task() == Task::classification) {
    strata.resize(ds.label_attribute().domain.size());
    auto labels = ds.labels();
    for (std::size_t r = 0; r < ds.size(); ++r) strata[static_cast<std::size_t>(labels[r])].push_back(r);
  } else {
    strata.emplace_back(ds.size());
    for (std::size_t r = 0; r < ds.size(); ++r) strata[0][r] = r;
  }
  std::vector<std::size_t> fold(ds.size());
  std::size_t next = 0;
  for (auto& stratum : strata) {
    detail::shuffle(stratum, rng);
    for (auto r : stratum) fold[r] = next++ % k;
  }
  return fold;
}

struct CVReport {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<EvaluationReport> folds;
  std::vector<RuleSet> models;
  std::optional<double> aggregate;  // mean over folds where the metric is defined
  double mean_rule_count = 0.0;
  double induction_seconds = 0.0;
};

inline CVReport cross_validate(const DataSet& ds, std::size_t k, const InductionParams& params, std::uint64_t seed,
                               const ExpertKnowledge* expert = nullptr, std::size_t threads = 1) {
  const auto fold = fold_assignment(ds, k, seed);
  CVReport report;
  report.k = k;
  report.seed = seed;
  report.folds.resize(k);
  report.models.resize(k);
  std::vector<double> seconds(k, 0.0);
  detail::parallel_for(k, threads, [&](std::size_t f) {
    std::vector<std::size_t> train, test;
    for (std::size_t r = 0; r < ds.size(); ++r) (fold[r] == f ? test : train).push_back(r);
    const auto train_set = ds.subset(train);
    const auto test_set = ds.subset(test);
    const auto start = std::chrono::steady_clock::now();
    report.models[f] = induce_ruleset(train_set, params, expert);
    seconds[f] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.folds[f] = evaluate(report.models[f], test_set);
  });
  double metric_sum = 0.0, rules = 0.0;
  std::size_t defined = 0;
  for (std::size_t f = 0; f < k; ++f) {
    report.induction_seconds += seconds[f];
    rules += static_cast<double>(report.folds[f].rule_count);
    if (report.folds[f].metric) {
      metric_sum += *report.folds[f].metric;
      ++defined;
    }
  }
  report.mean_rule_count = rules / static_cast<double>(k);
  if (defined > 0) report.aggregate = metric_sum / static_cast<double>(defined);
  return report;
}

}  // namespace rulelearn
