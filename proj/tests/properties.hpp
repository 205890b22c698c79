#pragma once

// Property checks shared by the unit tests and the acceptance runner. Each returns an Outcome
// whose detail explains the first violation found, or summarizes what was checked.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "rulelearn/experiment.hpp"
#include "rulelearn/induction.hpp"
#include "rulelearn/prediction.hpp"
#include "rulelearn/serialization.hpp"
#include "support.hpp"

namespace properties {

using namespace rulelearn;
namespace ts = testing_support;

struct Outcome {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

inline std::vector<std::size_t> positives_of(const DataSet& ds, std::optional<std::size_t> target) {
  std::vector<std::size_t> out;
  const auto labels = ds.labels();
  for (std::size_t r = 0; r < ds.size(); ++r) {
    if (!target || labels[r] == static_cast<double>(*target)) out.push_back(r);
  }
  return out;
}

/// Induction-measure quality of a premise, recomputed from its coverage.
inline double premise_quality(const DataSet& ds, const Premise& premise, std::optional<std::size_t> target,
                              MeasureId measure) {
  if (ds.task() != Task::survival) return measure_value(measure, covering_stats(premise, target, ds));
  std::vector<SurvivalObservation> inside, outside;
  const auto times = ds.survival_times();
  const auto events = ds.labels();
  for (std::size_t r = 0; r < ds.size(); ++r) {
    (premise.covers(ds, r) ? inside : outside).push_back({times[r], events[r] == 1.0});
  }
  if (inside.empty() || outside.empty()) return 0.0;
  return 1.0 - log_rank(inside, outside).p_value;
}

struct OracleChoice {
  std::optional<ElementaryCondition> condition;
  std::size_t candidates = 0;
};

/// Exhaustive first step: best single condition by (quality, p, candidate order) among those
/// covering at least minsupp_new uncovered positives, kept only if it beats the empty premise.
inline OracleChoice exhaustive_first_condition(const DataSet& ds, std::optional<std::size_t> target,
                                               const std::vector<std::size_t>& uncovered,
                                               const InductionParams& params) {
  std::vector<std::size_t> all(ds.size());
  std::iota(all.begin(), all.end(), 0);
  const auto candidates = candidate_conditions(ds, all);
  std::vector<char> fresh(ds.size(), 0);
  for (auto r : uncovered) fresh[r] = 1;

  OracleChoice choice;
  choice.candidates = candidates.size();
  double best_quality = 0.0;
  std::size_t best_p = 0;
  for (const auto& c : candidates) {
    const Premise premise({c});
    const auto rows = covered_rows(premise, ds);
    std::size_t fresh_count = 0;
    for (auto r : rows) fresh_count += fresh[r];
    if (fresh_count < params.minsupp_new) continue;
    const double q = premise_quality(ds, premise, target, params.induction_measure);
    const std::size_t p = ds.task() == Task::survival ? rows.size() : covering_stats(premise, target, ds).p;
    if (!choice.condition || q > best_quality || (q == best_quality && p > best_p)) {
      choice.condition = c;
      best_quality = q;
      best_p = p;
    }
  }
  if (choice.condition && !(best_quality > premise_quality(ds, Premise{}, target, params.induction_measure))) {
    choice.condition.reset();
  }
  return choice;
}

inline MeasureId random_measure(std::mt19937_64& rng) {
  return all_measures[ts::uniform(rng, 0, all_measures.size() - 1)];
}

/// First grown condition equals the exhaustive argmax on `datasets` random small datasets.
inline Outcome greedy_step_oracle(std::uint64_t seed, std::size_t datasets) {
  Outcome out;
  std::mt19937_64 rng(seed);
  std::size_t grown = 0;
  for (std::size_t i = 0; i < datasets; ++i) {
    const Task task = i % 5 < 3 ? Task::classification : (i % 5 == 3 ? Task::regression : Task::survival);
    const auto ds = ts::random_dataset(rng, task, ts::uniform(rng, 5, 30), 4);
    InductionParams params;
    params.minsupp_new = ts::uniform(rng, 1, 3);
    params.max_growing_conditions = 1;
    params.induction_measure = random_measure(rng);
    std::optional<std::size_t> target;
    if (task == Task::classification) target = ts::uniform(rng, 0, ds.label_attribute().domain.size() - 1);
    const auto uncovered = positives_of(ds, target);
    const auto expected = exhaustive_first_condition(ds, target, uncovered, params);
    const auto rule = grow_rule(ds, target, uncovered, params);
    const std::string where = "dataset " + std::to_string(i) + " (" + std::string(to_string(task)) + ")";
    if (!expected.condition) {
      if (rule) out.fail(where + ": oracle finds no improving condition but growth returned one");
      continue;
    }
    ++grown;
    if (!rule) {
      out.fail(where + ": growth failed but oracle picks " + format_condition(*expected.condition, ds.attributes()));
      continue;
    }
    if (rule->premise.size() != 1 || rule->premise.conditions()[0] != *expected.condition) {
      out.fail(where + ": grew " + format_rule(*rule, ds.attributes()) + ", oracle picks " +
               format_condition(*expected.condition, ds.attributes()));
    }
  }
  if (out.ok) {
    out.detail = std::to_string(datasets) + " datasets, " + std::to_string(grown) + " with an improving condition";
  }
  return out;
}

/// Covering-loop invariants on `count` random datasets of one task.
inline Outcome covering_loop_invariants(Task task, std::uint64_t seed, std::size_t count) {
  Outcome out;
  std::mt19937_64 rng(seed);
  std::size_t rules_checked = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const auto ds = ts::random_dataset(rng, task, ts::uniform(rng, 20, 60), 4);
    InductionParams params;
    params.minsupp_new = ts::uniform(rng, 1, 3);
    const double fractions[] = {0.0, 0.1, 0.25};
    params.max_uncovered_fraction = fractions[ts::uniform(rng, 0, 2)];
    params.induction_measure = random_measure(rng);
    params.pruning_measure = random_measure(rng);
    InductionTrace trace;
    InductionOptions options;
    options.trace = &trace;
    const auto rs = induce_ruleset(ds, params, nullptr, options);
    const std::string where = "dataset " + std::to_string(i);

    // Replay each loop from the rule set alone.
    std::size_t next_rule = 0;
    for (const auto& loop : trace.loops) {
      auto uncovered = positives_of(ds, loop.target);
      const std::size_t P = uncovered.size();
      for (std::size_t k = 0; k < loop.rules; ++k, ++next_rule) {
        const auto& rule = rs.rules.at(next_rule);
        std::vector<std::size_t> remaining;
        std::size_t fresh = 0;
        for (auto r : uncovered) {
          if (rule.premise.covers(ds, r)) ++fresh;
          else remaining.push_back(r);
        }
        if (fresh < params.minsupp_new) {
          out.fail(where + ": rule " + std::to_string(next_rule + 1) + " covers " + std::to_string(fresh) +
                   " new positives < minsupp_new " + std::to_string(params.minsupp_new));
        }
        uncovered = std::move(remaining);
      }
      if (loop.rules > P) out.fail(where + ": more iterations than positives");
      if (loop.exit == LoopExit::coverage_reached &&
          static_cast<double>(uncovered.size()) > params.max_uncovered_fraction * static_cast<double>(P)) {
        out.fail(where + ": clean exit with " + std::to_string(uncovered.size()) + " of " + std::to_string(P) +
                 " positives uncovered");
      }
    }
    if (next_rule != rs.rules.size()) out.fail(where + ": trace and rule set disagree on rule count");

    for (const auto& t : trace.rules) {
      ++rules_checked;
      const double before = premise_quality(ds, t.grown, t.target, params.pruning_measure);
      const double after = premise_quality(ds, t.pruned, t.target, params.pruning_measure);
      if (after < before) out.fail(where + ": pruning lowered the pruning measure");
      for (const auto& c : t.pruned.conditions()) {
        if (std::find(t.grown.conditions().begin(), t.grown.conditions().end(), c) == t.grown.conditions().end()) {
          out.fail(where + ": pruned premise is not a subset of the grown premise");
        }
      }
    }
  }
  if (out.ok) out.detail = std::to_string(count) + " datasets, " + std::to_string(rules_checked) + " rules";
  return out;
}

inline DataSet larger_dataset(std::mt19937_64& rng, Task task, std::size_t rows) {
  return ts::random_dataset(rng, task, rows, 6, 0.05);
}

/// Rule sets, fold reports and batch reports are byte-identical at 1, 2 and 8 threads.
inline Outcome determinism(std::uint64_t seed, const std::filesystem::path& scratch) {
  Outcome out;
  std::mt19937_64 rng(seed);
  const std::size_t thread_counts[] = {1, 2, 8};
  std::size_t compared = 0;
  for (Task task : {Task::classification, Task::regression, Task::survival}) {
    for (int i = 0; i < 3; ++i) {
      const auto ds = larger_dataset(rng, task, 150 + 100 * static_cast<std::size_t>(i));
      InductionParams params;
      params.seed = seed;
      std::string reference_model, reference_cv;
      for (auto threads : thread_counts) {
        InductionOptions options;
        options.threads = threads;
        const auto model = to_json(induce_ruleset(ds, params, nullptr, options)).dump();
        const auto cv = to_json(cross_validate(ds, 5, params, seed, nullptr, threads)).dump();
        if (threads == 1) {
          reference_model = model;
          reference_cv = cv;
        } else {
          if (model != reference_model) out.fail(std::string(to_string(task)) + ": model differs at " +
                                                 std::to_string(threads) + " threads");
          if (cv != reference_cv) out.fail(std::string(to_string(task)) + ": cv report differs at " +
                                           std::to_string(threads) + " threads");
        }
        ++compared;
      }
    }
  }

  // Batch runner: the same configuration at 1, 2 and 8 jobs.
  std::filesystem::create_directories(scratch);
  std::vector<DatasetEntry> entries;
  for (Task task : {Task::classification, Task::regression, Task::survival}) {
    const auto ds = larger_dataset(rng, task, 120);
    const auto path = scratch / (std::string(to_string(task)) + ".arff");
    std::ofstream file(path);
    write_arff(ds, file);
    DatasetEntry e;
    e.name = std::string(to_string(task));
    e.path = path.string();
    e.label = ds.label_attribute().name;
    if (task == Task::survival) e.survival_time = "time";
    entries.push_back(e);
  }
  std::map<std::string, std::string> reference;
  for (auto jobs : thread_counts) {
    ExperimentConfig config;
    config.datasets = entries;
    config.parameter_sets = {ParameterSet{"default", {}, nullptr}, ParameterSet{"lenient", {}, nullptr}};
    config.parameter_sets[1].params.minsupp_new = 2;
    config.parameter_sets[1].params.max_uncovered_fraction = 0.1;
    config.evaluation = {true, 4, seed};
    config.report_directory = (scratch / ("jobs" + std::to_string(jobs))).string();
    config.jobs = jobs;
    const auto result = run_experiment(config);
    if (result.exit_code() != 0) out.fail("batch run failed at " + std::to_string(jobs) + " jobs");
    for (const auto& entry : std::filesystem::directory_iterator(config.report_directory)) {
      const auto name = entry.path().filename().string();
      const auto text = ts::read_file(entry.path());
      if (jobs == 1) reference[name] = text;
      else if (reference[name] != text) out.fail("report " + name + " differs at " + std::to_string(jobs) + " jobs");
    }
  }
  // two reports per dataset x parameter set, plus the summary
  if (reference.size() != entries.size() * 2 * 2 + 1) {
    out.fail("unexpected report count " + std::to_string(reference.size()));
  }
  if (out.ok) {
    out.detail = std::to_string(compared) + " model/cv runs and " + std::to_string(reference.size()) +
                 " report files compared across 1/2/8 threads";
  }
  return out;
}

/// Operations a legacy median-centred evaluation spends per candidate: it re-reads every
/// covered label to find the median and count the window.
inline double median_oracle_ops_per_candidate(const DataSet& ds) {
  std::vector<std::size_t> all(ds.size());
  std::iota(all.begin(), all.end(), 0);
  const auto labels = ds.labels();
  std::size_t ops = 0, candidates = 0;
  for (const auto& c : candidate_conditions(ds, all)) {
    std::vector<double> covered;
    for (std::size_t r = 0; r < ds.size(); ++r) {
      if (c.holds(ds.value(r, c.attribute()))) covered.push_back(labels[r]);
    }
    ops += covered.size();  // gather
    std::nth_element(covered.begin(), covered.begin() + static_cast<std::ptrdiff_t>(covered.size() / 2), covered.end());
    const double median = covered[covered.size() / 2];
    const auto [mean, variance] = ts::two_pass_mean_variance(covered);
    const double sigma = std::sqrt(variance);
    std::size_t p = 0;
    for (double y : covered) p += std::abs(y - median) <= sigma;
    ops += 2 * covered.size();  // spread and window passes
    ++candidates;
    (void)mean;
    (void)p;
  }
  return static_cast<double>(ops) / static_cast<double>(candidates);
}

struct RegressionCost {
  std::size_t rows = 0;
  double ops_per_candidate = 0.0;
  std::size_t max_candidate_ops = 0;
  std::size_t label_rescans = 0;
  double median_ops_per_candidate = 0.0;
};

inline RegressionCost regression_cost(std::size_t rows, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto ds = ts::piecewise_regression(rng, rows, 4);
  InductionCounters counters;
  InductionOptions options;
  options.counters = &counters;
  InductionParams params;
  std::vector<std::size_t> all(ds.size());
  std::iota(all.begin(), all.end(), 0);
  grow_rule(ds, std::nullopt, all, params, nullptr, options);
  RegressionCost cost;
  cost.rows = rows;
  cost.ops_per_candidate = static_cast<double>(counters.evaluation_ops) / static_cast<double>(counters.candidates_evaluated);
  cost.max_candidate_ops = counters.max_candidate_ops;
  cost.label_rescans = counters.label_rescans;
  cost.median_ops_per_candidate = median_oracle_ops_per_candidate(ds);
  return cost;
}

/// RRSE < 1 on 20 piecewise-constant datasets, and per-candidate cost that does not grow with
/// the covered set (only logarithmic search terms), unlike the median oracle.
inline Outcome regression_advantage(std::uint64_t seed) {
  Outcome out;
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto all = ts::piecewise_regression(rng, 600, 2 + static_cast<std::size_t>(i % 4));
    std::vector<std::size_t> train(300), test(300);
    std::iota(train.begin(), train.end(), 0);
    std::iota(test.begin(), test.end(), 300);
    const auto model = induce_ruleset(all.subset(train), InductionParams{});
    const auto report = evaluate(model, all.subset(test));
    if (!report.metric || !(*report.metric < 1.0)) {
      out.fail("dataset " + std::to_string(i) + ": RRSE " + (report.metric ? std::to_string(*report.metric) : "undefined"));
    } else {
      worst = std::max(worst, *report.metric);
    }
  }

  const std::size_t sizes[] = {250, 2000, 16000};
  std::vector<RegressionCost> costs;
  for (auto n : sizes) costs.push_back(regression_cost(n, seed + n));
  for (const auto& c : costs) {
    const double log_n = std::ceil(std::log2(static_cast<double>(c.rows) + 1.0));
    const double bound = 6.0 * (log_n + 2.0);  // two Fenwick prefixes + four binary searches
    if (c.label_rescans != 0) out.fail("label re-scans observed at |D|=" + std::to_string(c.rows));
    if (static_cast<double>(c.max_candidate_ops) > bound) {
      out.fail("max per-candidate ops " + std::to_string(c.max_candidate_ops) + " exceeds log bound " +
               std::to_string(bound) + " at |D|=" + std::to_string(c.rows));
    }
  }
  const double growth = costs.back().ops_per_candidate / costs.front().ops_per_candidate;
  const double median_growth = costs.back().median_ops_per_candidate / costs.front().median_ops_per_candidate;
  if (growth > 3.0) out.fail("per-candidate ops grew " + std::to_string(growth) + "x from |D|=250 to 16000");
  if (median_growth < 20.0) out.fail("median oracle growth unexpectedly small: " + std::to_string(median_growth));
  if (out.ok) {
    char buffer[256];
    std::snprintf(buffer, sizeof(buffer),
                  "worst RRSE %.4f; ops/candidate %.1f -> %.1f (x%.2f) vs median oracle %.0f -> %.0f (x%.1f)", worst,
                  costs.front().ops_per_candidate, costs.back().ops_per_candidate, growth,
                  costs.front().median_ops_per_candidate, costs.back().median_ops_per_candidate, median_growth);
    out.detail = buffer;
  }
  return out;
}

/// Class "yes" is reachable through three disjoint single-attribute rules (f1, f2, f3 = t);
/// class "no" has all flags false.
inline DataSet three_route_dataset() {
  std::vector<AttributeMeta> meta{ts::nominal("f1", {"f", "t"}), ts::nominal("f2", {"f", "t"}),
                                  ts::nominal("f3", {"f", "t"}), ts::numeric("noise"),
                                  ts::nominal("class", {"yes", "no"}, Role::label)};
  std::vector<std::vector<double>> columns(5);
  auto row = [&](double a, double b, double c, double noise, double cls) {
    const double values[] = {a, b, c, noise, cls};
    for (std::size_t i = 0; i < 5; ++i) columns[i].push_back(values[i]);
  };
  for (int k = 0; k < 6; ++k) row(1, 0, 0, k, 0);
  for (int k = 0; k < 5; ++k) row(0, 1, 0, k + 0.5, 0);
  for (int k = 0; k < 4; ++k) row(0, 0, 1, k + 0.25, 0);
  for (int k = 0; k < 15; ++k) row(0, 0, 0, k + 0.75, 1);
  return DataSet("routes", std::move(meta), std::move(columns));
}

inline std::size_t rules_for_class(const RuleSet& rs, std::size_t cls) {
  return static_cast<std::size_t>(std::count_if(rs.rules.begin(), rs.rules.end(), [&](const Rule& r) {
    return std::get<ClassConsequence>(r.consequence).label == cls;
  }));
}

/// desired_rule_count is honoured exactly, both below and above the natural rule count.
inline Outcome desired_rule_count() {
  Outcome out;
  const auto ds = three_route_dataset();
  InductionParams natural_params;
  natural_params.minsupp_new = 2;
  const auto natural = rules_for_class(induce_ruleset(ds, natural_params), 0);
  std::string counts;
  for (std::size_t desired : {1, 2, 3}) {
    for (double fraction : {0.0, 0.5}) {
      ExpertKnowledge expert;
      expert.desired_rule_count["yes"] = desired;
      InductionParams params = natural_params;
      params.max_uncovered_fraction = fraction;
      const auto rs = induce_ruleset(ds, params, &expert);
      const auto got = rules_for_class(rs, 0);
      if (got != desired) {
        out.fail("desired " + std::to_string(desired) + " (max_uncovered " + std::to_string(fraction) + ") gave " +
                 std::to_string(got));
      }
      counts += (counts.empty() ? "" : ",") + std::to_string(got);
    }
  }
  if (out.ok) out.detail = "desired 1,2,3 honoured (got " + counts + "; natural " + std::to_string(natural) + ")";
  return out;
}

/// Forbidden attributes never appear in an induced premise.
inline Outcome forbidden_attributes(std::uint64_t seed, std::size_t runs) {
  Outcome out;
  std::mt19937_64 rng(seed);
  std::size_t rules = 0;
  for (std::size_t i = 0; i < runs; ++i) {
    const Task task = static_cast<Task>(i % 3);
    const auto ds = ts::random_dataset(rng, task, ts::uniform(rng, 20, 60), 4);
    const auto regular = ds.regular_attributes();
    ExpertKnowledge expert;
    const auto banned = regular[ts::uniform(rng, 0, regular.size() - 1)];
    expert.forbidden.push_back(ConditionPattern::any_on(banned));
    InductionParams params;
    params.minsupp_new = ts::uniform(rng, 1, 3);
    const auto rs = induce_ruleset(ds, params, &expert);
    for (const auto& rule : rs.rules) {
      ++rules;
      if (rule.premise.contains_attribute(banned)) {
        out.fail("run " + std::to_string(i) + ": " + format_rule(rule, ds.attributes()) + " uses forbidden '" +
                 ds.attribute(banned).name + "'");
      }
    }
  }
  if (out.ok) out.detail = std::to_string(runs) + " runs, " + std::to_string(rules) + " rules, none forbidden";
  return out;
}

}  // namespace properties
