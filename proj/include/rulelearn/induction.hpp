#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "rulelearn/dataset.hpp"
#include "rulelearn/expert.hpp"
#include "rulelearn/measures.hpp"
#include "rulelearn/params.hpp"
#include "rulelearn/rule.hpp"
#include "rulelearn/statistics.hpp"
#include "rulelearn/survival.hpp"

namespace rulelearn {

/// Operation counts gathered while growing rules.
struct InductionCounters {
  std::size_t growth_steps = 0;
  std::size_t candidates_evaluated = 0;
  /// Elementary operations spent inside per-candidate evaluation (index probes, binary-search
  /// steps). Tally maintenance during a sweep is counted separately in `sweep_updates`.
  std::size_t evaluation_ops = 0;
  std::size_t max_candidate_ops = 0;
  std::size_t sweep_updates = 0;
  /// Label reads that re-scan a candidate's covered set; the mean-based path never does this.
  std::size_t label_rescans = 0;

  void merge(const InductionCounters& o) {
    growth_steps += o.growth_steps;
    candidates_evaluated += o.candidates_evaluated;
    evaluation_ops += o.evaluation_ops;
    max_candidate_ops = std::max(max_candidate_ops, o.max_candidate_ops);
    sweep_updates += o.sweep_updates;
    label_rescans += o.label_rescans;
  }
};

enum class LoopExit { coverage_reached, desired_count_reached, growth_failed, too_few_positives };

/// One record per accepted rule, for auditing the covering loop.
struct RuleTrace {
  std::optional<std::size_t> target;
  Premise grown;
  Premise pruned;
  double grown_pruning_quality = 0.0;
  double pruned_pruning_quality = 0.0;
  std::size_t new_positives = 0;  // previously uncovered positives covered at creation
  std::size_t uncovered_before = 0;
  bool from_expert = false;
};

struct LoopTrace {
  std::optional<std::size_t> target;
  std::size_t positives = 0;
  std::size_t uncovered_after = 0;
  std::size_t rules = 0;
  LoopExit exit = LoopExit::coverage_reached;
};

struct InductionTrace {
  std::vector<RuleTrace> rules;
  std::vector<LoopTrace> loops;
};

struct InductionOptions {
  std::size_t threads = 1;
  InductionCounters* counters = nullptr;
  InductionTrace* trace = nullptr;
};

/// Candidate pool for one growth step: equality per nominal symbol present in `covered`, and
/// (<= m), (> m) per midpoint m of consecutive distinct covered numeric values. Ordered by
/// attribute index, then value.
inline std::vector<ElementaryCondition> candidate_conditions(const DataSet& ds, std::span<const std::size_t> covered,
                                                             const ExpertKnowledge* expert = nullptr,
                                                             std::optional<std::size_t> target = std::nullopt) {
  std::vector<ElementaryCondition> out;
  for (auto a : ds.regular_attributes()) {
    const auto& meta = ds.attribute(a);
    auto column = ds.column(a);
    std::vector<ElementaryCondition> pool;
    if (meta.is_nominal()) {
      std::vector<bool> present(meta.domain.size(), false);
      for (auto r : covered) {
        if (!is_missing(column[r])) present[static_cast<std::size_t>(column[r])] = true;
      }
      for (std::size_t s = 0; s < present.size(); ++s) {
        if (present[s]) pool.push_back(ElementaryCondition::equals(a, s));
      }
    } else {
      std::vector<double> values;
      for (auto r : covered) {
        if (!is_missing(column[r])) values.push_back(column[r]);
      }
      std::sort(values.begin(), values.end());
      values.erase(std::unique(values.begin(), values.end()), values.end());
      for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        const double m = std::midpoint(values[i], values[i + 1]);
        pool.push_back(ElementaryCondition::at_most(a, m));
        pool.push_back(ElementaryCondition::greater(a, m));
      }
    }
    for (auto& c : pool) {
      if (!expert || !expert->is_forbidden(c, target)) out.push_back(c);
    }
  }
  return out;
}

namespace detail {

/// Counts over label ranks with O(log n) update and prefix query.
class Fenwick {
 public:
  explicit Fenwick(std::size_t n = 0) : tree_(n + 1, 0) {}

  void add(std::size_t index, long delta) {
    for (std::size_t i = index + 1; i < tree_.size(); i += i & (~i + 1)) tree_[i] += delta;
  }
  /// Sum over [0, end).
  long prefix(std::size_t end, std::size_t& ops) const {
    long s = 0;
    for (std::size_t i = end; i > 0; i -= i & (~i + 1)) {
      s += tree_[i];
      ++ops;
    }
    return s;
  }
  long range(std::size_t begin, std::size_t end, std::size_t& ops) const {
    return end <= begin ? 0 : prefix(end, ops) - prefix(begin, ops);
  }

 private:
  std::vector<long> tree_;
};

inline std::size_t search_steps(std::size_t n) {
  std::size_t steps = 1;
  while (n > 1) {
    n >>= 1;
    ++steps;
  }
  return steps;
}

struct CandidateScore {
  double quality = 0.0;
  std::size_t p = 0;
  std::size_t fresh = 0;
};

/// Shared, read-only state of one covering loop.
struct LoopContext {
  const DataSet* ds = nullptr;
  Task task = Task::classification;
  std::optional<std::size_t> target;
  MeasureId measure = MeasureId::c2;
  std::vector<std::uint8_t> positive;  // classification: label == target
  std::vector<std::uint8_t> fresh;     // uncovered positives
  std::size_t P = 0, N = 0;

  // regression
  std::span<const double> labels;
  std::vector<double> sorted_labels;  // all labels, ascending
  std::vector<double> unique_labels;
  std::vector<std::size_t> label_rank;  // index into unique_labels

  // survival
  std::vector<std::size_t> bucket;  // number of event times <= time(row)
  std::vector<std::uint8_t> event;
  std::vector<std::size_t> at_risk, events;  // dataset totals per event time
};

class ClassificationTally {
 public:
  explicit ClassificationTally(const LoopContext& ctx) : ctx_(&ctx) {}
  void push(std::size_t r) {
    ctx_->positive[r] ? ++pos_ : ++neg_;
    fresh_ += ctx_->fresh[r];
  }
  void remove(std::size_t r) {
    ctx_->positive[r] ? --pos_ : --neg_;
    fresh_ -= ctx_->fresh[r];
  }
  std::size_t count() const { return pos_ + neg_; }
  std::size_t fresh() const { return fresh_; }
  CandidateScore evaluate(std::size_t& ops) const {
    ++ops;
    return {measure_value(ctx_->measure, Covering{pos_, neg_, ctx_->P, ctx_->N}), pos_, fresh_};
  }

 private:
  const LoopContext* ctx_;
  std::size_t pos_ = 0, neg_ = 0, fresh_ = 0;
};

/// Mean-based regression: mean and variance are maintained by an accumulator, the sigma-window
/// count of covered labels by a Fenwick tree over label ranks, and the dataset-wide window count
/// by binary search. No covered label is re-read during evaluation.
class RegressionTally {
 public:
  explicit RegressionTally(const LoopContext& ctx) : ctx_(&ctx), ranks_(ctx.unique_labels.size()) {}
  void push(std::size_t r) {
    acc_.push(ctx_->labels[r]);
    ranks_.add(ctx_->label_rank[r], 1);
    fresh_ += ctx_->fresh[r];
  }
  void remove(std::size_t r) {
    acc_.remove(ctx_->labels[r]);
    ranks_.add(ctx_->label_rank[r], -1);
    fresh_ -= ctx_->fresh[r];
  }
  std::size_t count() const { return acc_.count(); }
  std::size_t fresh() const { return fresh_; }
  CandidateScore evaluate(std::size_t& ops) const {
    const auto window = SigmaWindow::around(acc_.mean(), acc_.stddev());
    const auto& u = ctx_->unique_labels;
    const auto& all = ctx_->sorted_labels;
    auto lo = static_cast<std::size_t>(std::lower_bound(u.begin(), u.end(), window.lower) - u.begin());
    auto hi = static_cast<std::size_t>(std::upper_bound(u.begin(), u.end(), window.upper) - u.begin());
    ops += 2 * search_steps(u.size());
    const auto p = static_cast<std::size_t>(ranks_.range(lo, hi, ops));
    const auto P = static_cast<std::size_t>(std::upper_bound(all.begin(), all.end(), window.upper) -
                                            std::lower_bound(all.begin(), all.end(), window.lower));
    ops += 2 * search_steps(all.size());
    const Covering c{p, acc_.count() - p, P, all.size() - P};
    return {measure_value(ctx_->measure, c), p, fresh_};
  }

 private:
  const LoopContext* ctx_;
  StatAccumulator acc_;
  Fenwick ranks_;
  std::size_t fresh_ = 0;
};

/// Survival: per-event-time histograms of the covered group; quality = 1 - log-rank p-value of
/// covered versus not covered.
class SurvivalTally {
 public:
  explicit SurvivalTally(const LoopContext& ctx)
      : ctx_(&ctx), by_bucket_(ctx.at_risk.size() + 1, 0), events_(ctx.at_risk.size(), 0) {}
  void push(std::size_t r) {
    ++by_bucket_[ctx_->bucket[r]];
    if (ctx_->event[r]) ++events_[ctx_->bucket[r] - 1];
    ++count_;
    fresh_ += ctx_->fresh[r];
  }
  void remove(std::size_t r) {
    --by_bucket_[ctx_->bucket[r]];
    if (ctx_->event[r]) --events_[ctx_->bucket[r] - 1];
    --count_;
    fresh_ -= ctx_->fresh[r];
  }
  std::size_t count() const { return count_; }
  std::size_t fresh() const { return fresh_; }
  CandidateScore evaluate(std::size_t& ops) const {
    const std::size_t m = events_.size();
    ops += m + 1;
    if (count_ == 0 || count_ == ctx_->ds->size()) return {0.0, count_, fresh_};
    std::vector<std::size_t> at_risk(m);
    std::size_t running = 0;
    for (std::size_t j = m; j-- > 0;) {
      running += by_bucket_[j + 1];
      at_risk[j] = running;
    }
    const auto result = log_rank_from_counts(ctx_->at_risk, ctx_->events, at_risk, events_);
    return {1.0 - result.p_value, count_, fresh_};
  }

 private:
  const LoopContext* ctx_;
  std::vector<std::size_t> by_bucket_;
  std::vector<std::size_t> events_;
  std::size_t count_ = 0, fresh_ = 0;
};

struct ScoredCandidate {
  ElementaryCondition condition;
  CandidateScore score;
  std::size_t order = 0;  // position within its attribute's pool
};

/// Strict preference: higher quality, then larger p, then earlier candidate.
inline bool better(const CandidateScore& a, std::size_t order_a, const CandidateScore& b, std::size_t order_b) {
  if (a.quality != b.quality) return a.quality > b.quality;
  if (a.p != b.p) return a.p > b.p;
  return order_a < order_b;
}

struct AttributeResult {
  std::optional<ScoredCandidate> best;
  InductionCounters counters;
};

template <class Tally>
AttributeResult sweep_attribute(const LoopContext& ctx, std::size_t attribute, std::span<const std::size_t> covered,
                                std::size_t minsupp, const ExpertKnowledge* expert) {
  AttributeResult result;
  auto& counters = result.counters;
  const auto& meta = ctx.ds->attribute(attribute);
  auto column = ctx.ds->column(attribute);

  auto consider = [&](const ElementaryCondition& condition, const Tally& tally, std::size_t order) {
    if (tally.fresh() < minsupp) return;
    if (expert && expert->is_forbidden(condition, ctx.target)) return;
    std::size_t ops = 0;
    auto score = tally.evaluate(ops);
    ++counters.candidates_evaluated;
    counters.evaluation_ops += ops;
    counters.max_candidate_ops = std::max(counters.max_candidate_ops, ops);
    if (!result.best || better(score, order, result.best->score, result.best->order)) {
      result.best = ScoredCandidate{condition, score, order};
    }
  };

  if (meta.is_nominal()) {
    std::vector<std::vector<std::size_t>> groups(meta.domain.size());
    for (auto r : covered) {
      if (!is_missing(column[r])) groups[static_cast<std::size_t>(column[r])].push_back(r);
    }
    Tally tally(ctx);
    std::size_t order = 0;
    for (std::size_t s = 0; s < groups.size(); ++s) {
      if (groups[s].empty()) continue;
      for (auto r : groups[s]) tally.push(r);
      counters.sweep_updates += groups[s].size();
      consider(ElementaryCondition::equals(attribute, s), tally, order++);
      for (auto r : groups[s]) tally.remove(r);
      counters.sweep_updates += groups[s].size();
    }
    return result;
  }

  std::vector<std::size_t> rows;
  rows.reserve(covered.size());
  for (auto r : covered) {
    if (!is_missing(column[r])) rows.push_back(r);
  }
  std::sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
    return column[a] < column[b] || (column[a] == column[b] && a < b);
  });
  // Both sides are built by insertion only: a forward pass for (<= m), a backward pass for (> m).
  Tally below(ctx);
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    below.push(rows[i]);
    ++counters.sweep_updates;
    const double v = column[rows[i]], next = column[rows[i + 1]];
    if (v < next) consider(ElementaryCondition::at_most(attribute, std::midpoint(v, next)), below, 2 * i);
  }
  Tally above(ctx);
  for (std::size_t i = rows.size(); i-- > 1;) {
    above.push(rows[i]);
    ++counters.sweep_updates;
    const double previous = column[rows[i - 1]], v = column[rows[i]];
    if (previous < v) {
      consider(ElementaryCondition::greater(attribute, std::midpoint(previous, v)), above, 2 * (i - 1) + 1);
    }
  }
  return result;
}

/// Runs fn(i) for i in [0, count) on up to `threads` workers.
template <class Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) fn(i);
  };
  std::vector<std::jthread> workers;
  workers.reserve(threads - 1);
  for (std::size_t t = 1; t < threads; ++t) workers.emplace_back(work);
  work();
}

class Inducer {
 public:
  Inducer(const DataSet& ds, const InductionParams& params, const ExpertKnowledge* expert,
          const InductionOptions& options)
      : ds_(ds), params_(params), expert_(expert), options_(options), task_(ds.task()) {
    params_.validate();
    if (expert_) {
      expert_->validate(ds.attributes());
      for (const auto& p : expert_->preferred) budgets_.push_back(p.budget);
    }
    ctx_.ds = &ds_;
    ctx_.task = task_;
    ctx_.labels = ds_.labels();
    ctx_.fresh.assign(ds_.size(), 0);
    if (task_ == Task::regression) {
      ctx_.sorted_labels.assign(ctx_.labels.begin(), ctx_.labels.end());
      std::sort(ctx_.sorted_labels.begin(), ctx_.sorted_labels.end());
      ctx_.unique_labels = ctx_.sorted_labels;
      ctx_.unique_labels.erase(std::unique(ctx_.unique_labels.begin(), ctx_.unique_labels.end()),
                               ctx_.unique_labels.end());
      ctx_.label_rank.resize(ds_.size());
      for (std::size_t r = 0; r < ds_.size(); ++r) {
        ctx_.label_rank[r] = static_cast<std::size_t>(
            std::lower_bound(ctx_.unique_labels.begin(), ctx_.unique_labels.end(), ctx_.labels[r]) -
            ctx_.unique_labels.begin());
      }
    }
    if (task_ == Task::survival) {
      auto times = ds_.survival_times();
      std::vector<double> event_times;
      ctx_.event.resize(ds_.size());
      for (std::size_t r = 0; r < ds_.size(); ++r) {
        ctx_.event[r] = ctx_.labels[r] == 1.0;
        if (ctx_.event[r]) event_times.push_back(times[r]);
      }
      std::sort(event_times.begin(), event_times.end());
      event_times.erase(std::unique(event_times.begin(), event_times.end()), event_times.end());
      const std::size_t m = event_times.size();
      ctx_.bucket.resize(ds_.size());
      std::vector<std::size_t> by_bucket(m + 1, 0);
      ctx_.events.assign(m, 0);
      for (std::size_t r = 0; r < ds_.size(); ++r) {
        ctx_.bucket[r] = static_cast<std::size_t>(
            std::upper_bound(event_times.begin(), event_times.end(), times[r]) - event_times.begin());
        ++by_bucket[ctx_.bucket[r]];
        if (ctx_.event[r]) ++ctx_.events[ctx_.bucket[r] - 1];
      }
      ctx_.at_risk.assign(m, 0);
      std::size_t running = 0;
      for (std::size_t j = m; j-- > 0;) {
        running += by_bucket[j + 1];
        ctx_.at_risk[j] = running;
      }
    }
  }

  /// Prepares the loop state for one target (class index, or none for regression/survival).
  void begin_loop(std::optional<std::size_t> target, std::span<const std::size_t> uncovered) {
    ctx_.target = target;
    ctx_.measure = params_.induction_measure;
    std::fill(ctx_.fresh.begin(), ctx_.fresh.end(), 0);
    for (auto r : uncovered) ctx_.fresh[r] = 1;
    if (task_ == Task::classification) {
      ctx_.positive.assign(ds_.size(), 0);
      ctx_.P = 0;
      for (std::size_t r = 0; r < ds_.size(); ++r) {
        ctx_.positive[r] = ctx_.labels[r] == static_cast<double>(*target);
        ctx_.P += ctx_.positive[r];
      }
      ctx_.N = ds_.size() - ctx_.P;
    }
  }

  std::size_t fresh_count(std::span<const std::size_t> rows) const {
    std::size_t n = 0;
    for (auto r : rows) n += ctx_.fresh[r];
    return n;
  }

  /// Quality of a premise under `measure`, computed directly from its coverage.
  double quality(const Premise& premise, MeasureId measure) const {
    if (task_ == Task::survival) {
      std::vector<SurvivalObservation> inside, outside;
      auto times = ds_.survival_times();
      for (std::size_t r = 0; r < ds_.size(); ++r) {
        (premise.covers(ds_, r) ? inside : outside).push_back({times[r], ctx_.event[r] != 0});
      }
      if (inside.empty() || outside.empty()) return 0.0;
      return 1.0 - log_rank(inside, outside).p_value;
    }
    return measure_value(measure, covering_stats(premise, ctx_.target, ds_));
  }

  std::optional<Premise> grow(Premise premise) {
    auto covered = covered_rows(premise, ds_);
    if (fresh_count(covered) < params_.minsupp_new) return std::nullopt;
    double current = quality(premise, params_.induction_measure);
    const auto attributes = ds_.regular_attributes();
    std::size_t steps = 0;
    std::vector<bool> used_preferred(budgets_.size(), false);

    while (params_.max_growing_conditions == 0 || steps < params_.max_growing_conditions) {
      std::vector<AttributeResult> results(attributes.size());
      parallel_for(attributes.size(), options_.threads, [&](std::size_t i) {
        const auto a = attributes[i];
        if (expert_ && expert_->attribute_forbidden(a, ctx_.target)) return;
        if (ds_.attribute(a).is_nominal() && premise.contains_attribute(a)) return;
        switch (task_) {
          case Task::classification:
            results[i] = sweep_attribute<ClassificationTally>(ctx_, a, covered, params_.minsupp_new, expert_);
            break;
          case Task::regression:
            results[i] = sweep_attribute<RegressionTally>(ctx_, a, covered, params_.minsupp_new, expert_);
            break;
          case Task::survival:
            results[i] = sweep_attribute<SurvivalTally>(ctx_, a, covered, params_.minsupp_new, expert_);
            break;
        }
      });
      InductionCounters step;
      step.growth_steps = 1;
      for (const auto& r : results) step.merge(r.counters);
      step.growth_steps = 1;
      counters_.merge(step);

      std::optional<ElementaryCondition> chosen;
      double chosen_quality = current;
      if (auto pick = best_preferred(premise, covered, attributes, results, used_preferred);
          pick && pick->score.quality > current) {
        chosen = pick->condition;
        chosen_quality = pick->score.quality;
        used_preferred[pick->order] = true;
      } else {
        std::optional<std::size_t> best;
        for (std::size_t i = 0; i < results.size(); ++i) {
          const auto& r = results[i].best;
          if (!r) continue;
          if (!best || better(r->score, i, results[*best].best->score, *best)) best = i;
        }
        if (best && results[*best].best->score.quality > current) {
          chosen = results[*best].best->condition;
          chosen_quality = results[*best].best->score.quality;
        }
      }
      if (!chosen) break;
      premise.add(*chosen);
      std::vector<std::size_t> next;
      next.reserve(covered.size());
      for (auto r : covered) {
        if (chosen->holds(ds_.value(r, chosen->attribute()))) next.push_back(r);
      }
      covered = std::move(next);
      current = chosen_quality;
      ++steps;
    }
    if (premise.empty()) return std::nullopt;
    for (std::size_t i = 0; i < used_preferred.size(); ++i) {
      if (used_preferred[i]) --budgets_[i];
    }
    return premise;
  }

  Premise prune(Premise premise, double* before = nullptr, double* after = nullptr) const {
    double current = quality(premise, params_.pruning_measure);
    if (before) *before = current;
    while (params_.pruning_enabled && premise.size() > 1) {
      std::optional<std::size_t> best;
      double best_quality = 0.0;
      for (std::size_t i = 0; i < premise.size(); ++i) {
        auto candidate = premise.without(i);
        if (fresh_count(covered_rows(candidate, ds_)) < params_.minsupp_new) continue;
        const double q = quality(candidate, params_.pruning_measure);
        if (!best || q > best_quality) {
          best = i;
          best_quality = q;
        }
      }
      if (!best || best_quality < current) break;
      premise = premise.without(*best);
      current = best_quality;
    }
    if (after) *after = current;
    return premise;
  }

  Rule finalize(const Premise& premise) const {
    Rule rule;
    rule.premise = premise;
    const auto rows = covered_rows(premise, ds_);
    rule.covering = covering_stats(premise, ctx_.target, ds_);
    switch (task_) {
      case Task::classification:
        rule.consequence = ClassConsequence{*ctx_.target};
        rule.voting_weight = measure_value(params_.voting_measure, rule.covering);
        rule.p_value = hypergeometric_pvalue(rule.covering);
        break;
      case Task::regression: {
        StatAccumulator acc;
        for (auto r : rows) acc.push(ctx_.labels[r]);
        rule.consequence = RegressionConsequence{acc.mean(), acc.stddev()};
        rule.voting_weight = measure_value(params_.voting_measure, rule.covering);
        rule.p_value = hypergeometric_pvalue(rule.covering);
        break;
      }
      case Task::survival: {
        auto times = ds_.survival_times();
        std::vector<SurvivalObservation> inside, outside;
        for (std::size_t r = 0; r < ds_.size(); ++r) {
          (premise.covers(ds_, r) ? inside : outside).push_back({times[r], ctx_.event[r] != 0});
        }
        rule.consequence = SurvivalConsequence{kaplan_meier(inside)};
        rule.voting_weight = 1.0;
        rule.p_value = outside.empty() ? 1.0 : log_rank(inside, outside).p_value;
        break;
      }
    }
    return rule;
  }

  RuleSet run() {
    RuleSet rs;
    rs.task = task_;
    rs.schema.assign(ds_.attributes().begin(), ds_.attributes().end());
    rs.params_used = params_;
    if (ds_.size() == 0) throw std::invalid_argument("cannot induce rules from an empty dataset");

    if (task_ == Task::classification) {
      const auto& label = ds_.label_attribute();
      rs.class_counts.assign(label.domain.size(), 0);
      for (double y : ctx_.labels) ++rs.class_counts[static_cast<std::size_t>(y)];
      for (std::size_t c = 0; c < label.domain.size(); ++c) {
        std::vector<std::size_t> positives;
        for (std::size_t r = 0; r < ds_.size(); ++r) {
          if (ctx_.labels[r] == static_cast<double>(c)) positives.push_back(r);
        }
        covering_loop(rs, c, std::move(positives), label.domain[c]);
      }
    } else {
      std::vector<std::size_t> all(ds_.size());
      std::iota(all.begin(), all.end(), 0);
      covering_loop(rs, std::nullopt, std::move(all), "*");
    }

    rs.default_model = default_model();
    if (params_.significance_filter) {
      std::erase_if(rs.rules, [&](const Rule& r) { return r.p_value > params_.significance_level; });
    }
    if (options_.counters) options_.counters->merge(counters_);
    return rs;
  }

  const InductionCounters& counters() const { return counters_; }
  void set_target(std::optional<std::size_t> target, std::span<const std::size_t> uncovered) {
    begin_loop(target, uncovered);
  }

 private:
  /// Best applicable preferred condition; `order` of the result is its index in the preferred list.
  std::optional<ScoredCandidate> best_preferred(const Premise& premise, std::span<const std::size_t> covered,
                                                std::span<const std::size_t> attributes,
                                                const std::vector<AttributeResult>& results,
                                                const std::vector<bool>& used) const {
    if (!expert_) return std::nullopt;
    std::optional<ScoredCandidate> best;
    for (std::size_t i = 0; i < expert_->preferred.size(); ++i) {
      const auto& pref = expert_->preferred[i];
      if (budgets_[i] == 0 || used[i] || !pref.pattern.applies_to(ctx_.target)) continue;
      std::optional<ScoredCandidate> option;
      if (pref.pattern.condition) {
        const auto& c = *pref.pattern.condition;
        if (ds_.attribute(c.attribute()).is_nominal() && premise.contains_attribute(c.attribute())) continue;
        Premise extended = premise;
        try {
          extended.add(c);
        } catch (const std::invalid_argument&) {
          continue;
        }
        std::vector<std::size_t> rows;
        for (auto r : covered) {
          if (c.holds(ds_.value(r, c.attribute()))) rows.push_back(r);
        }
        if (rows.empty() || fresh_count(rows) < params_.minsupp_new) continue;
        const double q = quality(extended, params_.induction_measure);
        std::size_t p = rows.size();
        if (task_ != Task::survival) p = covering_stats(extended, ctx_.target, ds_).p;
        option = ScoredCandidate{c, CandidateScore{q, p, fresh_count(rows)}, i};
      } else {
        auto it = std::find(attributes.begin(), attributes.end(), pref.pattern.attribute);
        if (it == attributes.end()) continue;
        const auto& r = results[static_cast<std::size_t>(it - attributes.begin())].best;
        if (!r) continue;
        option = ScoredCandidate{r->condition, r->score, i};
      }
      if (!best || better(option->score, i, best->score, best->order)) best = option;
    }
    return best;
  }

  void covering_loop(RuleSet& rs, std::optional<std::size_t> target, std::vector<std::size_t> uncovered,
                     const std::string& key) {
    LoopTrace loop;
    loop.target = target;
    loop.positives = uncovered.size();
    const std::size_t total = uncovered.size();
    const std::string label = target ? "class '" + key + "'" : std::string("dataset");
    std::optional<std::size_t> desired;
    if (expert_) {
      if (auto it = expert_->desired_rule_count.find(key); it != expert_->desired_rule_count.end()) desired = it->second;
    }

    auto record = [&] {
      loop.uncovered_after = uncovered.size();
      if (options_.trace) options_.trace->loops.push_back(loop);
    };

    if (total < params_.minsupp_new) {
      rs.warnings.push_back(label + " has " + std::to_string(total) + " positive examples, fewer than minsupp_new=" +
                            std::to_string(params_.minsupp_new) + "; no rules induced");
      loop.exit = LoopExit::too_few_positives;
      record();
      return;
    }

    auto accept = [&](const Premise& grown, bool from_expert) {
      RuleTrace trace;
      trace.target = target;
      trace.grown = grown;
      trace.from_expert = from_expert;
      trace.uncovered_before = uncovered.size();
      trace.pruned = prune(grown, &trace.grown_pruning_quality, &trace.pruned_pruning_quality);
      auto rule = finalize(trace.pruned);
      std::vector<std::size_t> remaining;
      for (auto r : uncovered) {
        if (rule.premise.covers(ds_, r)) {
          ++trace.new_positives;
        } else {
          remaining.push_back(r);
        }
      }
      uncovered = std::move(remaining);
      rs.rules.push_back(std::move(rule));
      ++loop.rules;
      if (options_.trace) options_.trace->rules.push_back(std::move(trace));
    };

    if (expert_) {
      for (const auto& initial : expert_->initial_rules) {
        if (task_ == Task::classification ? initial.target_class != target : initial.target_class.has_value()) continue;
        begin_loop(target, uncovered);
        auto grown = grow(initial.premise);
        if (!grown) {
          rs.warnings.push_back("initial rule for " + label + " covers fewer than minsupp_new uncovered examples; skipped");
          continue;
        }
        accept(*grown, true);
      }
    }

    loop.exit = LoopExit::coverage_reached;
    const double limit = params_.max_uncovered_fraction * static_cast<double>(total);
    while (true) {
      if (desired) {
        if (loop.rules >= *desired) {
          loop.exit = LoopExit::desired_count_reached;
          break;
        }
      } else if (static_cast<double>(uncovered.size()) <= limit) {
        loop.exit = LoopExit::coverage_reached;
        break;
      }
      begin_loop(target, uncovered);
      auto grown = grow(Premise{});
      if (!grown) {
        loop.exit = LoopExit::growth_failed;
        break;
      }
      accept(*grown, false);
    }
    record();
  }

  Consequence default_model() const {
    switch (task_) {
      case Task::classification: {
        const auto& label = ds_.label_attribute();
        std::vector<std::size_t> counts(label.domain.size(), 0);
        for (double y : ctx_.labels) ++counts[static_cast<std::size_t>(y)];
        auto best = std::max_element(counts.begin(), counts.end());
        return ClassConsequence{static_cast<std::size_t>(best - counts.begin())};
      }
      case Task::regression: {
        StatAccumulator acc;
        for (double y : ctx_.labels) acc.push(y);
        return RegressionConsequence{acc.mean(), acc.stddev()};
      }
      case Task::survival:
        return SurvivalConsequence{kaplan_meier(ds_.survival_times(), ctx_.labels)};
    }
    return ClassConsequence{};
  }

  const DataSet& ds_;
  InductionParams params_;
  const ExpertKnowledge* expert_;
  InductionOptions options_;
  Task task_;
  LoopContext ctx_;
  std::vector<std::size_t> budgets_;
  InductionCounters counters_;
};

}  // namespace detail

/// Separate-and-conquer induction of a rule set.
inline RuleSet induce_ruleset(const DataSet& ds, const InductionParams& params, const ExpertKnowledge* expert = nullptr,
                              const InductionOptions& options = {}) {
  detail::Inducer inducer(ds, params, expert, options);
  return inducer.run();
}

/// Grows one rule from an empty premise for `target` (class index; none for regression and
/// survival) given the currently uncovered positives. Returns nothing when no rule covering at
/// least minsupp_new uncovered positives improves on the empty rule.
inline std::optional<Rule> grow_rule(const DataSet& ds, std::optional<std::size_t> target,
                                     std::span<const std::size_t> uncovered, const InductionParams& params,
                                     const ExpertKnowledge* expert = nullptr, const InductionOptions& options = {}) {
  if (ds.task() == Task::classification && !target) throw std::invalid_argument("classification growth needs a target");
  detail::Inducer inducer(ds, params, expert, options);
  inducer.set_target(target, uncovered);
  auto premise = inducer.grow(Premise{});
  if (options.counters) options.counters->merge(inducer.counters());
  if (!premise) return std::nullopt;
  return inducer.finalize(*premise);
}

/// Greedy backward elimination of conditions under the pruning measure.
inline Rule prune_rule(const Rule& rule, const DataSet& ds, std::span<const std::size_t> uncovered,
                       const InductionParams& params) {
  std::optional<std::size_t> target;
  if (auto* c = std::get_if<ClassConsequence>(&rule.consequence)) target = c->label;
  detail::Inducer inducer(ds, params, nullptr, {});
  inducer.set_target(target, uncovered);
  if (!params.pruning_enabled) return rule;
  return inducer.finalize(inducer.prune(rule.premise));
}

}  // namespace rulelearn
