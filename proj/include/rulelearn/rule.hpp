#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rulelearn/covering.hpp"
#include "rulelearn/dataset.hpp"
#include "rulelearn/params.hpp"
#include "rulelearn/statistics.hpp"
#include "rulelearn/survival.hpp"

namespace rulelearn {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

/// Interval over a numeric attribute. Infinite bounds are always open.
struct Interval {
  double lower = -infinity;
  double upper = infinity;
  bool lower_closed = false;
  bool upper_closed = false;

  bool contains(double x) const {
    if (lower_closed ? x < lower : x <= lower) return false;
    if (upper_closed ? x > upper : x >= upper) return false;
    return true;
  }

  bool valid() const {
    if (std::isnan(lower) || std::isnan(upper)) return false;
    if (lower == -infinity && lower_closed) return false;
    if (upper == infinity && upper_closed) return false;
    return lower < upper || (lower == upper && lower_closed && upper_closed);
  }

  bool operator==(const Interval&) const = default;
};

inline std::optional<Interval> intersect(const Interval& a, const Interval& b) {
  Interval out;
  if (a.lower > b.lower) {
    out.lower = a.lower, out.lower_closed = a.lower_closed;
  } else if (b.lower > a.lower) {
    out.lower = b.lower, out.lower_closed = b.lower_closed;
  } else {
    out.lower = a.lower, out.lower_closed = a.lower_closed && b.lower_closed;
  }
  if (a.upper < b.upper) {
    out.upper = a.upper, out.upper_closed = a.upper_closed;
  } else if (b.upper < a.upper) {
    out.upper = b.upper, out.upper_closed = b.upper_closed;
  } else {
    out.upper = a.upper, out.upper_closed = a.upper_closed && b.upper_closed;
  }
  if (!out.valid()) return std::nullopt;
  return out;
}

class ElementaryCondition {
 public:
  struct Equals {
    std::size_t symbol = 0;
    bool operator==(const Equals&) const = default;
  };
  using Relation = std::variant<Equals, Interval>;

  ElementaryCondition() = default;
  ElementaryCondition(std::size_t attribute, Relation relation) : attribute_(attribute), relation_(relation) {
    if (auto* iv = std::get_if<Interval>(&relation_); iv && !iv->valid()) {
      throw std::invalid_argument("invalid interval condition");
    }
  }

  static ElementaryCondition equals(std::size_t attribute, std::size_t symbol) {
    return {attribute, Equals{symbol}};
  }
  /// (-inf, threshold]
  static ElementaryCondition at_most(std::size_t attribute, double threshold) {
    return {attribute, Interval{-infinity, threshold, false, true}};
  }
  /// (threshold, +inf)
  static ElementaryCondition greater(std::size_t attribute, double threshold) {
    return {attribute, Interval{threshold, infinity, false, false}};
  }

  std::size_t attribute() const { return attribute_; }
  bool is_equals() const { return std::holds_alternative<Equals>(relation_); }
  std::size_t symbol() const { return std::get<Equals>(relation_).symbol; }
  const Interval& interval() const { return std::get<Interval>(relation_); }
  const Relation& relation() const { return relation_; }

  /// A missing cell never satisfies a condition.
  bool holds(double value) const {
    if (is_missing(value)) return false;
    if (auto* eq = std::get_if<Equals>(&relation_)) return value == static_cast<double>(eq->symbol);
    return std::get<Interval>(relation_).contains(value);
  }

  void validate(std::span<const AttributeMeta> schema) const {
    if (attribute_ >= schema.size()) throw SchemaError("condition attribute index out of range");
    const auto& meta = schema[attribute_];
    if (is_equals()) {
      if (!meta.is_nominal()) throw SchemaError("equality condition on numeric attribute '" + meta.name + "'");
      if (symbol() >= meta.domain.size()) throw SchemaError("condition symbol outside domain of '" + meta.name + "'");
    } else if (!meta.is_numeric()) {
      throw SchemaError("interval condition on nominal attribute '" + meta.name + "'");
    }
  }

  bool operator==(const ElementaryCondition&) const = default;

 private:
  std::size_t attribute_ = 0;
  Relation relation_;
};

/// Conjunction of conditions, at most one per attribute.
class Premise {
 public:
  Premise() = default;
  explicit Premise(std::vector<ElementaryCondition> conditions) {
    for (const auto& c : conditions) add(c);
  }

  /// Adds a condition; interval conditions on an attribute already present are intersected.
  void add(const ElementaryCondition& condition) {
    for (auto& existing : conditions_) {
      if (existing.attribute() != condition.attribute()) continue;
      if (existing.is_equals() || condition.is_equals()) {
        if (existing == condition) return;
        throw std::invalid_argument("conflicting conditions on one attribute");
      }
      auto merged = intersect(existing.interval(), condition.interval());
      if (!merged) throw std::invalid_argument("empty interval intersection");
      existing = ElementaryCondition(existing.attribute(), *merged);
      return;
    }
    conditions_.push_back(condition);
  }

  Premise without(std::size_t index) const {
    Premise out = *this;
    out.conditions_.erase(out.conditions_.begin() + static_cast<std::ptrdiff_t>(index));
    return out;
  }

  bool contains_attribute(std::size_t attribute) const {
    return std::any_of(conditions_.begin(), conditions_.end(),
                       [&](const auto& c) { return c.attribute() == attribute; });
  }

  const std::vector<ElementaryCondition>& conditions() const { return conditions_; }
  std::size_t size() const { return conditions_.size(); }
  bool empty() const { return conditions_.empty(); }

  bool covers(const DataSet& ds, std::size_t row) const {
    for (const auto& c : conditions_) {
      if (c.attribute() >= ds.attribute_count()) throw SchemaError("condition attribute index out of range");
      if (!c.holds(ds.value(row, c.attribute()))) return false;
    }
    return true;
  }

  bool operator==(const Premise&) const = default;

 private:
  std::vector<ElementaryCondition> conditions_;
};

inline bool covers(const Premise& premise, const DataSet& ds, std::size_t row) { return premise.covers(ds, row); }

struct ClassConsequence {
  std::size_t label = 0;
  bool operator==(const ClassConsequence&) const = default;
};
struct RegressionConsequence {
  double mean = 0.0;
  double sigma = 0.0;
  bool operator==(const RegressionConsequence&) const = default;
};
struct SurvivalConsequence {
  KaplanMeierEstimate estimate;
  bool operator==(const SurvivalConsequence&) const = default;
};
using Consequence = std::variant<ClassConsequence, RegressionConsequence, SurvivalConsequence>;

struct Rule {
  Premise premise;
  Consequence consequence;
  Covering covering;
  double voting_weight = 1.0;
  double p_value = 1.0;

  bool operator==(const Rule&) const = default;
};

struct RuleSet {
  Task task = Task::classification;
  std::vector<AttributeMeta> schema;
  std::vector<Rule> rules;
  Consequence default_model;
  InductionParams params_used;
  std::vector<std::size_t> class_counts;  // training prior per label symbol (classification)
  std::vector<std::string> warnings;

  bool operator==(const RuleSet&) const = default;
};

/// Closed window [lower, upper] around a regression rule's mean: |y - mean| <= sigma, widened by
/// a relative 1e-10 so incremental and two-pass statistics classify boundary labels alike.
struct SigmaWindow {
  double lower = 0.0;
  double upper = 0.0;

  static SigmaWindow around(double mean, double sigma) {
    const double half = sigma + 1e-10 * (1.0 + std::abs(mean) + sigma);
    return {mean - half, mean + half};
  }
  bool contains(double y) const { return lower <= y && y <= upper; }
};

inline std::vector<std::size_t> covered_rows(const Premise& premise, const DataSet& ds,
                                             std::optional<std::span<const std::size_t>> scope = std::nullopt) {
  std::vector<std::size_t> out;
  if (scope) {
    for (auto r : *scope) {
      if (premise.covers(ds, r)) out.push_back(r);
    }
  } else {
    for (std::size_t r = 0; r < ds.size(); ++r) {
      if (premise.covers(ds, r)) out.push_back(r);
    }
  }
  return out;
}

/// Covering of `premise` (with class `target` for classification) over `scope` (default: all rows).
inline Covering covering_stats(const Premise& premise, std::optional<std::size_t> target, const DataSet& ds,
                               std::optional<std::span<const std::size_t>> scope = std::nullopt) {
  std::vector<std::size_t> all_rows;
  if (!scope) {
    all_rows.resize(ds.size());
    for (std::size_t r = 0; r < all_rows.size(); ++r) all_rows[r] = r;
  }
  std::span<const std::size_t> rows = scope ? *scope : std::span<const std::size_t>(all_rows);
  const auto labels = ds.labels();
  Covering c;
  switch (ds.task()) {
    case Task::classification: {
      if (!target) throw std::invalid_argument("classification covering needs a target class");
      const double t = static_cast<double>(*target);
      for (auto r : rows) {
        const bool positive = labels[r] == t;
        (positive ? c.P : c.N)++;
        if (premise.covers(ds, r)) (positive ? c.p : c.n)++;
      }
      break;
    }
    case Task::regression: {
      StatAccumulator acc;
      std::vector<std::size_t> covered;
      for (auto r : rows) {
        if (premise.covers(ds, r)) {
          covered.push_back(r);
          acc.push(labels[r]);
        }
      }
      if (covered.empty()) return {0, 0, std::max<std::size_t>(rows.size(), 1), 0};
      const auto window = SigmaWindow::around(acc.mean(), acc.stddev());
      for (auto r : covered) window.contains(labels[r]) ? ++c.p : ++c.n;
      for (auto r : rows) window.contains(labels[r]) ? ++c.P : ++c.N;
      break;
    }
    case Task::survival:
      c.kind = CoveringKind::survival;
      c.P = rows.size();
      for (auto r : rows) c.p += premise.covers(ds, r) ? 1 : 0;
      break;
  }
  return c;
}

inline Covering covering_stats(const Rule& rule, const DataSet& ds,
                               std::optional<std::span<const std::size_t>> scope = std::nullopt) {
  std::optional<std::size_t> target;
  if (auto* cls = std::get_if<ClassConsequence>(&rule.consequence)) target = cls->label;
  return covering_stats(rule.premise, target, ds, scope);
}

namespace detail {

inline std::string format_number(double v) {
  if (v == infinity) return "+inf";
  if (v == -infinity) return "-inf";
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.6g", v);
  return buffer;
}

}  // namespace detail

inline std::string format_condition(const ElementaryCondition& c, std::span<const AttributeMeta> schema) {
  c.validate(schema);
  const auto& meta = schema[c.attribute()];
  if (c.is_equals()) return meta.name + " = " + meta.domain[c.symbol()];
  const auto& iv = c.interval();
  using detail::format_number;
  if (iv.lower == -infinity && iv.upper != infinity) {
    return meta.name + (iv.upper_closed ? " ≤ " : " < ") + format_number(iv.upper);
  }
  if (iv.upper == infinity && iv.lower != -infinity) {
    return meta.name + (iv.lower_closed ? " ≥ " : " > ") + format_number(iv.lower);
  }
  return meta.name + " ∈ " + (iv.lower_closed ? "[" : "(") + format_number(iv.lower) + ", " +
         format_number(iv.upper) + (iv.upper_closed ? "]" : ")");
}

inline std::string format_consequence(const Consequence& consequence, std::span<const AttributeMeta> schema) {
  const AttributeMeta* label = nullptr;
  for (const auto& m : schema) {
    if (m.role == Role::label) label = &m;
  }
  const std::string name = label ? label->name : "label";
  using detail::format_number;
  return std::visit(
      [&](const auto& c) -> std::string {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, ClassConsequence>) {
          return name + " = " + (label && c.label < label->domain.size() ? label->domain[c.label] : std::to_string(c.label));
        } else if constexpr (std::is_same_v<T, RegressionConsequence>) {
          return name + " = " + format_number(c.mean) + " ± " + format_number(c.sigma);
        } else {
          const auto& e = c.estimate;
          return "survival curve (" + std::to_string(e.times.size()) + " steps, S(end) = " +
                 format_number(e.probabilities.empty() ? 1.0 : e.probabilities.back()) + ")";
        }
      },
      consequence);
}

/// Canonical single-line rule text.
inline std::string format_rule(const Rule& rule, std::span<const AttributeMeta> schema) {
  std::string out = "IF ";
  if (rule.premise.empty()) out += "TRUE";
  for (std::size_t i = 0; i < rule.premise.size(); ++i) {
    if (i) out += " AND ";
    out += format_condition(rule.premise.conditions()[i], schema);
  }
  const auto& c = rule.covering;
  out += " THEN " + format_consequence(rule.consequence, schema);
  out += " (p=" + std::to_string(c.p) + ", n=" + std::to_string(c.n) + ", P=" + std::to_string(c.P) +
         ", N=" + std::to_string(c.N) + ", pval=" + detail::format_number(rule.p_value) + ")";
  return out;
}

}  // namespace rulelearn
