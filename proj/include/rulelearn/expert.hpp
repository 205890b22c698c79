#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rulelearn/rule.hpp"

namespace rulelearn {

/// Either one exact condition or, when `condition` is empty, any condition on `attribute`.
struct ConditionPattern {
  std::size_t attribute = 0;
  std::optional<ElementaryCondition> condition;
  std::optional<std::size_t> target_class;  // restricts the pattern to one class loop

  static ConditionPattern any_on(std::size_t attribute) { return {attribute, std::nullopt, std::nullopt}; }
  static ConditionPattern exactly(const ElementaryCondition& c) { return {c.attribute(), c, std::nullopt}; }

  bool applies_to(std::optional<std::size_t> target) const {
    return !target_class || (target && *target_class == *target);
  }
  bool matches(const ElementaryCondition& c) const {
    if (c.attribute() != attribute) return false;
    return !condition || *condition == c;
  }
  bool operator==(const ConditionPattern&) const = default;
};

struct PreferredCondition {
  ConditionPattern pattern;
  std::size_t budget = 1;  // number of rules allowed to use it
  bool operator==(const PreferredCondition&) const = default;
};

struct InitialRule {
  Premise premise;
  std::optional<std::size_t> target_class;  // required for classification
  bool operator==(const InitialRule&) const = default;
};

/// User guidance for the covering loop.
struct ExpertKnowledge {
  std::vector<InitialRule> initial_rules;
  std::vector<PreferredCondition> preferred;
  std::vector<ConditionPattern> forbidden;
  /// Keyed by class symbol; regression and survival use the key "*".
  std::map<std::string, std::size_t> desired_rule_count;

  bool empty() const {
    return initial_rules.empty() && preferred.empty() && forbidden.empty() && desired_rule_count.empty();
  }

  bool is_forbidden(const ElementaryCondition& c, std::optional<std::size_t> target) const {
    for (const auto& f : forbidden) {
      if (f.applies_to(target) && f.matches(c)) return true;
    }
    return false;
  }

  bool attribute_forbidden(std::size_t attribute, std::optional<std::size_t> target) const {
    for (const auto& f : forbidden) {
      if (f.applies_to(target) && !f.condition && f.attribute == attribute) return true;
    }
    return false;
  }

  void validate(std::span<const AttributeMeta> schema) const {
    auto check_pattern = [&](const ConditionPattern& p) {
      if (p.attribute >= schema.size()) throw SchemaError("expert pattern attribute out of range");
      if (schema[p.attribute].role != Role::regular) {
        throw SchemaError("expert pattern on non-regular attribute '" + schema[p.attribute].name + "'");
      }
      if (p.condition) p.condition->validate(schema);
    };
    for (const auto& r : initial_rules) {
      for (const auto& c : r.premise.conditions()) {
        c.validate(schema);
        if (schema[c.attribute()].role != Role::regular) throw SchemaError("initial rule uses a non-regular attribute");
      }
    }
    for (const auto& p : preferred) {
      check_pattern(p.pattern);
      if (p.budget < 1) throw std::invalid_argument("preferred condition budget must be >= 1");
    }
    for (const auto& f : forbidden) check_pattern(f);
    for (const auto& p : preferred) {
      for (const auto& f : forbidden) {
        if (p.pattern.attribute != f.attribute) continue;
        if (!f.condition || !p.pattern.condition || *f.condition == *p.pattern.condition) {
          throw std::invalid_argument("preferred and forbidden conditions overlap on '" +
                                      schema[f.attribute].name + "'");
        }
      }
    }
    for (const auto& [key, count] : desired_rule_count) {
      if (count < 1) throw std::invalid_argument("desired rule count for '" + key + "' must be >= 1");
    }
  }
};

}  // namespace rulelearn
