#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rulelearn/dataset.hpp"
#include "rulelearn/expert.hpp"
#include "rulelearn/params.hpp"
#include "rulelearn/prediction.hpp"
#include "rulelearn/rule.hpp"

namespace rulelearn {

using json = nlohmann::json;

inline constexpr int model_format_version = 1;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Task parse_task(std::string_view text) {
  if (text == "classification") return Task::classification;
  if (text == "regression") return Task::regression;
  if (text == "survival") return Task::survival;
  throw FormatError("unknown task '" + std::string(text) + "'");
}

inline MeasureId measure_from_json(const json& j, const std::string& key) {
  auto id = parse_measure(j.get<std::string>());
  if (!id) throw FormatError(key + ": unknown measure '" + j.get<std::string>() + "'");
  return *id;
}

inline json to_json(const InductionParams& p) {
  return {{"minsupp_new", p.minsupp_new},
          {"max_uncovered_fraction", p.max_uncovered_fraction},
          {"induction_measure", to_string(p.induction_measure)},
          {"pruning_measure", to_string(p.pruning_measure)},
          {"voting_measure", to_string(p.voting_measure)},
          {"pruning_enabled", p.pruning_enabled},
          {"max_growing_conditions", p.max_growing_conditions},
          {"significance_level", p.significance_level},
          {"significance_filter", p.significance_filter},
          {"regression_variant", "mean"},
          {"seed", p.seed}};
}

inline std::uint64_t count_from_json(const json& j, const std::string& where) {
  if (!j.is_number_unsigned()) throw FormatError(where + ": expected a non-negative integer");
  return j.get<std::uint64_t>();
}

/// Reads parameters; keys absent from `j` keep their defaults. Unknown keys are rejected.
inline InductionParams params_from_json(const json& j, const std::string& where = "params") {
  if (!j.is_object()) throw FormatError(where + ": expected an object");
  InductionParams p;
  for (const auto& [key, value] : j.items()) {
    const std::string at = where + "." + key;
    try {
      if (key == "minsupp_new") p.minsupp_new = count_from_json(value, at);
      else if (key == "max_uncovered_fraction") p.max_uncovered_fraction = value.get<double>();
      else if (key == "induction_measure") p.induction_measure = measure_from_json(value, at);
      else if (key == "pruning_measure") p.pruning_measure = measure_from_json(value, at);
      else if (key == "voting_measure") p.voting_measure = measure_from_json(value, at);
      else if (key == "pruning_enabled") p.pruning_enabled = value.get<bool>();
      else if (key == "max_growing_conditions") p.max_growing_conditions = count_from_json(value, at);
      else if (key == "significance_level") p.significance_level = value.get<double>();
      else if (key == "significance_filter") p.significance_filter = value.get<bool>();
      else if (key == "seed") p.seed = count_from_json(value, at);
      else if (key == "regression_variant") {
        if (value.get<std::string>() != "mean") throw FormatError(at + ": only the mean-based variant is available");
      } else {
        throw FormatError(at + ": unknown parameter");
      }
    } catch (const json::exception& e) {
      throw FormatError(at + ": " + e.what());
    }
  }
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(where + ": " + e.what());
  }
  return p;
}

/// The default parameter set, for front ends that must mirror it.
inline json default_params_json() { return to_json(InductionParams{}); }

namespace detail {

inline json bound_to_json(double v) { return std::isinf(v) ? json(nullptr) : json(v); }
inline double bound_from_json(const json& j, double infinite) { return j.is_null() ? infinite : j.get<double>(); }

inline std::size_t attribute_by_name(std::span<const AttributeMeta> schema, const std::string& name) {
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (schema[i].name == name) return i;
  }
  throw FormatError("unknown attribute '" + name + "'");
}

}  // namespace detail

inline json to_json(const ElementaryCondition& c, std::span<const AttributeMeta> schema) {
  json j{{"attribute", schema[c.attribute()].name}};
  if (c.is_equals()) {
    j["equals"] = schema[c.attribute()].domain[c.symbol()];
  } else {
    const auto& iv = c.interval();
    j["lower"] = detail::bound_to_json(iv.lower);
    j["upper"] = detail::bound_to_json(iv.upper);
    j["lower_closed"] = iv.lower_closed;
    j["upper_closed"] = iv.upper_closed;
  }
  return j;
}

inline ElementaryCondition condition_from_json(const json& j, std::span<const AttributeMeta> schema) {
  const auto a = detail::attribute_by_name(schema, j.at("attribute").get<std::string>());
  if (j.contains("equals")) {
    auto symbol = schema[a].symbol_index(j.at("equals").get<std::string>());
    if (!symbol) throw FormatError("unknown symbol for '" + schema[a].name + "'");
    return ElementaryCondition::equals(a, *symbol);
  }
  Interval iv{detail::bound_from_json(j.at("lower"), -infinity), detail::bound_from_json(j.at("upper"), infinity),
              j.at("lower_closed").get<bool>(), j.at("upper_closed").get<bool>()};
  return ElementaryCondition(a, iv);
}

/// Parses "attr = symbol", "attr <= x", "attr < x", "attr >= x", "attr > x" (also the ≤ / ≥ glyphs)
/// and "attr in [a, b)" / "attr ∈ (a, b]".
inline ElementaryCondition parse_condition(std::string_view text, std::span<const AttributeMeta> schema) {
  text = detail::trim(text);
  struct Op {
    std::string_view token;
    int kind;  // 0 '=', 1 '<=', 2 '<', 3 '>=', 4 '>', 5 interval
  };
  static constexpr Op ops[] = {{" in ", 5}, {"∈", 5}, {"<=", 1}, {"≤", 1}, {">=", 3},
                               {"≥", 3},    {"=", 0}, {"<", 2},  {">", 4}};
  for (const auto& op : ops) {
    auto pos = text.find(op.token);
    if (pos == std::string_view::npos) continue;
    const std::string name(detail::trim(text.substr(0, pos)));
    const auto rest = detail::trim(text.substr(pos + op.token.size()));
    const auto a = detail::attribute_by_name(schema, name);
    if (op.kind == 0) {
      if (!schema[a].is_nominal()) {
        auto v = detail::parse_real(rest);
        if (!v) throw FormatError("invalid number in condition '" + std::string(text) + "'");
        return ElementaryCondition(a, Interval{*v, *v, true, true});
      }
      auto symbol = schema[a].symbol_index(rest);
      if (!symbol) throw FormatError("unknown symbol '" + std::string(rest) + "' for '" + name + "'");
      return ElementaryCondition::equals(a, *symbol);
    }
    if (op.kind == 5) {
      if (rest.size() < 2) throw FormatError("malformed interval in '" + std::string(text) + "'");
      const bool lower_closed = rest.front() == '[';
      const bool upper_closed = rest.back() == ']';
      auto inner = rest.substr(1, rest.size() - 2);
      auto comma = inner.find(',');
      if (comma == std::string_view::npos) throw FormatError("malformed interval in '" + std::string(text) + "'");
      auto parse_bound = [&](std::string_view b, double inf) {
        b = detail::trim(b);
        if (b == "-inf" || b == "+inf" || b == "inf") return inf;
        auto v = detail::parse_real(b);
        if (!v) throw FormatError("invalid bound in '" + std::string(text) + "'");
        return *v;
      };
      Interval iv{parse_bound(inner.substr(0, comma), -infinity), parse_bound(inner.substr(comma + 1), infinity),
                  lower_closed, upper_closed};
      if (std::isinf(iv.lower)) iv.lower_closed = false;
      if (std::isinf(iv.upper)) iv.upper_closed = false;
      return ElementaryCondition(a, iv);
    }
    auto v = detail::parse_real(rest);
    if (!v) throw FormatError("invalid number in condition '" + std::string(text) + "'");
    switch (op.kind) {
      case 1: return ElementaryCondition(a, Interval{-infinity, *v, false, true});
      case 2: return ElementaryCondition(a, Interval{-infinity, *v, false, false});
      case 3: return ElementaryCondition(a, Interval{*v, infinity, true, false});
      default: return ElementaryCondition(a, Interval{*v, infinity, false, false});
    }
  }
  throw FormatError("cannot parse condition '" + std::string(text) + "'");
}

inline json to_json(const KaplanMeierEstimate& e) {
  return {{"times", e.times}, {"probabilities", e.probabilities}};
}

inline KaplanMeierEstimate km_from_json(const json& j) {
  KaplanMeierEstimate e;
  e.times = j.at("times").get<std::vector<double>>();
  e.probabilities = j.at("probabilities").get<std::vector<double>>();
  if (e.times.size() != e.probabilities.size()) throw FormatError("survival estimate lists differ in length");
  return e;
}

inline json to_json(const Consequence& c, std::span<const AttributeMeta> schema) {
  return std::visit(
      [&](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ClassConsequence>) {
          for (const auto& m : schema) {
            if (m.role == Role::label) return {{"class", m.domain.at(v.label)}};
          }
          throw FormatError("schema has no label");
        } else if constexpr (std::is_same_v<T, RegressionConsequence>) {
          return {{"mean", v.mean}, {"sigma", v.sigma}};
        } else {
          return {{"survival", to_json(v.estimate)}};
        }
      },
      c);
}

inline Consequence consequence_from_json(const json& j, std::span<const AttributeMeta> schema) {
  if (j.contains("class")) {
    for (const auto& m : schema) {
      if (m.role != Role::label) continue;
      auto index = m.symbol_index(j.at("class").get<std::string>());
      if (!index) throw FormatError("unknown class '" + j.at("class").get<std::string>() + "'");
      return ClassConsequence{*index};
    }
    throw FormatError("schema has no label");
  }
  if (j.contains("mean")) return RegressionConsequence{j.at("mean").get<double>(), j.at("sigma").get<double>()};
  return SurvivalConsequence{km_from_json(j.at("survival"))};
}

inline json to_json(const Covering& c) { return {{"p", c.p}, {"n", c.n}, {"P", c.P}, {"N", c.N}}; }

inline json to_json(const AttributeMeta& m) {
  json j{{"name", m.name}, {"kind", m.is_nominal() ? "nominal" : "numeric"}, {"role", to_string(m.role)}};
  if (m.is_nominal()) j["domain"] = m.domain;
  return j;
}

inline AttributeMeta attribute_from_json(const json& j) {
  AttributeMeta m;
  m.name = j.at("name").get<std::string>();
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "nominal") {
    m.kind = AttributeKind::nominal;
    m.domain = j.at("domain").get<std::vector<std::string>>();
  } else if (kind == "numeric") {
    m.kind = AttributeKind::numeric;
  } else {
    throw FormatError("unknown attribute kind '" + kind + "'");
  }
  const auto role = j.at("role").get<std::string>();
  if (role == "regular") m.role = Role::regular;
  else if (role == "label") m.role = Role::label;
  else if (role == "survival_time") m.role = Role::survival_time;
  else throw FormatError("unknown role '" + role + "'");
  return m;
}

inline json to_json(const Rule& rule, std::span<const AttributeMeta> schema) {
  json premise = json::array();
  for (const auto& c : rule.premise.conditions()) premise.push_back(to_json(c, schema));
  return {{"text", format_rule(rule, schema)},
          {"premise", premise},
          {"consequence", to_json(rule.consequence, schema)},
          {"covering", to_json(rule.covering)},
          {"voting_weight", rule.voting_weight},
          {"p_value", rule.p_value}};
}

/// Versioned, self-describing model document.
inline json to_json(const RuleSet& rs) {
  json schema = json::array();
  for (const auto& m : rs.schema) schema.push_back(to_json(m));
  json rules = json::array();
  for (const auto& r : rs.rules) rules.push_back(to_json(r, rs.schema));
  return {{"format", "rulelearn-model"},
          {"version", model_format_version},
          {"task", to_string(rs.task)},
          {"schema", schema},
          {"params", to_json(rs.params_used)},
          {"class_counts", rs.class_counts},
          {"default_model", to_json(rs.default_model, rs.schema)},
          {"rules", rules},
          {"warnings", rs.warnings}};
}

inline RuleSet ruleset_from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != "rulelearn-model") throw FormatError("not a rulelearn model");
    if (j.at("version").get<int>() != model_format_version) {
      throw FormatError("unsupported model version " + std::to_string(j.at("version").get<int>()));
    }
    RuleSet rs;
    rs.task = parse_task(j.at("task").get<std::string>());
    for (const auto& m : j.at("schema")) rs.schema.push_back(attribute_from_json(m));
    rs.params_used = params_from_json(j.at("params"));
    rs.class_counts = j.at("class_counts").get<std::vector<std::size_t>>();
    rs.default_model = consequence_from_json(j.at("default_model"), rs.schema);
    for (const auto& r : j.at("rules")) {
      Rule rule;
      for (const auto& c : r.at("premise")) rule.premise.add(condition_from_json(c, rs.schema));
      rule.consequence = consequence_from_json(r.at("consequence"), rs.schema);
      const auto& cov = r.at("covering");
      rule.covering = {cov.at("p").get<std::size_t>(), cov.at("n").get<std::size_t>(), cov.at("P").get<std::size_t>(),
                       cov.at("N").get<std::size_t>(),
                       rs.task == Task::survival ? CoveringKind::survival : CoveringKind::standard};
      rule.voting_weight = r.at("voting_weight").get<double>();
      rule.p_value = r.at("p_value").get<double>();
      rs.rules.push_back(std::move(rule));
    }
    rs.warnings = j.at("warnings").get<std::vector<std::string>>();
    return rs;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed model: ") + e.what());
  }
}

inline void save_model(const RuleSet& rs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << to_json(rs).dump(2) << '\n';
}

inline RuleSet load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  try {
    return ruleset_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
}

/// Expert knowledge document; conditions are written in the textual condition syntax.
inline ExpertKnowledge expert_from_json(const json& j, std::span<const AttributeMeta> schema) {
  ExpertKnowledge expert;
  const AttributeMeta* label = nullptr;
  for (const auto& m : schema) {
    if (m.role == Role::label) label = &m;
  }
  auto class_of = [&](const json& item, const std::string& where) -> std::optional<std::size_t> {
    if (!item.contains("class")) return std::nullopt;
    if (!label || !label->is_nominal()) throw FormatError(where + ": 'class' is only valid for classification");
    auto index = label->symbol_index(item.at("class").get<std::string>());
    if (!index) throw FormatError(where + ": unknown class '" + item.at("class").get<std::string>() + "'");
    return index;
  };
  auto pattern_of = [&](const json& item, const std::string& where) {
    ConditionPattern pattern;
    if (item.contains("condition")) {
      auto c = parse_condition(item.at("condition").get<std::string>(), schema);
      pattern = ConditionPattern::exactly(c);
    } else if (item.contains("attribute")) {
      pattern = ConditionPattern::any_on(detail::attribute_by_name(schema, item.at("attribute").get<std::string>()));
    } else {
      throw FormatError(where + ": needs 'condition' or 'attribute'");
    }
    pattern.target_class = class_of(item, where);
    return pattern;
  };
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "initial_rules") {
        for (std::size_t i = 0; i < value.size(); ++i) {
          const auto where = "initial_rules[" + std::to_string(i) + "]";
          InitialRule rule;
          rule.target_class = class_of(value[i], where);
          for (const auto& c : value[i].at("conditions")) rule.premise.add(parse_condition(c.get<std::string>(), schema));
          expert.initial_rules.push_back(std::move(rule));
        }
      } else if (key == "preferred") {
        for (std::size_t i = 0; i < value.size(); ++i) {
          const auto where = "preferred[" + std::to_string(i) + "]";
          expert.preferred.push_back({pattern_of(value[i], where), value[i].value("budget", std::size_t{1})});
        }
      } else if (key == "forbidden") {
        for (std::size_t i = 0; i < value.size(); ++i) {
          expert.forbidden.push_back(pattern_of(value[i], "forbidden[" + std::to_string(i) + "]"));
        }
      } else if (key == "desired_rule_count") {
        for (const auto& [cls, count] : value.items()) expert.desired_rule_count[cls] = count.get<std::size_t>();
      } else {
        throw FormatError("expert: unknown key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed expert knowledge: ") + e.what());
  }
  expert.validate(schema);
  return expert;
}

inline ExpertKnowledge load_expert(const std::string& path, std::span<const AttributeMeta> schema) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  try {
    return expert_from_json(json::parse(in), schema);
  } catch (const json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
}

inline std::string format_prediction(const Prediction& p, const RuleSet& rs) {
  return std::visit(
      [&](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::size_t>) {
          for (const auto& m : rs.schema) {
            if (m.role == Role::label) return m.domain.at(v);
          }
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, double>) {
          return detail::format_real(v);
        } else {
          std::string out;
          for (std::size_t i = 0; i < v.times.size(); ++i) {
            if (i) out += ';';
            out += detail::format_real(v.times[i]) + ":" + detail::format_real(v.probabilities[i]);
          }
          return out;
        }
      },
      p);
}

inline json to_json(const EvaluationReport& r) {
  json rules = json::array();
  for (const auto& rec : r.rules) rules.push_back({{"text", rec.text}, {"covering", to_json(rec.covering)}, {"p_value", rec.p_value}});
  json j{{"task", to_string(r.task)},
         {"metric", r.metric_name},
         {"value", r.metric ? json(*r.metric) : json(nullptr)},
         {"rule_count", r.rule_count},
         {"rules", rules}};
  if (!r.confusion.empty()) j["confusion_matrix"] = r.confusion;
  return j;
}

inline json to_json(const CVReport& r, bool include_timings = false) {
  json folds = json::array();
  for (const auto& f : r.folds) {
    folds.push_back({{"value", f.metric ? json(*f.metric) : json(nullptr)}, {"rule_count", f.rule_count}});
  }
  json j{{"folds", r.k},
         {"seed", r.seed},
         {"metric", r.folds.empty() ? "" : r.folds.front().metric_name},
         {"aggregate", r.aggregate ? json(*r.aggregate) : json(nullptr)},
         {"mean_rule_count", r.mean_rule_count},
         {"per_fold", folds}};
  if (include_timings) j["induction_seconds"] = r.induction_seconds;
  return j;
}

/// Rule listing with one (time, probability) table per survival rule.
inline std::string rules_report(const RuleSet& rs) {
  std::ostringstream out;
  out << "task: " << to_string(rs.task) << "\nrules: " << rs.rules.size() << "\n";
  for (std::size_t i = 0; i < rs.rules.size(); ++i) {
    const auto& rule = rs.rules[i];
    out << "r" << (i + 1) << ": " << format_rule(rule, rs.schema) << "\n";
    if (auto* s = std::get_if<SurvivalConsequence>(&rule.consequence)) {
      out << "  time\tprobability\n";
      for (std::size_t t = 0; t < s->estimate.times.size(); ++t) {
        out << "  " << detail::format_real(s->estimate.times[t]) << '\t'
            << detail::format_real(s->estimate.probabilities[t]) << "\n";
      }
    }
  }
  out << "default: " << format_consequence(rs.default_model, rs.schema) << "\n";
  for (const auto& w : rs.warnings) out << "warning: " << w << "\n";
  return out.str();
}

}  // namespace rulelearn
