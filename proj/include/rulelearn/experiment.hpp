#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "rulelearn/induction.hpp"
#include "rulelearn/prediction.hpp"
#include "rulelearn/serialization.hpp"

namespace rulelearn {

inline constexpr int config_format_version = 1;

/// Invalid experiment configuration; the message starts with the offending location.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& location, const std::string& what)
      : std::runtime_error(location + ": " + what), location_(location) {}
  const std::string& location() const { return location_; }

 private:
  std::string location_;
};

struct DatasetEntry {
  std::string name;
  std::string path;
  DataFormat format = DataFormat::arff;
  std::string label;
  std::string survival_time;
  std::string test_path;  // train/test evaluation only
  CsvOptions csv;
};

struct ParameterSet {
  std::string name;
  InductionParams params;
  json expert;  // resolved against each dataset's schema; null when absent
};

struct EvaluationSpec {
  bool cross_validation = true;
  std::size_t folds = 10;
  std::uint64_t seed = 0;
};

struct ExperimentConfig {
  std::vector<DatasetEntry> datasets;
  std::vector<ParameterSet> parameter_sets;
  EvaluationSpec evaluation;
  std::string report_directory;
  std::size_t jobs = 1;
  bool include_timings = false;
};

namespace detail {

inline const json& require(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(where, "missing '" + key + "'");
  return j.at(key);
}

template <class T>
T read_as(const json& j, const std::string& where) {
  if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
    if (!j.is_number_unsigned()) throw ConfigError(where, "expected a non-negative integer");
  }
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where, "wrong value type");
  }
}

inline std::string resolve_path(const std::string& path, const std::filesystem::path& base) {
  std::filesystem::path p(path);
  if (p.is_relative() && !base.empty()) p = base / p;
  return p.lexically_normal().string();
}

inline std::string file_safe(std::string name) {
  for (auto& c : name) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '.') c = '_';
  }
  return name;
}

}  // namespace detail

/// Relative paths in the document resolve against `base`.
inline ExperimentConfig parse_config(const json& j, const std::filesystem::path& base = {}) {
  using detail::read_as;
  using detail::require;
  if (!j.is_object()) throw ConfigError("<root>", "expected an object");
  for (const auto& [key, value] : j.items()) {
    static const char* known[] = {"version", "datasets", "parameter_sets", "evaluation", "report_directory",
                                  "jobs", "include_timings"};
    if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
      throw ConfigError(key, "unknown key");
    }
  }
  const int version = read_as<int>(require(j, "version", "<root>"), "version");
  if (version != config_format_version) throw ConfigError("version", "unsupported version " + std::to_string(version));

  ExperimentConfig config;
  const auto& evaluation = require(j, "evaluation", "<root>");
  const auto type = read_as<std::string>(require(evaluation, "type", "evaluation"), "evaluation.type");
  if (type == "cv") {
    config.evaluation.cross_validation = true;
    if (evaluation.contains("folds")) config.evaluation.folds = read_as<std::size_t>(evaluation["folds"], "evaluation.folds");
    if (evaluation.contains("seed")) config.evaluation.seed = read_as<std::uint64_t>(evaluation["seed"], "evaluation.seed");
    if (config.evaluation.folds < 2) throw ConfigError("evaluation.folds", "must be at least 2");
  } else if (type == "train_test") {
    config.evaluation.cross_validation = false;
  } else {
    throw ConfigError("evaluation.type", "expected 'cv' or 'train_test'");
  }

  const auto& datasets = require(j, "datasets", "<root>");
  if (!datasets.is_array() || datasets.empty()) throw ConfigError("datasets", "expected a non-empty list");
  for (std::size_t i = 0; i < datasets.size(); ++i) {
    const auto where = "datasets[" + std::to_string(i) + "]";
    const auto& d = datasets[i];
    DatasetEntry entry;
    entry.path = detail::resolve_path(read_as<std::string>(require(d, "path", where), where + ".path"), base);
    entry.label = read_as<std::string>(require(d, "label", where), where + ".label");
    entry.name = d.contains("name") ? read_as<std::string>(d["name"], where + ".name")
                                    : std::filesystem::path(entry.path).stem().string();
    entry.format = format_from_path(entry.path);
    if (d.contains("format")) {
      const auto format = read_as<std::string>(d["format"], where + ".format");
      if (format == "arff") entry.format = DataFormat::arff;
      else if (format == "csv") entry.format = DataFormat::csv;
      else throw ConfigError(where + ".format", "expected 'arff' or 'csv'");
    }
    if (d.contains("survival_time") && !d["survival_time"].is_null()) {
      entry.survival_time = read_as<std::string>(d["survival_time"], where + ".survival_time");
    }
    if (d.contains("test_path") && !d["test_path"].is_null()) {
      entry.test_path = detail::resolve_path(read_as<std::string>(d["test_path"], where + ".test_path"), base);
    }
    if (d.contains("delimiter")) {
      const auto delimiter = read_as<std::string>(d["delimiter"], where + ".delimiter");
      if (delimiter.size() != 1) throw ConfigError(where + ".delimiter", "expected one character");
      entry.csv.delimiter = delimiter[0];
    }
    if (d.contains("header")) entry.csv.header = read_as<bool>(d["header"], where + ".header");
    if (!config.evaluation.cross_validation && entry.test_path.empty()) {
      throw ConfigError(where, "train_test evaluation needs 'test_path'");
    }
    for (const auto& other : config.datasets) {
      if (other.name == entry.name) throw ConfigError(where + ".name", "duplicate name '" + entry.name + "'");
    }
    config.datasets.push_back(std::move(entry));
  }

  const auto& sets = require(j, "parameter_sets", "<root>");
  if (!sets.is_array() || sets.empty()) throw ConfigError("parameter_sets", "expected a non-empty list");
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const auto where = "parameter_sets[" + std::to_string(i) + "]";
    const auto& s = sets[i];
    ParameterSet set;
    set.name = read_as<std::string>(require(s, "name", where), where + ".name");
    if (s.contains("params")) {
      try {
        set.params = params_from_json(s["params"], where + ".params");
      } catch (const FormatError& e) {
        throw ConfigError(where + ".params", e.what());
      }
    }
    if (s.contains("expert")) set.expert = s["expert"];
    if (s.contains("expert_file")) {
      const auto path = detail::resolve_path(read_as<std::string>(s["expert_file"], where + ".expert_file"), base);
      std::ifstream in(path);
      if (!in) throw ConfigError(where + ".expert_file", "cannot open '" + path + "'");
      try {
        set.expert = json::parse(in);
      } catch (const json::parse_error& e) {
        throw ConfigError(where + ".expert_file", e.what());
      }
    }
    for (const auto& other : config.parameter_sets) {
      if (other.name == set.name) throw ConfigError(where + ".name", "duplicate name '" + set.name + "'");
    }
    config.parameter_sets.push_back(std::move(set));
  }

  config.report_directory =
      detail::resolve_path(read_as<std::string>(require(j, "report_directory", "<root>"), "report_directory"), base);
  if (j.contains("jobs")) config.jobs = read_as<std::size_t>(j["jobs"], "jobs");
  if (config.jobs < 1) throw ConfigError("jobs", "must be at least 1");
  if (j.contains("include_timings")) config.include_timings = read_as<bool>(j["include_timings"], "include_timings");
  return config;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open configuration");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path, e.what());
  }
  return parse_config(j, std::filesystem::path(path).parent_path());
}

struct EntryOutcome {
  std::string dataset;
  std::string parameter_set;
  bool ok = false;
  std::string error;
  std::string metric_name;
  std::optional<double> metric;
  std::size_t rule_count = 0;
  std::vector<std::string> files;
  json details;
};

struct ExperimentResult {
  std::vector<EntryOutcome> entries;
  std::string summary_path;
  int exit_code() const {
    for (const auto& e : entries) {
      if (!e.ok) return 1;
    }
    return 0;
  }
};

namespace detail {

inline std::string metric_text(const std::optional<double>& v) { return v ? format_real(*v) : "undefined"; }

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

inline void append_confusion(std::ostringstream& out, const EvaluationReport& r, const RuleSet& model) {
  if (r.confusion.empty()) return;
  const auto* label = &model.schema.front();
  for (const auto& m : model.schema) {
    if (m.role == Role::label) label = &m;
  }
  out << "confusion matrix (rows = actual, columns = predicted):\n";
  for (std::size_t a = 0; a < r.confusion.size(); ++a) {
    out << "  " << label->domain[a] << ':';
    for (auto v : r.confusion[a]) out << ' ' << v;
    out << '\n';
  }
}

inline EntryOutcome run_entry(const DatasetEntry& d, const ParameterSet& s, const ExperimentConfig& config) {
  EntryOutcome outcome;
  outcome.dataset = d.name;
  outcome.parameter_set = s.name;
  try {
    const auto data = load_labeled(d.path, d.format, d.label, d.survival_time, d.csv);
    std::optional<ExpertKnowledge> expert;
    if (!s.expert.is_null()) expert = expert_from_json(s.expert, data.attributes());
    const ExpertKnowledge* expert_ptr = expert ? &*expert : nullptr;

    std::ostringstream metrics;
    metrics << "dataset: " << d.name << "\nparameter_set: " << s.name << "\ntask: " << to_string(data.task())
            << "\nexamples: " << data.size() << '\n';
    RuleSet model;
    json details;
    if (config.evaluation.cross_validation) {
      const auto& e = config.evaluation;
      const auto cv = cross_validate(data, e.folds, s.params, e.seed, expert_ptr);
      model = induce_ruleset(data, s.params, expert_ptr);
      outcome.metric_name = metric_name(data.task());
      outcome.metric = cv.aggregate;
      metrics << "evaluation: cv folds=" << e.folds << " seed=" << e.seed << "\nmetric: " << outcome.metric_name
              << '\n';
      for (std::size_t f = 0; f < cv.folds.size(); ++f) {
        metrics << "fold " << (f + 1) << ": " << metric_text(cv.folds[f].metric)
                << " rules=" << cv.folds[f].rule_count << '\n';
      }
      metrics << "aggregate: " << metric_text(cv.aggregate) << "\nmean_rule_count: " << format_real(cv.mean_rule_count)
              << '\n';
      if (config.include_timings) metrics << "induction_seconds: " << cv.induction_seconds << '\n';
      details = to_json(cv, config.include_timings);
    } else {
      model = induce_ruleset(data, s.params, expert_ptr);
      const auto test = conform_to(load_labeled(d.test_path, d.format, d.label, d.survival_time, d.csv), model.schema);
      const auto report = evaluate(model, test);
      outcome.metric_name = report.metric_name;
      outcome.metric = report.metric;
      metrics << "evaluation: train_test test_examples=" << test.size() << "\nmetric: " << report.metric_name
              << "\nvalue: " << metric_text(report.metric) << '\n';
      append_confusion(metrics, report, model);
      details = to_json(report);
    }
    outcome.rule_count = model.rules.size();
    metrics << "model_rule_count: " << model.rules.size() << '\n';

    json rules = json::array();
    for (const auto& r : model.rules) rules.push_back(to_json(r, model.schema));
    details["model_rules"] = rules;
    outcome.details = std::move(details);

    const std::filesystem::path dir(config.report_directory);
    const auto stem = file_safe(d.name) + "__" + file_safe(s.name);
    const auto rules_path = dir / (stem + ".rules.txt");
    const auto metrics_path = dir / (stem + ".metrics.txt");
    write_text(rules_path, rules_report(model));
    write_text(metrics_path, metrics.str());
    outcome.files = {rules_path.filename().string(), metrics_path.filename().string()};
    outcome.ok = true;
  } catch (const std::exception& e) {
    outcome.ok = false;
    outcome.error = e.what();
  }
  return outcome;
}

}  // namespace detail

/// Runs every dataset × parameter-set entry, writing a rules report and a metrics report per
/// entry plus one summary.json. `jobs` overrides the configured bound when non-zero.
inline ExperimentResult run_experiment(const ExperimentConfig& config, std::size_t jobs = 0) {
  std::filesystem::create_directories(config.report_directory);
  ExperimentResult result;
  const std::size_t sets = config.parameter_sets.size();
  result.entries.resize(config.datasets.size() * sets);
  detail::parallel_for(result.entries.size(), jobs ? jobs : config.jobs, [&](std::size_t i) {
    result.entries[i] = detail::run_entry(config.datasets[i / sets], config.parameter_sets[i % sets], config);
  });

  json entries = json::array();
  for (const auto& e : result.entries) {
    json item{{"dataset", e.dataset}, {"parameter_set", e.parameter_set}, {"status", e.ok ? "ok" : "failed"}};
    if (e.ok) {
      item["metric"] = e.metric_name;
      item["value"] = e.metric ? json(*e.metric) : json(nullptr);
      item["rule_count"] = e.rule_count;
      item["files"] = e.files;
      item["evaluation"] = e.details;
    } else {
      item["error"] = e.error;
    }
    entries.push_back(std::move(item));
  }
  json summary{{"version", config_format_version},
               {"evaluation", config.evaluation.cross_validation
                                  ? json{{"type", "cv"}, {"folds", config.evaluation.folds}, {"seed", config.evaluation.seed}}
                                  : json{{"type", "train_test"}}},
               {"entries", entries}};
  const auto path = std::filesystem::path(config.report_directory) / "summary.json";
  detail::write_text(path, summary.dump(2) + "\n");
  result.summary_path = path.string();
  return result;
}

}  // namespace rulelearn
