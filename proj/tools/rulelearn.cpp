#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "rulelearn/experiment.hpp"
#include "rulelearn/induction.hpp"
#include "rulelearn/prediction.hpp"
#include "rulelearn/serialization.hpp"

namespace rl = rulelearn;

namespace {

constexpr int exit_failure = 1;
constexpr int exit_usage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataOptions {
  std::string path;
  std::string format;
  std::string label;
  std::string survival_time;
  std::string task;
  std::string delimiter = ",";
  bool no_header = false;

  void add_to(CLI::App& cmd, bool targets) {
    cmd.add_option("--data", path, "ARFF or CSV input")->required();
    cmd.add_option("--format", format, "arff or csv (default: from extension)")
        ->check(CLI::IsMember({"arff", "csv"}));
    cmd.add_option("--delimiter", delimiter, "CSV delimiter");
    cmd.add_flag("--no-header", no_header, "CSV file has no header row");
    if (!targets) return;
    cmd.add_option("--label", label, "label attribute (event indicator for survival)")->required();
    cmd.add_option("--survival-time", survival_time, "survival time attribute");
    cmd.add_option("--task", task, "expected task")->check(CLI::IsMember({"classification", "regression", "survival"}));
  }

  rl::CsvOptions csv() const {
    if (delimiter.size() != 1) throw UsageError("--delimiter must be a single character");
    return {delimiter[0], !no_header};
  }

  rl::DataFormat data_format() const {
    if (format.empty()) return rl::format_from_path(path);
    return format == "csv" ? rl::DataFormat::csv : rl::DataFormat::arff;
  }

  void check_flags() const {
    if (task == "survival" && survival_time.empty()) throw UsageError("--task survival requires --survival-time");
    if (!task.empty() && task != "survival" && !survival_time.empty()) {
      throw UsageError("--survival-time implies --task survival");
    }
  }

  rl::DataSet load_labeled() const {
    check_flags();
    auto ds = rl::load_labeled(path, data_format(), label, survival_time, csv());
    if (!task.empty() && rl::to_string(ds.task()) != task) {
      throw UsageError("--task " + task + " contradicts the data (label '" + label + "' gives " +
                       std::string(rl::to_string(ds.task())) + ")");
    }
    return ds;
  }

  rl::DataSet load_raw() const { return rl::load_dataset(path, data_format(), csv()); }
};

struct ParamOptions {
  rl::InductionParams params;
  std::string induction = "C2", pruning = "C2", voting = "Correlation";
  bool no_pruning = false;
  std::string expert_file;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--minsupp-new", params.minsupp_new, "minimum newly covered positives per rule")
        ->check(CLI::PositiveNumber);
    cmd.add_option("--max-uncovered", params.max_uncovered_fraction, "maximum uncovered fraction of positives")
        ->check(CLI::Range(0.0, 1.0));
    cmd.add_option("--measure-induction", induction, "growing measure");
    cmd.add_option("--measure-pruning", pruning, "pruning measure");
    cmd.add_option("--measure-voting", voting, "voting measure");
    cmd.add_flag("--no-pruning", no_pruning, "disable pruning");
    cmd.add_option("--max-conditions", params.max_growing_conditions, "condition limit while growing (0 = none)");
    cmd.add_option("--significance-level", params.significance_level, "significance level")
        ->check(CLI::Range(0.0, 1.0));
    cmd.add_flag("--filter-significant", params.significance_filter, "drop rules with p-value above the level");
    cmd.add_option("--seed", params.seed, "random seed");
    cmd.add_option("--expert-file", expert_file, "expert knowledge JSON");
  }

  static rl::MeasureId measure(const std::string& name, const char* flag) {
    auto id = rl::parse_measure(name);
    if (!id) throw UsageError(std::string(flag) + ": unknown measure '" + name + "'");
    return *id;
  }

  rl::InductionParams resolve() {
    params.induction_measure = measure(induction, "--measure-induction");
    params.pruning_measure = measure(pruning, "--measure-pruning");
    params.voting_measure = measure(voting, "--measure-voting");
    params.pruning_enabled = !no_pruning;
    try {
      params.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    return params;
  }

  std::optional<rl::ExpertKnowledge> expert(const rl::DataSet& ds) const {
    if (expert_file.empty()) return std::nullopt;
    return rl::load_expert(expert_file, ds.attributes());
  }
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

std::string metric_line(const std::string& name, const std::optional<double>& v) {
  return name + ": " + (v ? rl::detail::format_real(*v) : std::string("undefined"));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Separate-and-conquer rule learner"};
  app.require_subcommand(1);

  DataOptions data;
  ParamOptions params;
  std::string model_out, model_in, report, out, config_path;
  std::size_t threads = 1, folds = 10, jobs = 0;
  std::uint64_t seed = 0;
  bool timings = false;

  auto* train = app.add_subcommand("train", "induce a rule set and save it");
  data.add_to(*train, true);
  params.add_to(*train);
  train->add_option("--model-out", model_out, "model file to write")->required();
  train->add_option("--report", report, "rules report to write");
  train->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  auto* predict = app.add_subcommand("predict", "apply a saved model");
  data.add_to(*predict, false);
  predict->add_option("--model-in", model_in, "model file")->required();
  predict->add_option("--out", out, "predictions file (default: stdout)");

  auto* evaluate = app.add_subcommand("evaluate", "evaluate a saved model on labelled data");
  data.add_to(*evaluate, false);
  evaluate->add_option("--model-in", model_in, "model file")->required();
  evaluate->add_option("--report", report, "JSON evaluation report to write");

  auto* cv = app.add_subcommand("cv", "cross-validate");
  data.add_to(*cv, true);
  params.add_to(*cv);
  cv->add_option("--folds", folds, "fold count")->check(CLI::Range(2, 1 << 30));
  cv->add_option("--report", report, "JSON cross-validation report to write");
  cv->add_option("--threads", threads, "parallel folds")->check(CLI::PositiveNumber);
  cv->add_flag("--timings", timings, "include induction time in the report");

  auto* run = app.add_subcommand("run", "run a batch experiment");
  run->add_option("config", config_path, "experiment configuration JSON")->required();
  run->add_option("--jobs", jobs, "parallel entries (overrides the config)")->check(CLI::PositiveNumber);

  app.add_subcommand("defaults", "print the default induction parameters as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  try {
    if (app.got_subcommand("defaults")) {
      std::cout << rl::default_params_json().dump(2) << '\n';
      return 0;
    }

    if (train->parsed()) {
      const auto p = params.resolve();
      const auto ds = data.load_labeled();
      const auto expert = params.expert(ds);
      rl::InductionOptions options;
      options.threads = threads;
      const auto rs = rl::induce_ruleset(ds, p, expert ? &*expert : nullptr, options);
      rl::save_model(rs, model_out);
      const auto text = rl::rules_report(rs);
      if (!report.empty()) write_file(report, text);
      std::cout << text;
      return 0;
    }

    if (predict->parsed()) {
      const auto rs = rl::load_model(model_in);
      const auto ds = rl::conform_to(data.load_raw(), rs.schema, true);
      std::ostringstream text;
      text << "row,prediction,rules\n";
      for (std::size_t r = 0; r < ds.size(); ++r) {
        text << (r + 1) << ',' << rl::format_prediction(rl::predict_one(rs, ds, r), rs) << ',';
        bool first = true;
        for (std::size_t i = 0; i < rs.rules.size(); ++i) {
          if (!rs.rules[i].premise.covers(ds, r)) continue;
          text << (first ? "" : " ") << (i + 1);
          first = false;
        }
        text << '\n';
      }
      if (out.empty()) std::cout << text.str();
      else write_file(out, text.str());
      return 0;
    }

    if (evaluate->parsed()) {
      const auto rs = rl::load_model(model_in);
      const auto ds = rl::conform_to(data.load_raw(), rs.schema);
      const auto result = rl::evaluate(rs, ds);
      if (!report.empty()) write_file(report, rl::to_json(result).dump(2) + "\n");
      std::cout << metric_line(result.metric_name, result.metric) << "\nrules: " << result.rule_count << '\n';
      return 0;
    }

    if (cv->parsed()) {
      const auto p = params.resolve();
      const auto ds = data.load_labeled();
      const auto expert = params.expert(ds);
      seed = p.seed;
      const auto result = rl::cross_validate(ds, folds, p, seed, expert ? &*expert : nullptr, threads);
      if (!report.empty()) write_file(report, rl::to_json(result, timings).dump(2) + "\n");
      std::cout << metric_line(std::string(rl::metric_name(ds.task())), result.aggregate)
                << "\nmean rules: " << rl::detail::format_real(result.mean_rule_count) << '\n';
      return 0;
    }

    if (run->parsed()) {
      const auto config = rl::load_config(config_path);
      const auto result = rl::run_experiment(config, jobs);
      for (const auto& e : result.entries) {
        std::cout << e.dataset << " / " << e.parameter_set << ": ";
        if (e.ok) std::cout << metric_line(e.metric_name, e.metric) << " rules=" << e.rule_count << '\n';
        else std::cout << "FAILED (" << e.error << ")\n";
      }
      std::cout << "summary: " << result.summary_path << '\n';
      return result.exit_code();
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return exit_usage;
  } catch (const rl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_failure;
  }
  return exit_usage;
}
