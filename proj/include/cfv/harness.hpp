#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cfv/measures.hpp"
#include "cfv/trees.hpp"

namespace cfv {

struct ExperimentConfig {
  std::string experiment;
  ReproductionLaw law;
  LimitMeasure xi = LimitMeasure::kingman_only();
  std::vector<ReproductionLaw> laws;  // step-bounds runs every listed law
  std::vector<int> N{64};
  int n = 2;
  std::vector<double> t{1.0};
  std::int64_t replicates = 10000;
  std::uint64_t seed = 1;
  double epsilon = 0.1;
  double alpha = 0.01;
  double tolerance = 1e-9;
  bool tolerance_per_N = false;  // tolerance / N instead of an absolute tolerance
  std::int64_t steps = 10000;
  int bound_from_N = 4096;
  std::optional<std::string> expect;  // "agree" or "disagree"; default depends on the law
  TreeState initial = TreeState::point_mass();
  std::string out;
};

// Same schema in both formats; the format is picked by file extension (.toml or .json).
// Keys missing from the file keep the defaults of `experiment` (or of the file's own
// "experiment" key when present).
ExperimentConfig parse_config_toml(const std::string& text, const std::string& experiment = "rates");
ExperimentConfig parse_config_json(const std::string& text, const std::string& experiment = "rates");
ExperimentConfig load_config(const std::string& path, const std::string& experiment = "rates");

// Built-in configuration of an experiment.
ExperimentConfig default_config(const std::string& experiment);

LimitMeasure default_limit(const ReproductionLaw& law);
ReproductionLaw law_from_name(const std::string& name);

struct ResultRow {
  std::string experiment;
  int N = 0;
  std::string tag;
  double estimate = 0.0;
  double reference = 0.0;
  double abs_error = 0.0;
  std::optional<double> ci_low, ci_high;
  std::optional<double> pvalue;
  bool agree = true;
  std::string expected = "agree";  // "agree", "disagree", or "info"
  bool pass = true;
};

// Sets pass from agree and expected.
ResultRow& settle(ResultRow& row);

std::vector<ResultRow> exp_rate_convergence(const ExperimentConfig& cfg);
std::vector<ResultRow> exp_generator_convergence(const ExperimentConfig& cfg);
std::vector<ResultRow> exp_external_branch(const ExperimentConfig& cfg);
std::vector<ResultRow> exp_counterexample(const ExperimentConfig& cfg);
std::vector<ResultRow> exp_step_bounds(const ExperimentConfig& cfg);
std::vector<ResultRow> exp_marginal_agreement(const ExperimentConfig& cfg);
// Exact oracle comparisons that need no sampling.
std::vector<ResultRow> selftest(const ExperimentConfig& cfg);

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows);
void write_json(std::ostream& os, const std::vector<ResultRow>& rows);

bool all_pass(const std::vector<ResultRow>& rows);

}  // namespace cfv
