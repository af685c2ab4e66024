#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "invdiv/bias.hpp"
#include "invdiv/conditions.hpp"
#include "invdiv/csv.hpp"
#include "invdiv/estimator.hpp"
#include "invdiv/model_spec.hpp"

namespace invdiv {

std::string library_version();

struct EstimatorConfig {
  std::string name;
  DivergenceKind divergence;
  std::vector<double> lambda;
  FFunction f;
  SolverOptions solver;
};

struct Contamination {
  ModelSpec outlier;
  double eps = 0.0;
};

// A robustness study: `replications` data sets of `n` points drawn from
// `model` (each point replaced by an outlier draw with probability eps),
// every estimator run on every data set. Replication r draws from
// RngStream(seed, r).
//
// Text form (see parse_config for the syntax):
//
//   seed = 7
//   replications = 200
//   n = 100
//   threads = 4
//   [model]
//   spec = igt(theta=2,lambda=3,g=gauss)
//   [contamination]
//   outlier = gaussian(mean=20,variance=1)
//   eps = 0.1
//   [estimator mean]
//   f = identity
//   [estimator robust]
//   f = log1p:1
//   divergence = inverse     optional, defaults to the model's own
//   lambda = 3               optional, defaults to the model's own
//   tol = 1e-10              solver knobs: tol, max_iter, multistart
//   [output]
//   dir = out
//   prefix = experiment
//   plots = true
struct ExperimentConfig {
  explicit ExperimentConfig(ModelSpec model) : model(std::move(model)) {}

  ModelSpec model;
  std::optional<Contamination> contamination;
  std::vector<EstimatorConfig> estimators;
  std::size_t replications = 1;
  std::size_t n = 100;
  std::uint64_t seed = 1;
  // Worker count; results do not depend on it.
  unsigned threads = 1;
  std::filesystem::path out_dir = ".";
  std::string prefix = "experiment";
  bool plots = true;

  // Parses and validates; throws ConfigError listing every problem found.
  static ExperimentConfig parse(std::string_view text);
  static ExperimentConfig load(const std::filesystem::path& path);

  // Throws ConfigError listing every problem.
  void validate() const;

  // Every setting that affects the results, as ordered key/value pairs.
  std::vector<std::pair<std::string, std::string>> echo() const;
  // Canonical text form; parse(to_text()) reproduces the configuration.
  std::string to_text() const;
};

// An estimator that takes the model's own divergence and scale.
EstimatorConfig default_estimator(const ModelSpec& model, std::string name, FFunction f);

struct ReplicationResult {
  std::size_t replication = 0;
  std::size_t estimator = 0;
  std::vector<double> theta_hat;  // NaN when the solver failed
  bool converged = false;
  int iterations = 0;
  std::size_t outliers = 0;
  std::string note;
};

// Over the replications whose estimate is finite. variance uses divisor R,
// so mse = bias^2 + variance componentwise.
struct EstimatorSummary {
  std::string name;
  std::string divergence;
  std::string f;
  std::vector<double> bias;
  std::vector<double> variance;
  std::vector<double> mse;
  double converged_fraction = 0.0;
  double mean_iterations = 0.0;
  std::size_t failures = 0;
};

struct ExperimentReport {
  std::string version;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<double> truth;
  std::vector<EstimatorSummary> summaries;
  // Replication-major: rows[r * estimators + e].
  std::vector<ReplicationResult> rows;

  const ReplicationResult& at(std::size_t replication, std::size_t estimator) const;
  // ||theta_hat - truth||^2 for one replication; NaN if the solver failed.
  double squared_error(std::size_t replication, std::size_t estimator) const;
  std::size_t replications() const;
};

ExperimentReport run_experiment(const ExperimentConfig& cfg);

// Fraction of replications in which estimator a has a strictly smaller
// squared error than estimator b.
double win_fraction(const ExperimentReport& report, std::size_t a, std::size_t b);

// CSV schemas (one header row each):
//   meta:         key,value            version, seed, then the config echo
//   summary:      estimator,divergence,f,coordinate,truth,bias,variance,mse,
//                 converged_fraction,mean_iterations,failures
//   replications: replication,estimator,coordinate,theta_hat,error,converged,
//                 iterations,outliers
CsvTable meta_table(const ExperimentReport& report);
CsvTable summary_table(const ExperimentReport& report);
CsvTable replication_table(const ExperimentReport& report);

// Writes <prefix>_meta.csv, <prefix>_summary.csv, <prefix>_replications.csv
// and, with plots, <prefix>_errors.svg (per-estimator error box plots) into
// dir. Returns the paths written.
std::vector<std::filesystem::path> emit_outputs(const ExperimentReport& report,
                                                const std::filesystem::path& dir,
                                                const std::string& prefix, bool plots);

// family,g,f,assumption,assumption_value,condition,condition_value
CsvTable condition_table(const std::vector<ConditionCell>& cells);
// Rows family:g, columns f, colored by condition verdict; cells whose
// assumption fails are marked "no model".
std::string condition_heatmap_svg(const std::vector<ConditionCell>& cells);

// model,f,divergence,method,coordinate,bias,abs_error,standard_error,
// normalizer,verdict,samples,note
CsvTable bias_table(const std::vector<BiasReport>& reports);

}  // namespace invdiv
