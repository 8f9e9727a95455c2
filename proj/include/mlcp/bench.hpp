#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mlcp/batch.hpp"
#include "mlcp/simulate.hpp"

namespace mlcp {

struct EvalMetrics {
  double coverage = 0;
  double mean_len = 0;
};

// Empirical coverage and mean set size over aligned prediction/truth lists.
EvalMetrics evaluate(const std::vector<PredictionSet>& sets,
                     const std::vector<LabelsetCode>& truth);

struct MethodSpec {
  Method method = Method::tb1;
  Procedure procedure = Procedure::fixed;

  bool adaptive() const { return procedure == Procedure::adaptive; }
  std::string name() const;
};

// "TB1-fixed", "TB2-adaptive", "BR", "PS1", "PS2" (case-insensitive).
MethodSpec parse_method(const std::string& text);

enum class DataSource { simulate, files };

struct ExperimentConfig {
  std::string dataset = "sim";
  DataSource source = DataSource::simulate;

  // simulate source
  std::size_t n = 10000;
  int labels = 5;
  std::array<double, 3> beta{2.0, 2.5, 2.0};
  double dependence = 1.5;
  bool zero_noise_later_labels = false;

  // files source
  std::string train_file;
  std::string test_file;
  FileFormat format = FileFormat::csv;
  bool labels_first = false;
  int filter_min_count = 0;

  std::vector<MethodSpec> methods = {
      {Method::tb1, Procedure::fixed},    {Method::tb1, Procedure::adaptive},
      {Method::tb2, Procedure::fixed},    {Method::tb2, Procedure::adaptive},
      {Method::br, Procedure::fixed},     {Method::ps1, Procedure::fixed},
      {Method::ps2, Procedure::fixed}};
  std::vector<double> alphas = {0.02, 0.05, 0.08, 0.10, 0.12,
                                0.15, 0.20, 0.25, 0.30, 0.35};
  int replications = 50;
  std::uint64_t seed = 1;
  TailMode pvalue_mode = TailMode::greater;
  std::vector<double> split_fixed = {0.2, 0.6, 0.2};
  std::vector<double> split_adaptive = {0.3, 0.3, 0.2, 0.2};
  double variance_floor = 1e-9;
  std::string output_dir = ".";
  bool timing = false;            // off keeps the CSV byte-deterministic
  Execution execution = Execution::parallel;
  int threads = 0;                // 0 = library default
  bool dump_sets = false;         // per-instance prediction rows
};

// Flat key = value file; '#' starts a comment; unknown keys are errors.
ExperimentConfig parse_config(const std::string& path);

struct ResultRow {
  std::string dataset;
  MethodSpec method;
  double alpha = 0;
  int replication = 0;
  double coverage = 0;
  double mean_len = 0;
  std::optional<double> lambda_star;
  double seconds = 0;
};

struct ExperimentReport {
  std::vector<ResultRow> rows;
  std::vector<std::string> failures;  // "replication N method M: reason"
  int label_count = 0;
};

// Replicated runner: per replication r derive seed_r = mix_seed(seed, r),
// generate or re-split the data, fit every method, evaluate the test rows at
// every alpha. Deterministic for a fixed config (timing off), including
// under the parallel execution policy.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

struct AggregateRow {
  std::string dataset;
  MethodSpec method;
  double alpha = 0;
  double coverage_mean = 0, coverage_sd = 0;
  double mean_len_mean = 0, mean_len_sd = 0;
  std::optional<double> lambda_star_mean;
  int replications = 0;
};

std::vector<AggregateRow> aggregate_report(const std::vector<ResultRow>& rows);

struct LambdaRow {
  std::string dataset;
  double alpha = 0;
  double c_lambda_star_mean = 0;
};

// Mean c * lambda* per (dataset, alpha) over the adaptive rows. Empty when
// the report holds no adaptive runs.
std::vector<LambdaRow> lambda_diagnostics(const std::vector<ResultRow>& rows,
                                          int label_count);

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_results_csv(std::istream& in);
void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows);
void write_lambda_csv(std::ostream& out, const std::vector<LambdaRow>& rows);

// Convenience: results.csv, aggregate.csv and lambda_diag.csv under the
// configured output directory.
void write_report_files(const ExperimentReport& report, const ExperimentConfig& cfg);

}  // namespace mlcp
