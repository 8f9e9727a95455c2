#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mlcp/conformal.hpp"
#include "mlcp/testing.hpp"

namespace mlcp {

enum class Method { tb1, tb2, br, ps1, ps2 };
enum class Procedure { fixed, adaptive };

std::string method_name(Method m);
std::string procedure_name(Procedure p);

struct PredictionSet {
  std::vector<LabelsetCode> members;  // sorted
  double alpha = 0;
  Method method = Method::tb1;

  std::size_t size() const { return members.size(); }
  bool contains(LabelsetCode code) const;
};

// Set size and coverage flag without materializing the members; the cheap
// path for replicated experiments with large label spaces.
struct SetSummary {
  std::size_t size = 0;
  bool covered = false;
};

struct MethodConfig {
  Method method = Method::tb1;
  Procedure procedure = Procedure::fixed;  // TB only; BR/PS ignore it
  double alpha = 0.1;
  std::uint64_t seed = 0;
  std::vector<double> split_ratios;        // empty -> default for the procedure
  TailMode pvalue_mode = TailMode::greater;
  double variance_floor = 1e-9;
};

// Default split ratios: (0.2, 0.6, 0.2) fixed, (0.3, 0.3, 0.2, 0.2) adaptive.
std::vector<double> default_split_ratios(Procedure procedure);

// ---------------------------------------------------------------------------
// Tree-based pipeline (TB1 over observed labelsets, TB2 over all 2^c).
// ---------------------------------------------------------------------------

struct CalibratedPipeline {
  Method method = Method::tb1;
  Procedure procedure = Procedure::fixed;
  TailMode mode = TailMode::greater;
  double alpha = 0.1;  // level the pipeline was tuned at (adaptive)
  LabelTree tree;
  LayerModels models;
  CalibrationTable cal;
  RandomStream stream;
  std::vector<LabelsetCode> observed;        // registry, sorted
  std::vector<std::uint8_t> node_unobserved; // node id -> every member unobserved
  std::vector<PValueMatrix> tuning_pvalues;  // adaptive only
  std::vector<LabelsetCode> tuning_codes;
  std::optional<double> lambda_star;         // tuned at `alpha`

  bool is_observed(LabelsetCode code) const;
};

// Build tree, per-layer models and calibration table from the given split;
// adaptive mode additionally computes tuning p-values and lambda* at
// cfg.alpha. TB2 requires c <= 16.
CalibratedPipeline fit_pipeline(const MultiLabelDataset& ds, const DataSplit& split,
                                const MethodConfig& cfg);

// Convenience: split internally with cfg.split_ratios (or the procedure
// default) and cfg.seed.
CalibratedPipeline fit_pipeline(const MultiLabelDataset& ds, const MethodConfig& cfg);

// Smoothed conformal p-values for x with the TB2 missing-information rule
// applied: a node all of whose labelsets are unobserved inherits the
// effective p-value of the enclosing cell one layer up (1.0 below the root).
PValueMatrix tb_pvalues(const CalibratedPipeline& pipe, std::span<const double> x,
                        std::uint64_t instance_id);

// Per-layer critical values for this pipeline at `alpha`: Bonferroni split
// for the fixed procedure, lambda* . alpha for the adaptive one (re-tuned on
// the stored tuning artifacts when alpha differs from the fitted level).
AlphaAllocation allocation_for(const CalibratedPipeline& pipe, double alpha);

PredictionSet tb_predict(const CalibratedPipeline& pipe, std::span<const double> x,
                         double alpha, std::uint64_t instance_id);

// Hot path: precomputed allocation, optional summary-only evaluation.
PredictionSet tb_predict(const CalibratedPipeline& pipe, std::span<const double> x,
                         const AlphaAllocation& alloc, std::uint64_t instance_id);
SetSummary tb_summary(const CalibratedPipeline& pipe, std::span<const double> x,
                      const AlphaAllocation& alloc, std::uint64_t instance_id,
                      LabelsetCode truth);

// ---------------------------------------------------------------------------
// Binary-relevance baseline: one binary conformal predictor per label, each
// thresholded at alpha / c.
// ---------------------------------------------------------------------------

struct BinaryRelevancePipeline {
  int c = 0;
  TailMode mode = TailMode::greater;
  RandomStream stream;
  struct PerLabel {
    std::unique_ptr<FittedClassifier> model;  // null when the label is constant
    std::vector<double> cal;                  // sorted true-class scores
  };
  std::vector<PerLabel> labels;
};

BinaryRelevancePipeline fit_br(const MultiLabelDataset& ds, const DataSplit& split,
                               const MethodConfig& cfg);

// Per-label candidate sets {b in {0,1} : p^b >= alpha/c}; an empty set is
// widened to {0,1} to keep the union-bound coverage guarantee.
std::vector<std::array<bool, 2>> br_label_sets(const BinaryRelevancePipeline& pipe,
                                               std::span<const double> x, double alpha,
                                               std::uint64_t instance_id);

PredictionSet br_predict(const BinaryRelevancePipeline& pipe,
                         std::span<const double> x, double alpha,
                         std::uint64_t instance_id);
SetSummary br_summary(const BinaryRelevancePipeline& pipe, std::span<const double> x,
                      double alpha, std::uint64_t instance_id, LabelsetCode truth);

// ---------------------------------------------------------------------------
// Powerset baselines: one flat multiclass conformal predictor over the
// observed labelsets. PS1 keeps candidates with p >= alpha; PS2 appends
// every unobserved labelset.
// ---------------------------------------------------------------------------

struct PowersetPipeline {
  int c = 0;
  TailMode mode = TailMode::greater;
  RandomStream stream;
  std::vector<LabelsetCode> classes;        // observed codes, sorted; class = index
  std::unique_ptr<FittedClassifier> model;  // null when training is single-class
  std::vector<double> cal;                  // sorted true-class scores
};

PowersetPipeline fit_ps(const MultiLabelDataset& ds, const DataSplit& split,
                        const MethodConfig& cfg);

// p-value per observed code, aligned with pipe.classes.
std::vector<double> ps_pvalues(const PowersetPipeline& pipe, std::span<const double> x,
                               std::uint64_t instance_id);

PredictionSet ps1_predict(const PowersetPipeline& pipe, std::span<const double> x,
                          double alpha, std::uint64_t instance_id);
PredictionSet ps2_predict(const PowersetPipeline& pipe, std::span<const double> x,
                          double alpha, std::uint64_t instance_id);
SetSummary ps1_summary(const PowersetPipeline& pipe, std::span<const double> x,
                       double alpha, std::uint64_t instance_id, LabelsetCode truth);
SetSummary ps2_summary(const PowersetPipeline& pipe, std::span<const double> x,
                       double alpha, std::uint64_t instance_id, LabelsetCode truth);

// CSV row per instance: id, method, alpha, set size, semicolon-joined codes,
// covered flag.
void write_prediction_row(std::ostream& out, std::uint64_t instance_id,
                          const PredictionSet& set, LabelsetCode truth);

}  // namespace mlcp
