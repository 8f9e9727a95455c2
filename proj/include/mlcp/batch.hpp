#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "mlcp/predictors.hpp"

namespace mlcp {

// Execution policy for the per-instance evaluation loops. Results are
// identical under both policies: every instance writes into its own
// preallocated slot and the reductions run in fixed index order afterwards.
enum class Execution { serial, parallel };

// A fitted method prepared for a fixed alpha grid, exposing the uniform
// summary interface the evaluation kernels drive. prepare() tunes lambda*
// once per alpha for adaptive pipelines, so the per-instance calls stay
// pure and lock-free.
class Predictor {
 public:
  virtual ~Predictor() = default;

  virtual Method method() const = 0;
  virtual Procedure procedure() const = 0;

  // Called once, serially, before any evaluation at these levels.
  virtual void prepare(std::span<const double> alphas) = 0;

  // Summaries for one instance at every prepared alpha; out.size() equals
  // the prepared grid size.
  virtual void summarize(std::span<const double> x, std::uint64_t instance_id,
                         LabelsetCode truth, std::span<SetSummary> out) const = 0;

  // Materialized set at one prepared alpha (diagnostics, CSV dumps).
  virtual PredictionSet predict(std::span<const double> x, std::uint64_t instance_id,
                                double alpha) const = 0;

  virtual std::optional<double> lambda_star(double /*alpha*/) const { return {}; }

  std::span<const double> alphas() const { return alphas_; }

 protected:
  std::vector<double> alphas_;
};

std::unique_ptr<Predictor> make_tb_predictor(CalibratedPipeline pipeline);
std::unique_ptr<Predictor> make_br_predictor(BinaryRelevancePipeline pipeline);
std::unique_ptr<Predictor> make_ps_predictor(PowersetPipeline pipeline, Method which);

// Aggregated evaluation of one prepared predictor over a row subset.
struct BatchResult {
  std::vector<double> coverage;   // per alpha
  std::vector<double> mean_len;   // per alpha
  std::vector<SetSummary> cells;  // row-major [row][alpha] when keep_cells
};

BatchResult evaluate_rows(const Predictor& predictor, const MultiLabelDataset& ds,
                          std::span<const std::size_t> rows, Execution execution,
                          bool keep_cells = false);

// Number of worker threads the parallel policy would use.
int parallel_width();

}  // namespace mlcp
