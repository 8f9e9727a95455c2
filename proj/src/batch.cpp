#include "mlcp/batch.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mlcp {

namespace {

class TbPredictor final : public Predictor {
 public:
  explicit TbPredictor(CalibratedPipeline pipeline) : pipe_(std::move(pipeline)) {}

  Method method() const override { return pipe_.method; }
  Procedure procedure() const override { return pipe_.procedure; }

  void prepare(std::span<const double> alphas) override {
    alphas_.assign(alphas.begin(), alphas.end());
    allocations_.clear();
    allocations_.reserve(alphas.size());
    for (double alpha : alphas) allocations_.push_back(allocation_for(pipe_, alpha));
  }

  void summarize(std::span<const double> x, std::uint64_t instance_id,
                 LabelsetCode truth, std::span<SetSummary> out) const override {
    const PValueMatrix pv = tb_pvalues(pipe_, x, instance_id);
    for (std::size_t a = 0; a < allocations_.size(); ++a) {
      const TestOutcome outcome = hierarchical_test(pipe_.tree, pv, allocations_[a]);
      out[a] = {outcome.accepted_leaves.size(), outcome.leaf_accepted(truth)};
    }
  }

  PredictionSet predict(std::span<const double> x, std::uint64_t instance_id,
                        double alpha) const override {
    for (const AlphaAllocation& alloc : allocations_)
      if (alloc.alpha == alpha) return tb_predict(pipe_, x, alloc, instance_id);
    return tb_predict(pipe_, x, alpha, instance_id);
  }

  std::optional<double> lambda_star(double alpha) const override {
    if (pipe_.procedure != Procedure::adaptive) return {};
    for (const AlphaAllocation& alloc : allocations_)
      if (alloc.alpha == alpha) return alloc.per_layer.front() / alpha;
    return {};
  }

 private:
  CalibratedPipeline pipe_;
  std::vector<AlphaAllocation> allocations_;
};

class BrPredictor final : public Predictor {
 public:
  explicit BrPredictor(BinaryRelevancePipeline pipeline) : pipe_(std::move(pipeline)) {}

  Method method() const override { return Method::br; }
  Procedure procedure() const override { return Procedure::fixed; }

  void prepare(std::span<const double> alphas) override {
    alphas_.assign(alphas.begin(), alphas.end());
  }

  void summarize(std::span<const double> x, std::uint64_t instance_id,
                 LabelsetCode truth, std::span<SetSummary> out) const override {
    for (std::size_t a = 0; a < alphas_.size(); ++a)
      out[a] = br_summary(pipe_, x, alphas_[a], instance_id, truth);
  }

  PredictionSet predict(std::span<const double> x, std::uint64_t instance_id,
                        double alpha) const override {
    return br_predict(pipe_, x, alpha, instance_id);
  }

 private:
  BinaryRelevancePipeline pipe_;
};

class PsPredictor final : public Predictor {
 public:
  PsPredictor(PowersetPipeline pipeline, Method which)
      : pipe_(std::move(pipeline)), which_(which) {}

  Method method() const override { return which_; }
  Procedure procedure() const override { return Procedure::fixed; }

  void prepare(std::span<const double> alphas) override {
    alphas_.assign(alphas.begin(), alphas.end());
  }

  void summarize(std::span<const double> x, std::uint64_t instance_id,
                 LabelsetCode truth, std::span<SetSummary> out) const override {
    // One p-value vector serves the whole grid.
    const auto pv = ps_pvalues(pipe_, x, instance_id);
    const std::size_t missing = (std::size_t{1} << pipe_.c) - pipe_.classes.size();
    const bool truth_missing =
        !std::binary_search(pipe_.classes.begin(), pipe_.classes.end(), truth);
    for (std::size_t a = 0; a < alphas_.size(); ++a) {
      SetSummary s;
      for (std::size_t k = 0; k < pv.size(); ++k) {
        if (pv[k] < alphas_[a]) continue;
        ++s.size;
        if (pipe_.classes[k] == truth) s.covered = true;
      }
      if (which_ == Method::ps2) {
        s.size += missing;
        s.covered = s.covered || truth_missing;
      }
      out[a] = s;
    }
  }

  PredictionSet predict(std::span<const double> x, std::uint64_t instance_id,
                        double alpha) const override {
    return which_ == Method::ps1 ? ps1_predict(pipe_, x, alpha, instance_id)
                                 : ps2_predict(pipe_, x, alpha, instance_id);
  }

 private:
  PowersetPipeline pipe_;
  Method which_;
};

}  // namespace

std::unique_ptr<Predictor> make_tb_predictor(CalibratedPipeline pipeline) {
  return std::make_unique<TbPredictor>(std::move(pipeline));
}
std::unique_ptr<Predictor> make_br_predictor(BinaryRelevancePipeline pipeline) {
  return std::make_unique<BrPredictor>(std::move(pipeline));
}
std::unique_ptr<Predictor> make_ps_predictor(PowersetPipeline pipeline, Method which) {
  if (which != Method::ps1 && which != Method::ps2)
    throw contract_error("make_ps_predictor: method must be PS1 or PS2");
  return std::make_unique<PsPredictor>(std::move(pipeline), which);
}

int parallel_width() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

BatchResult evaluate_rows(const Predictor& predictor, const MultiLabelDataset& ds,
                          std::span<const std::size_t> rows, Execution execution,
                          bool keep_cells) {
  const std::size_t n_alphas = predictor.alphas().size();
  const std::size_t n_rows = rows.size();
  if (n_alphas == 0) throw contract_error("evaluate_rows: predictor not prepared");
  if (n_rows == 0) throw contract_error("evaluate_rows: empty row set");

  std::vector<SetSummary> cells(n_rows * n_alphas);

  const auto body = [&](std::size_t r) {
    const std::size_t row = rows[r];
    predictor.summarize(ds.row(row), row, ds.code(row),
                        {cells.data() + r * n_alphas, n_alphas});
  };

#ifdef _OPENMP
  if (execution == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (long long r = 0; r < static_cast<long long>(n_rows); ++r)
      body(static_cast<std::size_t>(r));
  } else {
    for (std::size_t r = 0; r < n_rows; ++r) body(r);
  }
#else
  (void)execution;
  for (std::size_t r = 0; r < n_rows; ++r) body(r);
#endif

  BatchResult out;
  out.coverage.assign(n_alphas, 0.0);
  out.mean_len.assign(n_alphas, 0.0);
  for (std::size_t r = 0; r < n_rows; ++r)  // fixed reduction order
    for (std::size_t a = 0; a < n_alphas; ++a) {
      const SetSummary& s = cells[r * n_alphas + a];
      out.coverage[a] += s.covered ? 1.0 : 0.0;
      out.mean_len[a] += static_cast<double>(s.size);
    }
  for (std::size_t a = 0; a < n_alphas; ++a) {
    out.coverage[a] /= static_cast<double>(n_rows);
    out.mean_len[a] /= static_cast<double>(n_rows);
  }
  if (keep_cells) out.cells = std::move(cells);
  return out;
}

}  // namespace mlcp
