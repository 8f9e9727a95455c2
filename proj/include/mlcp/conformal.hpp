#pragma once

#include <memory>
#include <span>
#include <vector>

#include "mlcp/classifier.hpp"
#include "mlcp/dataset.hpp"
#include "mlcp/labeltree.hpp"
#include "mlcp/rng.hpp"

namespace mlcp {

// Counting direction for the smoothed conformal p-value.
//   greater (default): p = [#{s_cal > s} + u * #{s_cal = s}] / (n2 + 1),
//     large when the candidate conforms well; the prediction set keeps
//     candidates with p >= alpha.
//   less: p = [#{s_cal < s} + u * #{s_cal = s}] / (n2 + 1), the opposite
//     tail, retained for auditing. Both are Uniform(0,1) under
//     exchangeability.
enum class TailMode { greater, less };

// Rank-based p-value of a test score among calibration scores, with a
// uniform draw u splitting ties. `calibration` must be sorted ascending.
double smoothed_pvalue(std::span<const double> calibration, double score, double u,
                       TailMode mode = TailMode::greater);

// Per-layer calibration scores of a fitted pipeline. Every calibration
// observation contributes, at every node of layer i, its score under the
// layer-i model at the observation's own transformed class; the lists the
// nodes of one layer see are therefore identical, and are stored once.
struct CalibrationTable {
  std::size_t n2 = 0;
  std::vector<std::vector<double>> layer_scores;  // sorted, indexed by layer-1
  std::vector<std::uint8_t> degenerate;           // layer had < 2 training classes

  int layer_count() const { return static_cast<int>(layer_scores.size()); }
  std::span<const double> scores(int layer, int /*node*/) const {
    return layer_scores[static_cast<std::size_t>(layer - 1)];
  }

  // Diagnostic CSV: layer,node,score rows.
  void write_csv(std::ostream& out, const LabelTree& tree) const;
};

// Models for layers 1..L; a null entry marks a degenerate layer whose
// hypotheses auto-accept with p = 1.
using LayerModels = std::vector<std::unique_ptr<FittedClassifier>>;

CalibrationTable calibrate(const LabelTree& tree, const LayerModels& models,
                           const MultiLabelDataset& ds,
                           std::span<const std::size_t> calibration_rows);

// p(i, k) for one instance, every node k of every layer i.
struct PValueMatrix {
  std::vector<std::vector<double>> p;  // [layer-1][node position]

  double at(int layer, int k) const {
    return p[static_cast<std::size_t>(layer - 1)][static_cast<std::size_t>(k)];
  }
};

// Smoothed conformal p-values for a feature vector: for every layer i and
// node k, the candidate score 1 - f_i(k | x) is ranked among the layer's
// calibration scores, with the tie-break uniform addressed at
// (instance_id, i, k). Pure function of (stream seed, inputs).
PValueMatrix pvalues_for(std::span<const double> x, const LabelTree& tree,
                         const LayerModels& models, const CalibrationTable& cal,
                         const RandomStream& stream, std::uint64_t instance_id,
                         TailMode mode = TailMode::greater);

}  // namespace mlcp
