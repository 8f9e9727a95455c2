#include "mlcp/conformal.hpp"

#include <algorithm>
#include <ostream>

namespace mlcp {

double smoothed_pvalue(std::span<const double> calibration, double score, double u,
                       TailMode mode) {
  if (calibration.empty())
    throw contract_error("smoothed_pvalue: empty calibration score list");
  const auto lo = std::lower_bound(calibration.begin(), calibration.end(), score);
  const auto hi = std::upper_bound(lo, calibration.end(), score);
  const double ties = static_cast<double>(hi - lo);
  const double count = mode == TailMode::greater
                           ? static_cast<double>(calibration.end() - hi)
                           : static_cast<double>(lo - calibration.begin());
  return (count + u * ties) / (static_cast<double>(calibration.size()) + 1.0);
}

CalibrationTable calibrate(const LabelTree& tree, const LayerModels& models,
                           const MultiLabelDataset& ds,
                           std::span<const std::size_t> calibration_rows) {
  if (static_cast<int>(models.size()) != tree.layer_count)
    throw contract_error("calibrate: one model per tree layer required");
  if (calibration_rows.empty())
    throw contract_error("calibrate: empty calibration set");

  CalibrationTable table;
  table.n2 = calibration_rows.size();
  table.layer_scores.resize(models.size());
  table.degenerate.assign(models.size(), 0);

  for (int layer = 1; layer <= tree.layer_count; ++layer) {
    const FittedClassifier* model = models[static_cast<std::size_t>(layer - 1)].get();
    auto& scores = table.layer_scores[static_cast<std::size_t>(layer - 1)];
    if (model == nullptr) {
      table.degenerate[static_cast<std::size_t>(layer - 1)] = 1;
      continue;
    }
    scores.reserve(calibration_rows.size());
    for (std::size_t row : calibration_rows) {
      const int own_class = tree.node_of(layer, ds.code(row));
      const auto proba = model->predict_proba(ds.row(row));
      scores.push_back(nonconformity_from_proba(*model, proba, own_class));
    }
    std::sort(scores.begin(), scores.end());
  }
  return table;
}

void CalibrationTable::write_csv(std::ostream& out, const LabelTree& tree) const {
  out << "layer,node,score\n";
  for (int layer = 1; layer <= layer_count(); ++layer) {
    const std::size_t width = tree.layer_width(layer);
    for (std::size_t k = 0; k < width; ++k)
      for (double s : scores(layer, static_cast<int>(k)))
        out << layer << ',' << k << ',' << s << '\n';
  }
}

PValueMatrix pvalues_for(std::span<const double> x, const LabelTree& tree,
                         const LayerModels& models, const CalibrationTable& cal,
                         const RandomStream& stream, std::uint64_t instance_id,
                         TailMode mode) {
  if (cal.layer_count() != tree.layer_count ||
      static_cast<int>(models.size()) != tree.layer_count)
    throw contract_error("pvalues_for: calibration/models do not match the tree");

  PValueMatrix out;
  out.p.resize(static_cast<std::size_t>(tree.layer_count));
  for (int layer = 1; layer <= tree.layer_count; ++layer) {
    const std::size_t width = tree.layer_width(layer);
    auto& row = out.p[static_cast<std::size_t>(layer - 1)];
    row.resize(width);
    const FittedClassifier* model = models[static_cast<std::size_t>(layer - 1)].get();
    std::vector<double> proba;
    if (model != nullptr) proba = model->predict_proba(x);
    const auto scores = cal.scores(layer, 0);
    for (std::size_t k = 0; k < width; ++k) {
      const TreeNode& node =
          tree.node(tree.layers[static_cast<std::size_t>(layer - 1)][k]);
      if (node.depth < layer) {
        // Pass-through: the hypothesis was already scored at the node's own
        // depth; reuse that p-value rather than drawing a new one.
        const int up = tree.node_of(layer - 1, node.members.front());
        row[k] = out.p[static_cast<std::size_t>(layer - 2)][static_cast<std::size_t>(up)];
        continue;
      }
      if (model == nullptr) {  // degenerate layer: hypotheses auto-accept
        row[k] = 1.0;
        continue;
      }
      const double s = nonconformity_from_proba(*model, proba, static_cast<int>(k));
      const double u = stream.uniform_at(instance_id,
                                         static_cast<std::uint64_t>(layer), k);
      row[k] = smoothed_pvalue(scores, s, u, mode);
    }
  }
  return out;
}

}  // namespace mlcp
