#include "mlcp/predictors.hpp"

#include <algorithm>
#include <ostream>

namespace mlcp {

std::string method_name(Method m) {
  switch (m) {
    case Method::tb1: return "TB1";
    case Method::tb2: return "TB2";
    case Method::br: return "BR";
    case Method::ps1: return "PS1";
    case Method::ps2: return "PS2";
  }
  return "?";
}

std::string procedure_name(Procedure p) {
  return p == Procedure::fixed ? "fixed" : "adaptive";
}

bool PredictionSet::contains(LabelsetCode code) const {
  return std::binary_search(members.begin(), members.end(), code);
}

std::vector<double> default_split_ratios(Procedure procedure) {
  if (procedure == Procedure::adaptive) return {0.3, 0.3, 0.2, 0.2};
  return {0.2, 0.6, 0.2};
}

bool CalibratedPipeline::is_observed(LabelsetCode code) const {
  return std::binary_search(observed.begin(), observed.end(), code);
}

namespace {

// Null when the training rows hold fewer than 2 distinct classes.
std::unique_ptr<FittedClassifier> fit_layer_model(const std::vector<double>& x, int d,
                                                  const std::vector<int>& classes,
                                                  double variance_floor) {
  const auto [lo, hi] = std::minmax_element(classes.begin(), classes.end());
  if (lo == hi || *lo == *hi) return nullptr;
  return fit_gnb(x, d, classes, variance_floor);
}

std::vector<LabelsetCode> labeled_registry(const MultiLabelDataset& ds,
                                           const DataSplit& split) {
  std::vector<std::size_t> labeled;
  labeled.reserve(split.train.size() + split.calibration.size() + split.tuning.size());
  labeled.insert(labeled.end(), split.train.begin(), split.train.end());
  labeled.insert(labeled.end(), split.calibration.begin(), split.calibration.end());
  labeled.insert(labeled.end(), split.tuning.begin(), split.tuning.end());
  return observed_labelsets(ds, labeled);
}

}  // namespace

CalibratedPipeline fit_pipeline(const MultiLabelDataset& ds, const DataSplit& split,
                                const MethodConfig& cfg) {
  if (cfg.method != Method::tb1 && cfg.method != Method::tb2)
    throw contract_error("fit_pipeline: method must be TB1 or TB2");
  if (cfg.procedure == Procedure::adaptive && split.tuning.empty())
    throw contract_error("fit_pipeline: adaptive procedure needs a tuning split");

  CalibratedPipeline pipe;
  pipe.method = cfg.method;
  pipe.procedure = cfg.procedure;
  pipe.mode = cfg.pvalue_mode;
  pipe.alpha = cfg.alpha;
  pipe.stream.seed = cfg.seed;
  pipe.observed = labeled_registry(ds, split);

  if (cfg.method == Method::tb2) {
    if (ds.c > 16)
      throw data_error("fit_pipeline: TB2 over all labelsets supports at most "
                       "16 labels, got " + std::to_string(ds.c));
    std::vector<LabelsetCode> all(std::size_t{1} << ds.c);
    for (std::size_t i = 0; i < all.size(); ++i)
      all[i] = static_cast<LabelsetCode>(i);
    pipe.tree = build_tree(std::move(all), ds.c);
  } else {
    pipe.tree = build_tree(pipe.observed, ds.c);
  }

  const std::vector<double> train_x = gather_features(ds, split.train);
  pipe.models.resize(static_cast<std::size_t>(pipe.tree.layer_count));
  for (int layer = 1; layer <= pipe.tree.layer_count; ++layer) {
    const auto classes = transform_layer(ds, split.train, pipe.tree, layer);
    pipe.models[static_cast<std::size_t>(layer - 1)] =
        fit_layer_model(train_x, ds.d, classes, cfg.variance_floor);
  }

  pipe.cal = calibrate(pipe.tree, pipe.models, ds, split.calibration);

  pipe.node_unobserved.assign(pipe.tree.nodes.size(), 0);
  if (cfg.method == Method::tb2) {
    for (const TreeNode& node : pipe.tree.nodes) {
      const bool any_observed =
          std::any_of(node.members.begin(), node.members.end(),
                      [&](LabelsetCode code) { return pipe.is_observed(code); });
      pipe.node_unobserved[static_cast<std::size_t>(node.id)] = !any_observed;
    }
  }

  if (cfg.procedure == Procedure::adaptive) {
    pipe.tuning_pvalues.reserve(split.tuning.size());
    pipe.tuning_codes.reserve(split.tuning.size());
    for (std::size_t row : split.tuning) {
      pipe.tuning_pvalues.push_back(tb_pvalues(pipe, ds.row(row), row));
      pipe.tuning_codes.push_back(ds.code(row));
    }
    pipe.lambda_star =
        tune_lambda(pipe.tree, pipe.tuning_pvalues, pipe.tuning_codes, cfg.alpha)
            .lambda_star;
  }
  return pipe;
}

CalibratedPipeline fit_pipeline(const MultiLabelDataset& ds, const MethodConfig& cfg) {
  const auto ratios =
      cfg.split_ratios.empty() ? default_split_ratios(cfg.procedure) : cfg.split_ratios;
  return fit_pipeline(ds, split(ds, ratios, cfg.seed), cfg);
}

PValueMatrix tb_pvalues(const CalibratedPipeline& pipe, std::span<const double> x,
                        std::uint64_t instance_id) {
  PValueMatrix pv = pvalues_for(x, pipe.tree, pipe.models, pipe.cal, pipe.stream,
                                instance_id, pipe.mode);
  if (pipe.method != Method::tb2) return pv;

  // Missing-information rule: a node without any observed labelset takes the
  // effective p-value of the cell containing it one layer up; below the root
  // that value is 1. Processing layers top-down resolves chains of
  // unobserved ancestors.
  for (int layer = 1; layer <= pipe.tree.layer_count; ++layer) {
    auto& row = pv.p[static_cast<std::size_t>(layer - 1)];
    const auto& ids = pipe.tree.layers[static_cast<std::size_t>(layer - 1)];
    for (std::size_t k = 0; k < ids.size(); ++k) {
      const TreeNode& node = pipe.tree.node(ids[k]);
      if (!pipe.node_unobserved[static_cast<std::size_t>(node.id)]) continue;
      if (layer == 1) {
        row[k] = 1.0;
      } else {
        const int up = pipe.tree.node_of(layer - 1, node.members.front());
        row[k] = pv.p[static_cast<std::size_t>(layer - 2)][static_cast<std::size_t>(up)];
      }
    }
  }
  return pv;
}

AlphaAllocation allocation_for(const CalibratedPipeline& pipe, double alpha) {
  if (pipe.procedure == Procedure::fixed)
    return bonferroni_allocation(alpha, pipe.tree.layer_count);
  double lambda = 0;
  if (pipe.lambda_star.has_value() && alpha == pipe.alpha) {
    lambda = *pipe.lambda_star;
  } else {
    lambda = tune_lambda(pipe.tree, pipe.tuning_pvalues, pipe.tuning_codes, alpha)
                 .lambda_star;
  }
  return adaptive_allocation(lambda, alpha, pipe.tree.layer_count);
}

PredictionSet tb_predict(const CalibratedPipeline& pipe, std::span<const double> x,
                         double alpha, std::uint64_t instance_id) {
  return tb_predict(pipe, x, allocation_for(pipe, alpha), instance_id);
}

PredictionSet tb_predict(const CalibratedPipeline& pipe, std::span<const double> x,
                         const AlphaAllocation& alloc, std::uint64_t instance_id) {
  const PValueMatrix pv = tb_pvalues(pipe, x, instance_id);
  TestOutcome outcome = hierarchical_test(pipe.tree, pv, alloc);
  PredictionSet set;
  set.method = pipe.method;
  set.alpha = alloc.alpha;
  set.members = std::move(outcome.accepted_leaves);
  return set;
}

SetSummary tb_summary(const CalibratedPipeline& pipe, std::span<const double> x,
                      const AlphaAllocation& alloc, std::uint64_t instance_id,
                      LabelsetCode truth) {
  const PValueMatrix pv = tb_pvalues(pipe, x, instance_id);
  const TestOutcome outcome = hierarchical_test(pipe.tree, pv, alloc);
  return {outcome.accepted_leaves.size(), outcome.leaf_accepted(truth)};
}

// ---------------------------------------------------------------------------
// Binary relevance
// ---------------------------------------------------------------------------

BinaryRelevancePipeline fit_br(const MultiLabelDataset& ds, const DataSplit& split,
                               const MethodConfig& cfg) {
  BinaryRelevancePipeline pipe;
  pipe.c = ds.c;
  pipe.mode = cfg.pvalue_mode;
  pipe.stream.seed = cfg.seed;
  pipe.labels.resize(static_cast<std::size_t>(ds.c));

  const std::vector<double> train_x = gather_features(ds, split.train);
  for (int l = 0; l < ds.c; ++l) {
    auto& per = pipe.labels[static_cast<std::size_t>(l)];
    std::vector<int> bits;
    bits.reserve(split.train.size());
    for (std::size_t row : split.train) bits.push_back(ds.label(row)[l]);
    per.model = fit_layer_model(train_x, ds.d, bits, cfg.variance_floor);
    if (per.model == nullptr) continue;  // constant label: both candidates accept
    per.cal.reserve(split.calibration.size());
    for (std::size_t row : split.calibration) {
      const auto proba = per.model->predict_proba(ds.row(row));
      per.cal.push_back(
          nonconformity_from_proba(*per.model, proba, ds.label(row)[l]));
    }
    std::sort(per.cal.begin(), per.cal.end());
  }
  return pipe;
}

std::vector<std::array<bool, 2>> br_label_sets(const BinaryRelevancePipeline& pipe,
                                               std::span<const double> x, double alpha,
                                               std::uint64_t instance_id) {
  const double threshold = alpha / static_cast<double>(pipe.c);
  std::vector<std::array<bool, 2>> sets(static_cast<std::size_t>(pipe.c));
  for (int l = 0; l < pipe.c; ++l) {
    auto& keep = sets[static_cast<std::size_t>(l)];
    const auto& per = pipe.labels[static_cast<std::size_t>(l)];
    if (per.model == nullptr) {
      keep = {true, true};
      continue;
    }
    const auto proba = per.model->predict_proba(x);
    for (int b = 0; b < 2; ++b) {
      const double s = nonconformity_from_proba(*per.model, proba, b);
      const double u = pipe.stream.uniform_at(instance_id,
                                              static_cast<std::uint64_t>(l + 1),
                                              static_cast<std::uint64_t>(b));
      keep[static_cast<std::size_t>(b)] =
          smoothed_pvalue(per.cal, s, u, pipe.mode) >= threshold;
    }
    if (!keep[0] && !keep[1]) keep = {true, true};  // widen empty per-label sets
  }
  return sets;
}

PredictionSet br_predict(const BinaryRelevancePipeline& pipe,
                         std::span<const double> x, double alpha,
                         std::uint64_t instance_id) {
  const auto sets = br_label_sets(pipe, x, alpha, instance_id);
  std::vector<LabelsetCode> codes{0};
  for (int l = 0; l < pipe.c; ++l) {
    const auto& keep = sets[static_cast<std::size_t>(l)];
    std::vector<LabelsetCode> next;
    next.reserve(codes.size() * 2);
    for (LabelsetCode prefix : codes) {
      if (keep[0]) next.push_back(prefix << 1);
      if (keep[1]) next.push_back((prefix << 1) | 1u);
    }
    codes = std::move(next);
  }
  PredictionSet set;
  set.method = Method::br;
  set.alpha = alpha;
  set.members = std::move(codes);
  std::sort(set.members.begin(), set.members.end());
  return set;
}

SetSummary br_summary(const BinaryRelevancePipeline& pipe, std::span<const double> x,
                      double alpha, std::uint64_t instance_id, LabelsetCode truth) {
  const auto sets = br_label_sets(pipe, x, alpha, instance_id);
  SetSummary out{1, true};
  for (int l = 0; l < pipe.c; ++l) {
    const auto& keep = sets[static_cast<std::size_t>(l)];
    out.size *= static_cast<std::size_t>(keep[0]) + static_cast<std::size_t>(keep[1]);
    const int bit = (truth >> (pipe.c - 1 - l)) & 1u;
    out.covered = out.covered && keep[static_cast<std::size_t>(bit)];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Powerset baselines
// ---------------------------------------------------------------------------

PowersetPipeline fit_ps(const MultiLabelDataset& ds, const DataSplit& split,
                        const MethodConfig& cfg) {
  PowersetPipeline pipe;
  pipe.c = ds.c;
  pipe.mode = cfg.pvalue_mode;
  pipe.stream.seed = cfg.seed;
  pipe.classes = labeled_registry(ds, split);

  auto class_of = [&](LabelsetCode code) {
    return static_cast<int>(
        std::lower_bound(pipe.classes.begin(), pipe.classes.end(), code) -
        pipe.classes.begin());
  };

  const std::vector<double> train_x = gather_features(ds, split.train);
  std::vector<int> train_y;
  train_y.reserve(split.train.size());
  for (std::size_t row : split.train) train_y.push_back(class_of(ds.code(row)));
  pipe.model = fit_layer_model(train_x, ds.d, train_y, cfg.variance_floor);

  if (pipe.model != nullptr) {
    pipe.cal.reserve(split.calibration.size());
    for (std::size_t row : split.calibration) {
      const auto proba = pipe.model->predict_proba(ds.row(row));
      pipe.cal.push_back(
          nonconformity_from_proba(*pipe.model, proba, class_of(ds.code(row))));
    }
    std::sort(pipe.cal.begin(), pipe.cal.end());
  }
  return pipe;
}

std::vector<double> ps_pvalues(const PowersetPipeline& pipe, std::span<const double> x,
                               std::uint64_t instance_id) {
  std::vector<double> out(pipe.classes.size(), 1.0);
  if (pipe.model == nullptr) return out;  // degenerate: every class accepts
  const auto proba = pipe.model->predict_proba(x);
  for (std::size_t k = 0; k < pipe.classes.size(); ++k) {
    const double s = nonconformity_from_proba(*pipe.model, proba, static_cast<int>(k));
    const double u = pipe.stream.uniform_at(instance_id, 1, k);
    out[k] = smoothed_pvalue(pipe.cal, s, u, pipe.mode);
  }
  return out;
}

PredictionSet ps1_predict(const PowersetPipeline& pipe, std::span<const double> x,
                          double alpha, std::uint64_t instance_id) {
  const auto pv = ps_pvalues(pipe, x, instance_id);
  PredictionSet set;
  set.method = Method::ps1;
  set.alpha = alpha;
  for (std::size_t k = 0; k < pipe.classes.size(); ++k)
    if (pv[k] >= alpha) set.members.push_back(pipe.classes[k]);
  return set;
}

PredictionSet ps2_predict(const PowersetPipeline& pipe, std::span<const double> x,
                          double alpha, std::uint64_t instance_id) {
  if (pipe.c > 16)
    throw data_error("ps2_predict: materializing all missing labelsets needs "
                     "c <= 16");
  PredictionSet set = ps1_predict(pipe, x, alpha, instance_id);
  set.method = Method::ps2;
  const LabelsetCode space = LabelsetCode{1} << pipe.c;
  std::vector<LabelsetCode> merged;
  merged.reserve(set.members.size() + space - pipe.classes.size());
  std::size_t at = 0;
  for (LabelsetCode code = 0; code < space; ++code) {
    const bool observed =
        std::binary_search(pipe.classes.begin(), pipe.classes.end(), code);
    if (!observed) {
      merged.push_back(code);
    } else {
      if (at < set.members.size() && set.members[at] == code) {
        merged.push_back(code);
        ++at;
      }
    }
  }
  set.members = std::move(merged);
  return set;
}

SetSummary ps1_summary(const PowersetPipeline& pipe, std::span<const double> x,
                       double alpha, std::uint64_t instance_id, LabelsetCode truth) {
  const auto pv = ps_pvalues(pipe, x, instance_id);
  SetSummary out;
  for (std::size_t k = 0; k < pipe.classes.size(); ++k) {
    if (pv[k] < alpha) continue;
    ++out.size;
    if (pipe.classes[k] == truth) out.covered = true;
  }
  return out;
}

SetSummary ps2_summary(const PowersetPipeline& pipe, std::span<const double> x,
                       double alpha, std::uint64_t instance_id, LabelsetCode truth) {
  SetSummary out = ps1_summary(pipe, x, alpha, instance_id, truth);
  const std::size_t missing =
      (std::size_t{1} << pipe.c) - pipe.classes.size();
  out.size += missing;
  out.covered = out.covered ||
                !std::binary_search(pipe.classes.begin(), pipe.classes.end(), truth);
  return out;
}

void write_prediction_row(std::ostream& out, std::uint64_t instance_id,
                          const PredictionSet& set, LabelsetCode truth) {
  out << instance_id << ',' << method_name(set.method) << ',' << set.alpha << ','
      << set.size() << ',';
  for (std::size_t i = 0; i < set.members.size(); ++i)
    out << (i ? ";" : "") << set.members[i];
  out << ',' << (set.contains(truth) ? 1 : 0) << '\n';
}

}  // namespace mlcp
