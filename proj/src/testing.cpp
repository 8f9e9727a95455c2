#include "mlcp/testing.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace mlcp {

AlphaAllocation bonferroni_allocation(double alpha, int layer_count) {
  if (alpha <= 0 || alpha >= 1) throw contract_error("allocation: alpha not in (0,1)");
  if (layer_count < 1) throw contract_error("allocation: need at least 1 layer");
  AlphaAllocation a;
  a.alpha = alpha;
  a.per_layer.assign(static_cast<std::size_t>(layer_count),
                     alpha / static_cast<double>(layer_count));
  return a;
}

AlphaAllocation adaptive_allocation(double lambda, double alpha, int layer_count) {
  if (alpha <= 0 || alpha >= 1) throw contract_error("allocation: alpha not in (0,1)");
  if (lambda < 0 || lambda > 1)
    throw contract_error("allocation: lambda must be in [0, 1]");
  if (layer_count < 1) throw contract_error("allocation: need at least 1 layer");
  AlphaAllocation a;
  a.alpha = alpha;
  a.per_layer.assign(static_cast<std::size_t>(layer_count), lambda * alpha);
  return a;
}

bool TestOutcome::leaf_accepted(LabelsetCode code) const {
  return std::binary_search(accepted_leaves.begin(), accepted_leaves.end(), code);
}

namespace {

TestOutcome run_test(const LabelTree& tree, const PValueMatrix& pv,
                     const AlphaAllocation& alloc, std::ostream* trace) {
  if (alloc.layer_count() != tree.layer_count)
    throw contract_error("hierarchical_test: allocation does not match tree depth");
  if (static_cast<int>(pv.p.size()) != tree.layer_count)
    throw contract_error("hierarchical_test: p-value matrix does not match tree");

  TestOutcome out;
  out.by_node.assign(tree.nodes.size(), NodeDecision::accepted);

  for (int layer = 1; layer <= tree.layer_count; ++layer) {
    const auto& row = pv.p[static_cast<std::size_t>(layer - 1)];
    const auto& ids = tree.layers[static_cast<std::size_t>(layer - 1)];
    if (row.size() != ids.size())
      throw contract_error("hierarchical_test: missing p-values in layer " +
                           std::to_string(layer));
    const double alpha_i = alloc.per_layer[static_cast<std::size_t>(layer - 1)];

    for (std::size_t k = 0; k < ids.size(); ++k) {
      const TreeNode& node = tree.node(ids[k]);
      auto& state = out.by_node[static_cast<std::size_t>(node.id)];
      if (state != NodeDecision::accepted) continue;  // settled at a shallower layer

      // A node entering at its own depth inherits its parent's fate (the
      // root is never tested and stays accepted); a pass-through leaf
      // carries its own state forward.
      if (node.depth == layer && node.parent >= 0 &&
          out.by_node[static_cast<std::size_t>(node.parent)] !=
              NodeDecision::accepted) {
        state = NodeDecision::rejected_by_ancestor;
      } else if (row[k] < alpha_i) {
        state = NodeDecision::rejected;
      }
      if (trace != nullptr) {
        *trace << "layer " << layer << " node " << k << " p=" << row[k]
               << " alpha_i=" << alpha_i << " -> "
               << (state == NodeDecision::accepted
                       ? "accept"
                       : state == NodeDecision::rejected ? "reject"
                                                         : "reject(ancestor)")
               << "\n";
      }
    }
  }

  for (const TreeNode& node : tree.nodes)
    if (node.leaf() &&
        out.by_node[static_cast<std::size_t>(node.id)] == NodeDecision::accepted)
      out.accepted_leaves.push_back(node.members.front());
  std::sort(out.accepted_leaves.begin(), out.accepted_leaves.end());
  return out;
}

}  // namespace

TestOutcome hierarchical_test(const LabelTree& tree, const PValueMatrix& pv,
                              const AlphaAllocation& alloc) {
  return run_test(tree, pv, alloc, nullptr);
}

TestOutcome hierarchical_test_trace(const LabelTree& tree, const PValueMatrix& pv,
                                    const AlphaAllocation& alloc, std::ostream& out) {
  return run_test(tree, pv, alloc, &out);
}

TuneResult tune_lambda(const LabelTree& tree,
                       const std::vector<PValueMatrix>& tuning_pvalues,
                       const std::vector<LabelsetCode>& tuning_codes, double alpha) {
  const std::size_t n3 = tuning_pvalues.size();
  if (n3 == 0 || tuning_codes.size() != n3)
    throw contract_error("tune_lambda: empty or misaligned tuning set");
  if (alpha <= 1.0 / static_cast<double>(n3))
    throw data_error("tune_lambda: alpha <= 1/n3 makes the coverage target "
                     "degenerate; use a larger tuning set");

  const double n = static_cast<double>(n3);
  const double target = 1.0 - (1.0 + 1.0 / n) * (alpha - 1.0 / n);

  auto coverage_at = [&](double alpha_star) {
    const AlphaAllocation flat{
        alpha, std::vector<double>(static_cast<std::size_t>(tree.layer_count),
                                   alpha_star)};
    std::size_t covered = 0;
    for (std::size_t j = 0; j < n3; ++j) {
      const TestOutcome outcome = hierarchical_test(tree, tuning_pvalues[j], flat);
      covered += outcome.leaf_accepted(tuning_codes[j]);
    }
    return static_cast<double>(covered) / n;
  };

  TuneResult result;
  if (coverage_at(alpha) >= target) {  // the full level already reaches target
    result.alpha_star = alpha;
    result.lambda_star = 1.0;
    result.iterations = 1;
    return result;
  }

  double lo = 0.0;         // best trial meeting the target
  double hi = alpha;       // known to miss the target
  double best = 0.0;
  int iter = 1;
  while (hi - lo >= 1e-6 * alpha && iter < 60) {
    ++iter;
    const double mid = 0.5 * (lo + hi);
    if (coverage_at(mid) >= target) {
      lo = mid;
      best = std::max(best, mid);
    } else {
      hi = mid;
    }
  }
  result.alpha_star = best;
  result.lambda_star = best / alpha;
  result.iterations = iter;
  return result;
}

double lambda_star_oracle(std::vector<double> min_pvalues, double alpha) {
  const std::size_t n = min_pvalues.size();
  if (n == 0) throw contract_error("lambda_star_oracle: empty p-value list");
  const double level =
      (1.0 + 1.0 / static_cast<double>(n)) * (alpha - 1.0 / static_cast<double>(n));
  if (level <= 0)
    throw data_error("lambda_star_oracle: alpha <= 1/n makes the quantile "
                     "level degenerate");
  std::size_t k = static_cast<std::size_t>(
      std::ceil(level * static_cast<double>(n)));
  k = std::clamp<std::size_t>(k, 1, n);
  std::nth_element(min_pvalues.begin(), min_pvalues.begin() + (k - 1),
                   min_pvalues.end());
  return std::min(min_pvalues[k - 1], alpha);
}

}  // namespace mlcp
