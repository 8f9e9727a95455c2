#pragma once

#include <iosfwd>
#include <vector>

#include "mlcp/conformal.hpp"
#include "mlcp/labeltree.hpp"

namespace mlcp {

// Per-layer critical values for the hierarchical procedure.
struct AlphaAllocation {
  double alpha = 0;
  std::vector<double> per_layer;

  int layer_count() const { return static_cast<int>(per_layer.size()); }
};

// Procedure 1: alpha_i = alpha / L for every layer.
AlphaAllocation bonferroni_allocation(double alpha, int layer_count);

// Procedure 2: alpha_i = lambda * alpha for every layer, lambda in [0, 1].
AlphaAllocation adaptive_allocation(double lambda, double alpha, int layer_count);

enum class NodeDecision : std::uint8_t { accepted, rejected, rejected_by_ancestor };

struct TestOutcome {
  std::vector<NodeDecision> by_node;          // indexed by node id
  std::vector<LabelsetCode> accepted_leaves;  // sorted codes

  bool leaf_accepted(LabelsetCode code) const;
};

// Layer-by-layer testing: node k of layer i is rejected when p(i,k) is
// strictly below alpha_i or any ancestor was already rejected; the accepted
// hypotheses of the leaf layer form the prediction set.
TestOutcome hierarchical_test(const LabelTree& tree, const PValueMatrix& pv,
                              const AlphaAllocation& alloc);

// Verbose variant: prints one (layer, node, p, alpha_i, decision) line per
// tested node.
TestOutcome hierarchical_test_trace(const LabelTree& tree, const PValueMatrix& pv,
                                    const AlphaAllocation& alloc, std::ostream& out);

struct TuneResult {
  double alpha_star = 0;
  double lambda_star = 0;
  int iterations = 0;
};

// Binary search for the flat per-layer critical value alpha* in (0, alpha]
// whose tuning-set coverage meets the target 1 - (1 + 1/n3)(alpha - 1/n3).
// Terminates when the bracket is narrower than 1e-6 * alpha or after 60
// trials, returning the largest trial whose coverage reached the target.
// Requires alpha > 1 / n3.
TuneResult tune_lambda(const LabelTree& tree,
                       const std::vector<PValueMatrix>& tuning_pvalues,
                       const std::vector<LabelsetCode>& tuning_codes, double alpha);

// Independent check of tune_lambda: the empirical quantile
// Q_n((1 + 1/n)(alpha - 1/n)) of the per-observation minimum true-node
// p-values, clipped to alpha.
double lambda_star_oracle(std::vector<double> min_pvalues, double alpha);

}  // namespace mlcp
