#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mlcp/error.hpp"

namespace mlcp {

// Black-box multiclass classifier abstraction. Implementations must return
// a non-negative probability vector over classes() that sums to 1, so any
// model satisfying this contract can stand in for the built-in one.
class FittedClassifier {
 public:
  virtual ~FittedClassifier() = default;

  // Trained class ids, sorted ascending.
  virtual const std::vector<int>& classes() const = 0;

  // Posterior probability vector aligned with classes().
  virtual std::vector<double> predict_proba(std::span<const double> x) const = 0;

  virtual int feature_count() const = 0;
};

struct GaussianNbParams {
  std::vector<int> class_ids;         // sorted
  std::vector<double> log_priors;     // per class
  std::vector<double> means;          // class-major, class * d + feature
  std::vector<double> variances;      // same layout, floored
  int d = 0;
};

class GaussianNb final : public FittedClassifier {
 public:
  explicit GaussianNb(GaussianNbParams params);

  const std::vector<int>& classes() const override { return params_.class_ids; }
  std::vector<double> predict_proba(std::span<const double> x) const override;
  int feature_count() const override { return params_.d; }

  const GaussianNbParams& params() const { return params_; }

  // Plain-text key=value dump of the fitted parameters.
  std::string dump() const;

 private:
  GaussianNbParams params_;
};

// Fit class priors and per-(class, feature) Gaussians on a row-major matrix.
// Variances are population variances (divisor n) clamped from below by
// `variance_floor`. Throws on fewer than 2 distinct classes.
std::unique_ptr<FittedClassifier> fit_gnb(std::span<const double> features,
                                          int feature_count,
                                          std::span<const int> class_labels,
                                          double variance_floor = 1e-9);

// 1 - predicted probability of class k; exactly 1.0 for a class the model
// was never trained on.
double nonconformity(const FittedClassifier& model, std::span<const double> x, int k);

// Same, reusing an already computed probability vector for x.
double nonconformity_from_proba(const FittedClassifier& model,
                                std::span<const double> proba, int k);

}  // namespace mlcp
