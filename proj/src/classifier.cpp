#include "mlcp/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace mlcp {

GaussianNb::GaussianNb(GaussianNbParams params) : params_(std::move(params)) {}

std::vector<double> GaussianNb::predict_proba(std::span<const double> x) const {
  const int d = params_.d;
  if (static_cast<int>(x.size()) != d)
    throw contract_error("predict_proba: expected " + std::to_string(d) +
                         " features, got " + std::to_string(x.size()));

  const std::size_t k_count = params_.class_ids.size();
  std::vector<double> log_post(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    double lp = params_.log_priors[k];
    const std::size_t base = k * static_cast<std::size_t>(d);
    for (int f = 0; f < d; ++f) {
      const double var = params_.variances[base + f];
      const double diff = x[f] - params_.means[base + f];
      lp += -0.5 * std::log(2.0 * std::numbers::pi * var) - diff * diff / (2.0 * var);
    }
    log_post[k] = lp;
  }

  const double max_lp = *std::max_element(log_post.begin(), log_post.end());
  double total = 0;
  for (double& lp : log_post) {
    lp = std::exp(lp - max_lp);
    total += lp;
  }
  for (double& p : log_post) p /= total;
  return log_post;
}

std::string GaussianNb::dump() const {
  std::ostringstream out;
  char buf[64];
  out << "model = gaussian_nb\nfeatures = " << params_.d << "\n";
  for (std::size_t k = 0; k < params_.class_ids.size(); ++k) {
    const int id = params_.class_ids[k];
    std::snprintf(buf, sizeof buf, "%.17g", std::exp(params_.log_priors[k]));
    out << "class." << id << ".prior = " << buf << "\n";
    for (int f = 0; f < params_.d; ++f) {
      const std::size_t at = k * static_cast<std::size_t>(params_.d) + f;
      std::snprintf(buf, sizeof buf, "%.17g", params_.means[at]);
      out << "class." << id << ".mean." << f << " = " << buf << "\n";
      std::snprintf(buf, sizeof buf, "%.17g", params_.variances[at]);
      out << "class." << id << ".var." << f << " = " << buf << "\n";
    }
  }
  return out.str();
}

std::unique_ptr<FittedClassifier> fit_gnb(std::span<const double> features,
                                          int feature_count,
                                          std::span<const int> class_labels,
                                          double variance_floor) {
  if (feature_count < 1) throw contract_error("fit_gnb: need at least 1 feature");
  const std::size_t n = class_labels.size();
  if (n == 0 || features.size() != n * static_cast<std::size_t>(feature_count))
    throw contract_error("fit_gnb: feature/label shape mismatch");

  GaussianNbParams p;
  p.d = feature_count;
  p.class_ids.assign(class_labels.begin(), class_labels.end());
  std::sort(p.class_ids.begin(), p.class_ids.end());
  p.class_ids.erase(std::unique(p.class_ids.begin(), p.class_ids.end()),
                    p.class_ids.end());
  if (p.class_ids.size() < 2)
    throw data_error("fit_gnb: training data holds a single class");

  const std::size_t k_count = p.class_ids.size();
  const std::size_t d = static_cast<std::size_t>(feature_count);
  std::vector<std::size_t> counts(k_count, 0);
  p.means.assign(k_count * d, 0.0);
  p.variances.assign(k_count * d, 0.0);

  auto class_index = [&](int label) {
    return static_cast<std::size_t>(
        std::lower_bound(p.class_ids.begin(), p.class_ids.end(), label) -
        p.class_ids.begin());
  };

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = class_index(class_labels[i]);
    ++counts[k];
    for (std::size_t f = 0; f < d; ++f)
      p.means[k * d + f] += features[i * d + f];
  }
  for (std::size_t k = 0; k < k_count; ++k)
    for (std::size_t f = 0; f < d; ++f)
      p.means[k * d + f] /= static_cast<double>(counts[k]);

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = class_index(class_labels[i]);
    for (std::size_t f = 0; f < d; ++f) {
      const double diff = features[i * d + f] - p.means[k * d + f];
      p.variances[k * d + f] += diff * diff;
    }
  }
  for (std::size_t k = 0; k < k_count; ++k)
    for (std::size_t f = 0; f < d; ++f) {
      double& var = p.variances[k * d + f];
      var = std::max(var / static_cast<double>(counts[k]), variance_floor);
    }

  p.log_priors.resize(k_count);
  for (std::size_t k = 0; k < k_count; ++k)
    p.log_priors[k] = std::log(static_cast<double>(counts[k]) /
                               static_cast<double>(n));

  return std::make_unique<GaussianNb>(std::move(p));
}

double nonconformity(const FittedClassifier& model, std::span<const double> x, int k) {
  const auto proba = model.predict_proba(x);
  return nonconformity_from_proba(model, proba, k);
}

double nonconformity_from_proba(const FittedClassifier& model,
                                std::span<const double> proba, int k) {
  const auto& ids = model.classes();
  const auto it = std::lower_bound(ids.begin(), ids.end(), k);
  if (it == ids.end() || *it != k) return 1.0;  // untrained class
  const double p = proba[static_cast<std::size_t>(it - ids.begin())];
  return std::clamp(1.0 - p, 0.0, 1.0);
}

}  // namespace mlcp
