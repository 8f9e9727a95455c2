#include "mlcp/simulate.hpp"

#include <cmath>

#include "mlcp/rng.hpp"

namespace mlcp {

namespace {

constexpr std::uint64_t kFeatureStream = 0x66656174;  // sub-seed tags
constexpr std::uint64_t kLabelStream = 0x6c616265;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

std::vector<double> gen_features(std::size_t n, std::uint64_t seed) {
  Rng rng(mix_seed(seed, kFeatureStream));
  std::vector<double> x(n * 2);
  const double sd_x2_a = std::sqrt(0.2);
  const double sd_x2_b = std::sqrt(0.4);
  const double mean_x2_b = -std::sqrt(1.5);
  for (std::size_t i = 0; i < n; ++i) {
    x[2 * i] = rng.bernoulli(0.5) ? rng.normal(1.0, std::sqrt(0.3))
                                  : rng.normal(0.0, 1.0);
    x[2 * i + 1] = rng.bernoulli(0.3) ? rng.normal(-0.5, sd_x2_a)
                                      : rng.normal(mean_x2_b, sd_x2_b);
  }
  return x;
}

std::vector<std::uint8_t> gen_labels(const std::vector<double>& features,
                                     const SimConfig& cfg) {
  if (features.size() % 2 != 0)
    throw contract_error("gen_labels: features must have 2 columns");
  const std::size_t n = features.size() / 2;
  Rng rng(mix_seed(cfg.seed, kLabelStream));
  std::vector<std::uint8_t> labels(n * static_cast<std::size_t>(cfg.c));

  for (std::size_t i = 0; i < n; ++i) {
    const double x1 = features[2 * i];
    const double x2 = features[2 * i + 1];
    const double base = cfg.beta[0] + cfg.beta[1] * x1 + cfg.beta[2] * x2;
    const double eps = -0.5 * x1 * x1 * x1;
    int active = 0;
    for (int j = 0; j < cfg.c; ++j) {
      const double noise = (j == 0 || !cfg.zero_noise_later_labels) ? eps : 0.0;
      const double z = base + cfg.dependence * active + noise;
      const std::uint8_t y = rng.bernoulli(sigmoid(z)) ? 1 : 0;
      labels[i * static_cast<std::size_t>(cfg.c) + static_cast<std::size_t>(j)] = y;
      active += y;
    }
  }
  return labels;
}

MultiLabelDataset gen_dataset(const SimConfig& cfg) {
  if (cfg.n < 1 || cfg.c < 1 || cfg.c > 20)
    throw contract_error("gen_dataset: need n >= 1 and 1 <= c <= 20");
  MultiLabelDataset ds;
  ds.d = 2;
  ds.c = cfg.c;
  ds.features = gen_features(cfg.n, cfg.seed);
  ds.labels = gen_labels(ds.features, cfg);
  return ds;
}

}  // namespace mlcp
