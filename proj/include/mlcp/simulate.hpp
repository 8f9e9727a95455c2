#pragma once

#include <array>
#include <cstdint>

#include "mlcp/dataset.hpp"

namespace mlcp {

// Synthetic generator: two Gaussian-mixture features and c sequentially
// dependent Bernoulli labels with logistic links.
struct SimConfig {
  std::size_t n = 10000;
  int c = 5;
  std::array<double, 3> beta{2.0, 2.5, 2.0};  // intercept, X1, X2
  double dependence = 1.5;                    // weight of earlier labels
  std::uint64_t seed = 0;
  bool zero_noise_later_labels = false;       // noise term for labels 2..c
};

// X1 ~ 0.5 N(1, 0.3) + 0.5 N(0, 1); X2 ~ 0.3 N(-1/2, 0.2) + 0.7 N(-sqrt(3/2), 0.4).
// Second mixture parameters are variances. Returns an n x 2 row-major matrix.
std::vector<double> gen_features(std::size_t n, std::uint64_t seed);

// Label j: z_j = b0 + b1 X1 + b2 X2 + w * sum_{k<j} Y^k + eps, eps = -0.5 X1^3
// (or 0 for j > 1 when zero_noise_later_labels); Y^j ~ Bernoulli(sigmoid(z_j)).
std::vector<std::uint8_t> gen_labels(const std::vector<double>& features,
                                     const SimConfig& cfg);

MultiLabelDataset gen_dataset(const SimConfig& cfg);

}  // namespace mlcp
