#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "mlcp/rng.hpp"
#include "mlcp/simulate.hpp"

using namespace mlcp;

TEST_CASE("generation is a pure function of the config") {
  SimConfig cfg;
  cfg.n = 500;
  cfg.seed = 123;
  const auto a = gen_dataset(cfg);
  const auto b = gen_dataset(cfg);
  CHECK(a.features == b.features);
  CHECK(a.labels == b.labels);

  cfg.seed = 124;
  const auto c = gen_dataset(cfg);
  CHECK(a.labels != c.labels);
}

TEST_CASE("feature mixtures match their closed-form moments") {
  const std::size_t n = 100000;
  const auto x = gen_features(n, 31);
  double m1 = 0, m2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    m1 += x[2 * i];
    m2 += x[2 * i + 1];
  }
  m1 /= static_cast<double>(n);
  m2 /= static_cast<double>(n);

  // E[X1] = 0.5; Var(X1) = 0.5(0.3+1) + 0.5(1+0) - 0.25 = 0.9.
  // E[X2] = 0.3(-1/2) + 0.7(-sqrt(3/2)) ~= -1.00732; Var(X2) ~= 0.45028.
  const double ex2 = 0.3 * -0.5 + 0.7 * -std::sqrt(1.5);
  CHECK(std::abs(m1 - 0.5) < 4.0 * std::sqrt(0.9 / static_cast<double>(n)));
  CHECK(std::abs(m2 - ex2) < 4.0 * std::sqrt(0.46 / static_cast<double>(n)));

  double v1 = 0, v2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    v1 += (x[2 * i] - m1) * (x[2 * i] - m1);
    v2 += (x[2 * i + 1] - m2) * (x[2 * i + 1] - m2);
  }
  v1 /= static_cast<double>(n);
  v2 /= static_cast<double>(n);
  const double var2 = 0.3 * (0.2 + 0.25) + 0.7 * (0.4 + 1.5) - ex2 * ex2;
  CHECK(std::abs(v1 - 0.9) < 0.03);
  CHECK(std::abs(v2 - var2) < 0.02);
}

TEST_CASE("zero dependence makes labels conditionally independent given X") {
  SimConfig cfg;
  cfg.n = 50000;
  cfg.c = 2;
  cfg.dependence = 0.0;
  cfg.seed = 77;
  const auto ds = gen_dataset(cfg);

  // Both labels share the same success probability p(x); the residual
  // cross-moment E[(Y1 - p)(Y2 - p)] vanishes under independence.
  double cross = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const double x1 = ds.features[2 * i];
    const double x2 = ds.features[2 * i + 1];
    const double z = cfg.beta[0] + cfg.beta[1] * x1 + cfg.beta[2] * x2 -
                     0.5 * x1 * x1 * x1;
    const double p = 1.0 / (1.0 + std::exp(-z));
    cross += (ds.label(i)[0] - p) * (ds.label(i)[1] - p);
  }
  cross /= static_cast<double>(ds.size());
  CHECK(std::abs(cross) < 4.0 / std::sqrt(static_cast<double>(ds.size())));
}

TEST_CASE("positive dependence raises the follow-on label rate") {
  SimConfig cfg;
  cfg.n = 20000;
  cfg.c = 2;
  cfg.seed = 78;
  const auto ds = gen_dataset(cfg);
  double p11 = 0, n1 = 0, p10 = 0, n0 = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (ds.label(i)[0] == 1) {
      p11 += ds.label(i)[1];
      ++n1;
    } else {
      p10 += ds.label(i)[1];
      ++n0;
    }
  }
  CHECK(p11 / n1 > p10 / n0);
}

TEST_CASE("the default generator concentrates on about 16 dominant labelsets") {
  // The stated equations put positive mass on every pattern, so at
  // n = 10,000 nearly all 32 labelsets appear at least once; the
  // distribution still concentrates almost all rows on ~16 of them.
  for (const std::uint64_t seed : {1ull, 2ull, 3ull}) {
    SimConfig cfg;
    cfg.seed = seed;
    const auto ds = gen_dataset(cfg);
    const auto distinct = observed_labelsets(ds).size();
    CHECK(distinct >= 24);
    CHECK(distinct <= 32);

    std::map<LabelsetCode, std::size_t> counts;
    for (std::size_t i = 0; i < ds.size(); ++i) ++counts[ds.code(i)];
    std::vector<std::size_t> freq;
    for (const auto& [code, k] : counts) freq.push_back(k);
    std::sort(freq.rbegin(), freq.rend());
    std::size_t top16 = 0;
    for (std::size_t t = 0; t < freq.size() && t < 16; ++t) top16 += freq[t];
    CHECK(static_cast<double>(top16) / static_cast<double>(ds.size()) >= 0.95);
  }
}

TEST_CASE("boundary configs") {
  SimConfig one;
  one.n = 1;
  one.c = 3;
  const auto ds = gen_dataset(one);
  CHECK(ds.size() == 1);
  CHECK(ds.d == 2);

  SimConfig bad;
  bad.n = 0;
  CHECK_THROWS_AS(gen_dataset(bad), contract_error);
}

TEST_CASE("the later-label noise switch changes only labels 2..c") {
  SimConfig cube;
  cube.n = 2000;
  cube.seed = 99;
  SimConfig zero = cube;
  zero.zero_noise_later_labels = true;

  const auto a = gen_dataset(cube);
  const auto b = gen_dataset(zero);
  CHECK(a.features == b.features);
  bool first_label_same = true;
  for (std::size_t i = 0; i < a.size(); ++i)
    first_label_same = first_label_same && a.label(i)[0] == b.label(i)[0];
  CHECK(first_label_same);
  CHECK(a.labels != b.labels);
}
