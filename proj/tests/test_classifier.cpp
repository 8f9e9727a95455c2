#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mlcp/classifier.hpp"
#include "mlcp/rng.hpp"
#include "testutil.hpp"

using namespace mlcp;

TEST_CASE("well-separated classes get a confident posterior") {
  std::vector<double> x;
  std::vector<int> y;
  Rng rng(3);
  for (int i = 0; i < 10; ++i) {
    x.push_back(0.0 + 0.01 * rng.normal());
    y.push_back(0);
  }
  for (int i = 0; i < 10; ++i) {
    x.push_back(10.0 + 0.01 * rng.normal());
    y.push_back(1);
  }
  const auto model = fit_gnb(x, 1, y);
  const auto proba = model->predict_proba(std::vector<double>{0.0});
  CHECK(proba[0] >= 0.99);
}

TEST_CASE("identical class-conditional distributions reduce to the priors") {
  // Same three feature values under both classes, priors 3/4 and 1/4 by
  // duplicating class 0 rows.
  std::vector<double> x{1.0, 2.0, 3.0, 1.0, 2.0, 3.0, 1.0, 2.0, 3.0,
                        1.0, 2.0, 3.0};
  std::vector<int> y{0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1};
  const auto model = fit_gnb(x, 1, y);
  const auto proba = model->predict_proba(std::vector<double>{2.0});
  CHECK(proba[0] == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(proba[1] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("constant features clamp to the variance floor") {
  std::vector<double> x{5.0, 5.0, 5.0, 7.0, 7.0};
  std::vector<int> y{0, 0, 0, 1, 1};
  const auto model = fit_gnb(x, 1, y);
  const auto& params = dynamic_cast<const GaussianNb&>(*model).params();
  CHECK(params.variances[0] == 1e-9);
  const auto proba = model->predict_proba(std::vector<double>{5.0});
  CHECK(std::isfinite(proba[0]));
  CHECK(proba[0] > 0.999);
}

TEST_CASE("posteriors are a probability vector") {
  Rng rng(17);
  std::vector<double> x;
  std::vector<int> y;
  for (int i = 0; i < 60; ++i) {
    x.push_back(rng.normal());
    x.push_back(rng.normal());
    y.push_back(static_cast<int>(rng.below(3)));
  }
  const auto model = fit_gnb(x, 2, y);
  for (int t = 0; t < 20; ++t) {
    const std::vector<double> probe{rng.normal(), rng.normal()};
    const auto proba = model->predict_proba(probe);
    double total = 0;
    for (double p : proba) {
      CHECK(p >= 0.0);
      total += p;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("symmetric classes under an equidistant probe are uniform") {
  std::vector<double> x{-1.0, -1.2, -0.8, 1.0, 1.2, 0.8};
  std::vector<int> y{0, 0, 0, 1, 1, 1};
  const auto model = fit_gnb(x, 1, y);
  const auto proba = model->predict_proba(std::vector<double>{0.0});
  CHECK(proba[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("agreement with the brute-force Bayes oracle") {
  Rng rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    const int d = 1 + static_cast<int>(rng.below(3));
    const int k_count = 2 + static_cast<int>(rng.below(2));
    const std::size_t n = 12 + rng.below(39);
    std::vector<double> x;
    std::vector<int> y;
    for (std::size_t i = 0; i < n; ++i) {
      const int k = static_cast<int>(i % k_count);  // every class present
      y.push_back(k);
      for (int f = 0; f < d; ++f) x.push_back(rng.normal(k, 0.7));
    }
    const auto model = fit_gnb(x, d, y);
    for (int t = 0; t < 5; ++t) {
      std::vector<double> probe;
      for (int f = 0; f < d; ++f) probe.push_back(rng.normal(0.5, 1.5));
      const auto got = model->predict_proba(probe);
      const auto want = testutil::bayes_oracle_proba(x, d, y, probe);
      REQUIRE(got.size() == want.size());
      for (std::size_t k = 0; k < got.size(); ++k)
        CHECK(got[k] == doctest::Approx(want[k]).epsilon(1e-8));
    }
  }
}

TEST_CASE("fitted parameters ignore the training row order") {
  std::vector<double> x{1.0, 4.0, 2.0, 8.0, 3.0, 6.0};
  std::vector<int> y{0, 1, 0, 1, 0, 1};
  std::vector<double> x2{3.0, 1.0, 2.0, 6.0, 8.0, 4.0};
  std::vector<int> y2{0, 0, 0, 1, 1, 1};
  const auto a = dynamic_cast<const GaussianNb&>(*fit_gnb(x, 1, y)).params();
  const auto b = dynamic_cast<const GaussianNb&>(*fit_gnb(x2, 1, y2)).params();
  CHECK(a.means == b.means);
  CHECK(a.variances == b.variances);
  CHECK(a.log_priors == b.log_priors);
}

TEST_CASE("nonconformity is 1 - predicted probability") {
  std::vector<double> x{0.0, 0.0, 10.0, 10.0};
  std::vector<int> y{0, 0, 1, 1};
  const auto model = fit_gnb(x, 1, y);
  const std::vector<double> probe{0.0};
  const auto proba = model->predict_proba(probe);
  CHECK(nonconformity(*model, probe, 0) ==
        doctest::Approx(1.0 - proba[0]).epsilon(1e-12));

  SUBCASE("an untrained class scores exactly 1") {
    CHECK(nonconformity(*model, probe, 5) == 1.0);
  }
  SUBCASE("scores over all classes sum to #classes - 1") {
    double total = 0;
    for (int k : model->classes()) total += nonconformity(*model, probe, k);
    CHECK(total == doctest::Approx(static_cast<double>(model->classes().size()) - 1)
                       .epsilon(1e-9));
  }
  SUBCASE("scores stay in [0, 1]") {
    Rng rng(9);
    for (int t = 0; t < 50; ++t) {
      const double s = nonconformity(*model, std::vector<double>{rng.normal(0, 20)},
                                     static_cast<int>(rng.below(3)));
      CHECK(s >= 0.0);
      CHECK(s <= 1.0);
    }
  }
}

TEST_CASE("degenerate and misused fits are rejected") {
  std::vector<double> x{1.0, 2.0};
  std::vector<int> y{0, 0};
  CHECK_THROWS_AS(fit_gnb(x, 1, y), data_error);

  const auto model = fit_gnb(std::vector<double>{1.0, 2.0, 3.0, 4.0}, 2,
                             std::vector<int>{0, 1});
  CHECK_THROWS_AS(model->predict_proba(std::vector<double>{1.0}), contract_error);
}

TEST_CASE("parameter dump is a key-value listing") {
  const auto model = fit_gnb(std::vector<double>{1.0, 2.0, 3.0, 4.0}, 1,
                             std::vector<int>{0, 0, 1, 1});
  const auto text = dynamic_cast<const GaussianNb&>(*model).dump();
  CHECK(text.find("class.0.prior = 0.5") != std::string::npos);
  CHECK(text.find("class.1.mean.0 = 3.5") != std::string::npos);
}
