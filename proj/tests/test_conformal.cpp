#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "mlcp/conformal.hpp"
#include "mlcp/rng.hpp"
#include "testutil.hpp"

using namespace mlcp;

TEST_CASE("smoothed_pvalue frozen examples") {
  const std::vector<double> no_ties{0.2, 0.4, 0.6};
  CHECK(smoothed_pvalue(no_ties, 0.5, 0.7, TailMode::greater) ==
        doctest::Approx(0.25).epsilon(1e-12));

  std::vector<double> ties{0.5, 0.5, 0.2};
  std::sort(ties.begin(), ties.end());
  CHECK(smoothed_pvalue(ties, 0.5, 0.5, TailMode::greater) ==
        doctest::Approx(0.25).epsilon(1e-12));
  CHECK(smoothed_pvalue(ties, 0.5, 0.5, TailMode::less) ==
        doctest::Approx(0.5).epsilon(1e-12));

  CHECK_THROWS_AS(smoothed_pvalue({}, 0.5, 0.5), contract_error);
}

TEST_CASE("smoothed_pvalue is non-increasing in the test score (greater mode)") {
  Rng rng(31);
  std::vector<double> cal;
  for (int i = 0; i < 40; ++i) cal.push_back(rng.uniform());
  cal.push_back(0.5);  // force a potential tie
  std::sort(cal.begin(), cal.end());
  const double u = 0.37;
  double prev = 1.0;
  for (double s = 0.0; s <= 1.0; s += 0.01) {
    const double p = smoothed_pvalue(cal, s, u, TailMode::greater);
    CHECK(p <= prev + 1e-12);
    prev = p;
  }
}

TEST_CASE("smoothed_pvalue ignores calibration order") {
  std::vector<double> a{0.1, 0.3, 0.3, 0.9, 0.4};
  std::vector<double> b{0.9, 0.3, 0.4, 0.1, 0.3};
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  CHECK(smoothed_pvalue(a, 0.3, 0.6) == smoothed_pvalue(b, 0.3, 0.6));
}

namespace {

// Two well-separated classes keyed by labelsets {0, 1} with c = 1: the
// smallest real pipeline (one layer, two nodes).
MultiLabelDataset two_class_data(std::size_t n, Rng& rng) {
  MultiLabelDataset ds;
  ds.d = 1;
  ds.c = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t y = rng.bernoulli(0.5) ? 1 : 0;
    ds.features.push_back(rng.normal(y == 1 ? 1.5 : -1.5, 1.0));
    ds.labels.push_back(y);
  }
  return ds;
}

struct SmallPipeline {
  LabelTree tree;
  LayerModels models;
  CalibrationTable cal;
};

SmallPipeline fit_small(const MultiLabelDataset& ds,
                        std::span<const std::size_t> train,
                        std::span<const std::size_t> calib) {
  SmallPipeline p;
  p.tree = build_tree({0, 1}, 1);
  p.models.resize(1);
  p.models[0] = fit_gnb(gather_features(ds, train), ds.d,
                        transform_layer(ds, train, p.tree, 1));
  p.cal = calibrate(p.tree, p.models, ds, calib);
  return p;
}

}  // namespace

TEST_CASE("calibrate gives every node of a layer a full score list") {
  Rng rng(71);
  const auto ds = two_class_data(40, rng);
  std::vector<std::size_t> train, calib;
  for (std::size_t i = 0; i < 39; ++i) train.push_back(i);
  calib.push_back(39);  // single calibration point

  const auto p = fit_small(ds, train, calib);
  CHECK(p.cal.n2 == 1);
  CHECK(p.cal.scores(1, 0).size() == 1);
  CHECK(p.cal.scores(1, 1).size() == 1);

  std::ostringstream csv;
  p.cal.write_csv(csv, p.tree);
  CHECK(csv.str().find("layer,node,score") == 0);
}

TEST_CASE("calibration scores of an accurate model concentrate low") {
  Rng rng(72);
  const auto ds = two_class_data(400, rng);
  std::vector<std::size_t> train, calib;
  for (std::size_t i = 0; i < 200; ++i) train.push_back(i);
  for (std::size_t i = 200; i < 400; ++i) calib.push_back(i);

  const auto p = fit_small(ds, train, calib);
  const auto scores = p.cal.scores(1, 0);
  for (double s : scores) {
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
  }
  const double below_half =
      static_cast<double>(std::count_if(scores.begin(), scores.end(),
                                        [](double s) { return s < 0.5; })) /
      static_cast<double>(scores.size());
  CHECK(below_half > 0.7);
}

TEST_CASE("pvalues_for hits the extreme-count value when nothing ranks above") {
  // Candidate probability ~1 gives score 0; with every calibration score
  // positive, p = n2 / (n2 + 1). Moderate cluster spread keeps the
  // calibration scores away from 0 while the far-out probe saturates.
  Rng rng(73);
  MultiLabelDataset ds;
  ds.d = 1;
  ds.c = 1;
  for (int i = 0; i < 30; ++i) {
    ds.features.push_back(i % 2 == 0 ? -1.5 + rng.normal() : 1.5 + rng.normal());
    ds.labels.push_back(i % 2 == 0 ? 0 : 1);
  }
  std::vector<std::size_t> train, calib;
  for (std::size_t i = 0; i < 20; ++i) train.push_back(i);
  for (std::size_t i = 20; i < 30; ++i) calib.push_back(i);
  const auto p = fit_small(ds, train, calib);
  for (double s : p.cal.scores(1, 0)) REQUIRE(s > 0.0);

  RandomStream stream{11};
  const std::vector<double> far_left{-50.0};
  const auto pv = pvalues_for(far_left, p.tree, p.models, p.cal, stream, 0);
  const int k0 = p.tree.node_of(1, 0);
  CHECK(pv.at(1, k0) ==
        doctest::Approx(10.0 / 11.0).epsilon(1e-9));  // n2 = 10
}

TEST_CASE("pvalues_for is deterministic; tie-break draws follow the address") {
  // Features on a two-point grid force exact score ties, so the uniform at
  // (instance, layer, node) is what separates instances.
  MultiLabelDataset ds;
  ds.d = 1;
  ds.c = 1;
  for (int i = 0; i < 40; ++i) {
    ds.features.push_back(i % 2 == 0 ? -1.0 : 1.0);
    ds.labels.push_back(i % 4 < 2 ? 0 : 1);  // labels only half-aligned
  }
  std::vector<std::size_t> train, calib;
  for (std::size_t i = 0; i < 20; ++i) train.push_back(i);
  for (std::size_t i = 20; i < 40; ++i) calib.push_back(i);
  const auto p = fit_small(ds, train, calib);

  RandomStream stream{5};
  const std::vector<double> x{1.0};
  const auto a = pvalues_for(x, p.tree, p.models, p.cal, stream, 17);
  const auto b = pvalues_for(x, p.tree, p.models, p.cal, stream, 17);
  CHECK(a.p == b.p);
  const auto c = pvalues_for(x, p.tree, p.models, p.cal, stream, 18);
  CHECK(a.p != c.p);
}

TEST_CASE("true-node p-values are uniform over independent pipelines") {
  for (const TailMode mode : {TailMode::greater, TailMode::less}) {
    std::vector<double> pvals;
    Rng rng(mode == TailMode::greater ? 75 : 76);
    for (int rep = 0; rep < 400; ++rep) {
      const auto ds = two_class_data(121, rng);
      std::vector<std::size_t> train, calib;
      for (std::size_t i = 0; i < 60; ++i) train.push_back(i);
      for (std::size_t i = 60; i < 120; ++i) calib.push_back(i);
      const auto p = fit_small(ds, train, calib);

      RandomStream stream{rng.next_u64()};
      const std::size_t test_row = 120;
      const auto pv = pvalues_for(ds.row(test_row), p.tree, p.models, p.cal, stream,
                                  test_row, mode);
      pvals.push_back(pv.at(1, p.tree.node_of(1, ds.code(test_row))));
    }
    const double d = testutil::ks_uniform(pvals);
    CHECK(d < testutil::ks_critical(pvals.size(), 0.01));
  }
}
