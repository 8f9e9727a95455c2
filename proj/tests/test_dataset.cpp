#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "mlcp/dataset.hpp"
#include "mlcp/rng.hpp"

using namespace mlcp;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << content;
  return path.string();
}

}  // namespace

TEST_CASE("encode_labelset big-endian codes") {
  CHECK(encode_labelset({0, 0, 0}) == 0);
  CHECK(encode_labelset({1, 1, 1}) == 7);
  CHECK(encode_labelset({0, 1, 1}) == 3);
  CHECK(encode_labelset({1, 0, 0, 0}) == 8);
}

TEST_CASE("decode_labelset inverts encode") {
  CHECK(decode_labelset(5, 3) == LabelVector{1, 0, 1});
  CHECK(decode_labelset(0, 4) == LabelVector{0, 0, 0, 0});
  CHECK(decode_labelset(7, 3) == LabelVector{1, 1, 1});
  CHECK_THROWS_AS(decode_labelset(8, 3), data_error);
}

TEST_CASE("encode/decode round-trip for every code up to c = 20") {
  for (int c = 1; c <= 20; ++c) {
    const LabelsetCode space = LabelsetCode{1} << c;
    const LabelsetCode step = c <= 12 ? 1 : 97;  // exhaustive for small c
    for (LabelsetCode code = 0; code < space; code += step)
      CHECK(encode_labelset(decode_labelset(code, c)) == code);
    CHECK(encode_labelset(decode_labelset(space - 1, c)) == space - 1);
  }
}

TEST_CASE("csv loader echoes a 2-row file") {
  const auto path = write_temp("mlcp_t1.csv", "1.0,2.0,0,1\n3.0,4.0,1,0\n");
  const auto ds = load_dataset(path, FileFormat::csv, 2);
  REQUIRE(ds.size() == 2);
  CHECK(ds.d == 2);
  CHECK(ds.row(0)[0] == 1.0);
  CHECK(ds.row(0)[1] == 2.0);
  CHECK(ds.row(1)[0] == 3.0);
  CHECK(ds.row(1)[1] == 4.0);
  CHECK(ds.code(0) == 1);
  CHECK(ds.code(1) == 2);
}

TEST_CASE("csv loader skips a header row") {
  const auto path = write_temp("mlcp_t2.csv", "x1,x2,y1\n1.5,2.5,1\n");
  const auto ds = load_dataset(path, FileFormat::csv, 1);
  REQUIRE(ds.size() == 1);
  CHECK(ds.row(0)[1] == 2.5);
  CHECK(ds.code(0) == 1);
}

TEST_CASE("non-binary label is a parse error naming the line") {
  const auto path = write_temp("mlcp_t3.csv", "1.0,2.0,2\n");
  try {
    load_dataset(path, FileFormat::csv, 1);
    FAIL("expected parse_error");
  } catch (const parse_error& e) {
    CHECK(std::string(e.what()).find(":1") != std::string::npos);
  }
}

TEST_CASE("ragged csv row is a parse error") {
  const auto path = write_temp("mlcp_t4.csv", "1.0,2.0,1\n1.0,1\n");
  CHECK_THROWS_AS(load_dataset(path, FileFormat::csv, 1), parse_error);
}

TEST_CASE("arff and csv of the same data load identical tensors") {
  const auto arff = write_temp("mlcp_t5.arff",
                               "@relation demo\n"
                               "% comment line\n"
                               "@attribute f1 numeric\n"
                               "@attribute f2 numeric\n"
                               "@attribute l1 {0,1}\n"
                               "@attribute l2 {0,1}\n"
                               "@data\n"
                               "1.25,-3.5,0,1\n"
                               "0.5,2.0,1,1\n");
  const auto csv = write_temp("mlcp_t5.csv", "1.25,-3.5,0,1\n0.5,2.0,1,1\n");
  const auto a = load_dataset(arff, FileFormat::arff, 2);
  const auto b = load_dataset(csv, FileFormat::csv, 2);
  CHECK(a.features == b.features);
  CHECK(a.labels == b.labels);
  CHECK(a.d == b.d);
}

TEST_CASE("arff labels_first flips the label block") {
  const auto arff = write_temp("mlcp_t6.arff",
                               "@relation demo\n"
                               "@attribute l1 {0,1}\n"
                               "@attribute f1 numeric\n"
                               "@data\n"
                               "1,42.0\n");
  const auto ds = load_dataset(arff, FileFormat::arff, 1, /*labels_first=*/true);
  CHECK(ds.row(0)[0] == 42.0);
  CHECK(ds.code(0) == 1);
}

TEST_CASE("arff subset rejects sparse rows and string attributes") {
  const auto sparse = write_temp("mlcp_t7.arff",
                                 "@relation d\n@attribute f1 numeric\n"
                                 "@attribute l1 {0,1}\n@data\n{0 1.0}\n");
  CHECK_THROWS_AS(load_dataset(sparse, FileFormat::arff, 1), parse_error);
  const auto str = write_temp("mlcp_t8.arff",
                              "@relation d\n@attribute f1 string\n"
                              "@attribute l1 {0,1}\n@data\nfoo,1\n");
  CHECK_THROWS_AS(load_dataset(str, FileFormat::arff, 1), parse_error);
}

TEST_CASE("csv round-trips through write_csv") {
  MultiLabelDataset ds;
  ds.d = 2;
  ds.c = 2;
  ds.features = {0.125, -7.5, 3.25, 0.0};
  ds.labels = {0, 1, 1, 1};
  const auto path =
      (std::filesystem::temp_directory_path() / "mlcp_t9.csv").string();
  write_csv(ds, path);
  const auto back = load_dataset(path, FileFormat::csv, 2);
  CHECK(back.features == ds.features);
  CHECK(back.labels == ds.labels);
}

namespace {

MultiLabelDataset counted_dataset(int a_rows, int b_rows) {
  MultiLabelDataset ds;
  ds.d = 1;
  ds.c = 2;
  for (int i = 0; i < a_rows; ++i) {
    ds.features.push_back(i);
    ds.labels.insert(ds.labels.end(), {0, 1});  // code 1
  }
  for (int i = 0; i < b_rows; ++i) {
    ds.features.push_back(100 + i);
    ds.labels.insert(ds.labels.end(), {1, 0});  // code 2
  }
  return ds;
}

}  // namespace

TEST_CASE("filter_rare_labelsets keeps only frequent labelsets") {
  const auto ds = counted_dataset(25, 5);
  const auto out = filter_rare_labelsets(ds, 20);
  CHECK(out.size() == 25);
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out.code(i) == 1);
}

TEST_CASE("filter_rare_labelsets with min_count 0 is the identity") {
  const auto ds = counted_dataset(3, 2);
  const auto out = filter_rare_labelsets(ds, 0);
  CHECK(out.features == ds.features);
  CHECK(out.labels == ds.labels);
}

TEST_CASE("filter_rare_labelsets is idempotent") {
  const auto ds = counted_dataset(25, 12);
  const auto once = filter_rare_labelsets(ds, 10);
  const auto twice = filter_rare_labelsets(once, 10);
  CHECK(once.features == twice.features);
  CHECK(once.labels == twice.labels);
}

TEST_CASE("filter_rare_labelsets errors when nothing is left") {
  const auto ds = counted_dataset(3, 2);
  CHECK_THROWS_AS(filter_rare_labelsets(ds, 10), data_error);
}

namespace {

MultiLabelDataset rows_dataset(std::size_t n) {
  MultiLabelDataset ds;
  ds.d = 1;
  ds.c = 1;
  for (std::size_t i = 0; i < n; ++i) {
    ds.features.push_back(static_cast<double>(i));
    ds.labels.push_back(i % 2);
  }
  return ds;
}

}  // namespace

TEST_CASE("split slices 10 rows as 5/3/2") {
  const auto ds = rows_dataset(10);
  const auto sp = split(ds, {0.5, 0.3, 0.2}, 1);
  CHECK(sp.train.size() == 5);
  CHECK(sp.calibration.size() == 3);
  CHECK(sp.test.size() == 2);
  CHECK(sp.tuning.empty());
}

TEST_CASE("split supports the 4-part adaptive layout") {
  const auto ds = rows_dataset(100);
  const auto sp = split(ds, {0.3, 0.3, 0.2, 0.2}, 9);
  CHECK(sp.train.size() == 30);
  CHECK(sp.calibration.size() == 30);
  CHECK(sp.tuning.size() == 20);
  CHECK(sp.test.size() == 20);
}

TEST_CASE("split parts are disjoint and cover every row for any seed") {
  const auto ds = rows_dataset(53);
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const auto sp = split(ds, {0.4, 0.3, 0.3}, seed);
    std::set<std::size_t> seen;
    for (const auto* part : {&sp.train, &sp.calibration, &sp.test})
      for (std::size_t i : *part) CHECK(seen.insert(i).second);
    CHECK(seen.size() == 53);
  }
}

TEST_CASE("split is deterministic for a fixed seed") {
  const auto ds = rows_dataset(40);
  const auto a = split(ds, {0.5, 0.25, 0.25}, 7);
  const auto b = split(ds, {0.5, 0.25, 0.25}, 7);
  CHECK(a.train == b.train);
  CHECK(a.calibration == b.calibration);
  CHECK(a.test == b.test);
}

TEST_CASE("split rejects an empty part and bad ratios") {
  const auto ds = rows_dataset(2);
  CHECK_THROWS_AS(split(ds, {0.5, 0.3, 0.2}, 1), data_error);
  CHECK_THROWS_AS(split(rows_dataset(10), {0.5, 0.5}, 1), contract_error);
  CHECK_THROWS_AS(split(rows_dataset(10), {0.6, 0.3, 0.3}, 1), contract_error);
}

TEST_CASE("observed_labelsets returns the distinct codes") {
  MultiLabelDataset ds;
  ds.d = 1;
  ds.c = 2;
  ds.features = {0, 1, 2};
  ds.labels = {0, 1, 0, 1, 1, 0};  // codes 1, 1, 2
  CHECK(observed_labelsets(ds) == std::vector<LabelsetCode>{1, 2});

  MultiLabelDataset single;
  single.d = 1;
  single.c = 2;
  single.features = {0};
  single.labels = {1, 1};
  CHECK(observed_labelsets(single) == std::vector<LabelsetCode>{3});
}

TEST_CASE("RandomStream repeats draws at the same address") {
  RandomStream s{42};
  CHECK(s.uniform_at(1, 2, 3) == s.uniform_at(1, 2, 3));
  CHECK(s.uniform_at(1, 2, 3) != s.uniform_at(1, 2, 4));
  CHECK(s.uniform_at(1, 2, 3) > 0.0);
  CHECK(s.uniform_at(1, 2, 3) < 1.0);
}
