#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mlcp/error.hpp"

namespace mlcp {

// One joint assignment of all c binary labels.
using LabelVector = std::vector<std::uint8_t>;

// Decimal code of a labelset; big-endian, i.e. label 1 is the most
// significant bit: code = sum_i bits[i] * 2^(c-1-i).
using LabelsetCode = std::uint32_t;

LabelsetCode encode_labelset(const LabelVector& v);
LabelVector decode_labelset(LabelsetCode code, int label_count);

// Features (row-major n x d) plus one binary label row per observation.
struct MultiLabelDataset {
  std::vector<double> features;       // n * d, row-major
  std::vector<std::uint8_t> labels;   // n * c, row-major
  int d = 0;                          // feature count
  int c = 0;                          // label count

  std::size_t size() const { return d == 0 ? 0 : features.size() / d; }

  std::span<const double> row(std::size_t i) const {
    return {features.data() + i * static_cast<std::size_t>(d),
            static_cast<std::size_t>(d)};
  }
  std::span<const std::uint8_t> label(std::size_t i) const {
    return {labels.data() + i * static_cast<std::size_t>(c),
            static_cast<std::size_t>(c)};
  }
  LabelsetCode code(std::size_t i) const;
};

// Disjoint index sets into one dataset; `tuning` is empty unless the
// adaptive procedure was requested.
struct DataSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> calibration;
  std::vector<std::size_t> tuning;
  std::vector<std::size_t> test;
};

enum class FileFormat { csv, arff };

// Load a CSV file (d numeric columns then c binary label columns, optional
// single header row) or the ARFF subset used by the MULAN datasets.
// `labels_first` flips the label block to the first c columns.
MultiLabelDataset load_dataset(const std::string& path, FileFormat format,
                               int label_count, bool labels_first = false);

// Keep only rows whose labelset occurs strictly more than min_count times.
MultiLabelDataset filter_rare_labelsets(const MultiLabelDataset& ds, int min_count);

// Seeded uniform shuffle followed by contiguous slicing. `ratios` has 3
// parts (train, calibration, test) or 4 (train, calibration, tuning, test);
// part sizes are within +-1 of n * ratio and every part must be non-empty.
DataSplit split(const MultiLabelDataset& ds, const std::vector<double>& ratios,
                std::uint64_t seed);

// Distinct labelset codes occurring in the dataset, sorted ascending.
std::vector<LabelsetCode> observed_labelsets(const MultiLabelDataset& ds);

// Same, restricted to a row subset.
std::vector<LabelsetCode> observed_labelsets(const MultiLabelDataset& ds,
                                             std::span<const std::size_t> rows);

// Copy a row subset's features into a dense matrix (row-major).
std::vector<double> gather_features(const MultiLabelDataset& ds,
                                    std::span<const std::size_t> rows);

// Write the dataset in the CSV layout load_dataset() reads back.
void write_csv(const MultiLabelDataset& ds, const std::string& path);

}  // namespace mlcp
