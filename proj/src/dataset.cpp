#include "mlcp/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "mlcp/rng.hpp"

namespace mlcp {

LabelsetCode encode_labelset(const LabelVector& v) {
  if (v.empty() || v.size() > 20)
    throw contract_error("encode_labelset: label count must be in [1, 20]");
  LabelsetCode code = 0;
  for (std::uint8_t bit : v) {
    if (bit > 1) throw contract_error("encode_labelset: labels must be 0 or 1");
    code = (code << 1) | bit;
  }
  return code;
}

LabelVector decode_labelset(LabelsetCode code, int label_count) {
  if (label_count < 1 || label_count > 20)
    throw contract_error("decode_labelset: label count must be in [1, 20]");
  if (code >= (LabelsetCode{1} << label_count))
    throw data_error("decode_labelset: code out of range for " +
                     std::to_string(label_count) + " labels");
  LabelVector v(label_count);
  for (int i = 0; i < label_count; ++i)
    v[i] = static_cast<std::uint8_t>((code >> (label_count - 1 - i)) & 1u);
  return v;
}

LabelsetCode MultiLabelDataset::code(std::size_t i) const {
  LabelsetCode out = 0;
  const auto bits = label(i);
  for (std::uint8_t b : bits) out = (out << 1) | b;
  return out;
}

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::stringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(trim(cur));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_double(const std::string& tok, double& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && !tok.empty();
}

std::uint8_t parse_binary_label(const std::string& tok, const std::string& path,
                                std::size_t line_no) {
  double v = 0;
  if (!parse_double(tok, v) || (v != 0.0 && v != 1.0))
    throw parse_error(path + ":" + std::to_string(line_no) +
                      ": label field '" + tok + "' is not binary");
  return static_cast<std::uint8_t>(v);
}

void append_row(MultiLabelDataset& ds, const std::vector<std::string>& fields,
                bool labels_first, const std::string& path, std::size_t line_no) {
  const int c = ds.c;
  const int d = ds.d;
  const std::size_t lab_begin = labels_first ? 0 : static_cast<std::size_t>(d);
  for (std::size_t f = 0; f < fields.size(); ++f) {
    const bool is_label = f >= lab_begin && f < lab_begin + static_cast<std::size_t>(c);
    if (is_label) {
      ds.labels.push_back(parse_binary_label(fields[f], path, line_no));
    } else {
      double v = 0;
      if (!parse_double(fields[f], v))
        throw parse_error(path + ":" + std::to_string(line_no) +
                          ": feature field '" + fields[f] + "' is not numeric");
      if (!std::isfinite(v))
        throw parse_error(path + ":" + std::to_string(line_no) +
                          ": feature value is not finite");
      ds.features.push_back(v);
    }
  }
}

MultiLabelDataset load_csv(const std::string& path, int c, bool labels_first) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open file: " + path);

  MultiLabelDataset ds;
  ds.c = c;
  std::string line;
  std::size_t line_no = 0;
  bool have_arity = false;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    auto fields = split_fields(stripped);

    if (!have_arity) {
      double probe = 0;
      if (!parse_double(fields[0], probe)) continue;  // header row
      if (static_cast<int>(fields.size()) <= c)
        throw parse_error(path + ":" + std::to_string(line_no) +
                          ": row has " + std::to_string(fields.size()) +
                          " fields, need more than " + std::to_string(c));
      ds.d = static_cast<int>(fields.size()) - c;
      have_arity = true;
    } else if (fields.size() != static_cast<std::size_t>(ds.d + ds.c)) {
      throw parse_error(path + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(ds.d + ds.c) + " fields, got " +
                        std::to_string(fields.size()));
    }
    append_row(ds, fields, labels_first, path, line_no);
  }
  if (!have_arity) throw parse_error(path + ": no data rows");
  return ds;
}

bool istarts_with(const std::string& s, const char* prefix) {
  std::size_t i = 0;
  for (; prefix[i] != '\0'; ++i) {
    if (i >= s.size() ||
        std::tolower(static_cast<unsigned char>(s[i])) != prefix[i])
      return false;
  }
  return true;
}

// Accepted attribute types: numeric / real / integer, or the nominal {0,1}.
bool arff_type_supported(const std::string& type) {
  const std::string t = trim(type);
  if (istarts_with(t, "numeric") || istarts_with(t, "real") ||
      istarts_with(t, "integer"))
    return true;
  if (!t.empty() && t.front() == '{' && t.back() == '}') {
    auto vals = split_fields(t.substr(1, t.size() - 2));
    std::sort(vals.begin(), vals.end());
    return vals == std::vector<std::string>{"0", "1"};
  }
  return false;
}

MultiLabelDataset load_arff(const std::string& path, int c, bool labels_first) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open file: " + path);

  MultiLabelDataset ds;
  ds.c = c;
  std::string line;
  std::size_t line_no = 0;
  int n_attrs = 0;
  bool in_data = false;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '%') continue;

    if (!in_data) {
      if (istarts_with(stripped, "@relation")) continue;
      if (istarts_with(stripped, "@attribute")) {
        // "@attribute <name> <type>"; the name may be quoted but never
        // contains whitespace in the MULAN files we target.
        std::istringstream ss(stripped);
        std::string kw, name;
        ss >> kw >> name;
        std::string type;
        std::getline(ss, type);
        if (name.empty() || !arff_type_supported(type))
          throw parse_error(path + ":" + std::to_string(line_no) +
                            ": unsupported attribute declaration '" + stripped + "'");
        ++n_attrs;
        continue;
      }
      if (istarts_with(stripped, "@data")) {
        if (n_attrs <= c)
          throw parse_error(path + ": " + std::to_string(n_attrs) +
                            " attributes declared, need more than " + std::to_string(c));
        ds.d = n_attrs - c;
        in_data = true;
        continue;
      }
      throw parse_error(path + ":" + std::to_string(line_no) +
                        ": unexpected line before @data");
    }

    if (stripped[0] == '{')
      throw parse_error(path + ":" + std::to_string(line_no) +
                        ": sparse ARFF rows are not supported");
    auto fields = split_fields(stripped);
    if (fields.size() != static_cast<std::size_t>(n_attrs))
      throw parse_error(path + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(n_attrs) + " fields, got " +
                        std::to_string(fields.size()));
    append_row(ds, fields, labels_first, path, line_no);
  }
  if (!in_data) throw parse_error(path + ": missing @data section");
  if (ds.size() == 0) throw parse_error(path + ": no data rows");
  return ds;
}

}  // namespace

MultiLabelDataset load_dataset(const std::string& path, FileFormat format,
                               int label_count, bool labels_first) {
  if (label_count < 1 || label_count > 20)
    throw contract_error("load_dataset: label count must be in [1, 20]");
  return format == FileFormat::csv ? load_csv(path, label_count, labels_first)
                                   : load_arff(path, label_count, labels_first);
}

MultiLabelDataset filter_rare_labelsets(const MultiLabelDataset& ds, int min_count) {
  if (min_count < 0) throw contract_error("filter_rare_labelsets: min_count < 0");
  std::unordered_map<LabelsetCode, int> counts;
  const std::size_t n = ds.size();
  for (std::size_t i = 0; i < n; ++i) ++counts[ds.code(i)];

  MultiLabelDataset out;
  out.d = ds.d;
  out.c = ds.c;
  for (std::size_t i = 0; i < n; ++i) {
    if (counts[ds.code(i)] <= min_count) continue;
    const auto r = ds.row(i);
    const auto l = ds.label(i);
    out.features.insert(out.features.end(), r.begin(), r.end());
    out.labels.insert(out.labels.end(), l.begin(), l.end());
  }
  if (out.size() == 0)
    throw data_error("filter_rare_labelsets: no rows left at min_count=" +
                     std::to_string(min_count));
  return out;
}

DataSplit split(const MultiLabelDataset& ds, const std::vector<double>& ratios,
                std::uint64_t seed) {
  if (ratios.size() != 3 && ratios.size() != 4)
    throw contract_error("split: need 3 or 4 ratios");
  double sum = 0;
  for (double r : ratios) {
    if (r <= 0) throw contract_error("split: ratios must be positive");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw contract_error("split: ratios must sum to 1");

  const std::size_t n = ds.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i)  // Fisher-Yates
    std::swap(idx[i - 1], idx[rng.below(i)]);

  // Largest-remainder apportionment keeps every size within +-1 of n*ratio.
  const std::size_t parts = ratios.size();
  std::vector<std::size_t> sizes(parts);
  std::vector<std::pair<double, std::size_t>> rem(parts);
  std::size_t assigned = 0;
  for (std::size_t p = 0; p < parts; ++p) {
    const double target = static_cast<double>(n) * ratios[p];
    sizes[p] = static_cast<std::size_t>(target);
    rem[p] = {target - static_cast<double>(sizes[p]), p};
    assigned += sizes[p];
  }
  std::stable_sort(rem.begin(), rem.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++sizes[rem[k % parts].second];

  DataSplit out;
  std::size_t pos = 0;
  auto take = [&](std::size_t count) {
    std::vector<std::size_t> part(idx.begin() + pos, idx.begin() + pos + count);
    pos += count;
    return part;
  };
  out.train = take(sizes[0]);
  out.calibration = take(sizes[1]);
  if (parts == 4) out.tuning = take(sizes[2]);
  out.test = take(sizes[parts - 1]);

  if (out.train.empty() || out.calibration.empty() || out.test.empty() ||
      (parts == 4 && out.tuning.empty()))
    throw data_error("split: a part came out empty (n=" + std::to_string(n) + ")");
  return out;
}

std::vector<LabelsetCode> observed_labelsets(const MultiLabelDataset& ds) {
  std::vector<std::size_t> all(ds.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return observed_labelsets(ds, all);
}

std::vector<LabelsetCode> observed_labelsets(const MultiLabelDataset& ds,
                                             std::span<const std::size_t> rows) {
  std::vector<LabelsetCode> codes;
  codes.reserve(rows.size());
  for (std::size_t i : rows) codes.push_back(ds.code(i));
  std::sort(codes.begin(), codes.end());
  codes.erase(std::unique(codes.begin(), codes.end()), codes.end());
  return codes;
}

std::vector<double> gather_features(const MultiLabelDataset& ds,
                                    std::span<const std::size_t> rows) {
  std::vector<double> out;
  out.reserve(rows.size() * static_cast<std::size_t>(ds.d));
  for (std::size_t i : rows) {
    const auto r = ds.row(i);
    out.insert(out.end(), r.begin(), r.end());
  }
  return out;
}

void write_csv(const MultiLabelDataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write file: " + path);
  char buf[64];
  const std::size_t n = ds.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = ds.row(i);
    for (int f = 0; f < ds.d; ++f) {
      std::snprintf(buf, sizeof buf, "%.17g", r[f]);
      out << buf << ',';
    }
    const auto l = ds.label(i);
    for (int j = 0; j < ds.c; ++j) {
      out << static_cast<int>(l[j]);
      out << (j + 1 < ds.c ? ',' : '\n');
    }
  }
}

}  // namespace mlcp
