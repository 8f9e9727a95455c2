#include "mlcp/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mlcp {

EvalMetrics evaluate(const std::vector<PredictionSet>& sets,
                     const std::vector<LabelsetCode>& truth) {
  if (sets.empty() || sets.size() != truth.size())
    throw contract_error("evaluate: prediction/truth lists misaligned");
  EvalMetrics m;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    m.coverage += sets[i].contains(truth[i]) ? 1.0 : 0.0;
    m.mean_len += static_cast<double>(sets[i].size());
  }
  m.coverage /= static_cast<double>(sets.size());
  m.mean_len /= static_cast<double>(sets.size());
  return m;
}

std::string MethodSpec::name() const {
  if (method == Method::tb1 || method == Method::tb2)
    return method_name(method) + "-" + procedure_name(procedure);
  return method_name(method);
}

MethodSpec parse_method(const std::string& text) {
  std::string t;
  for (char ch : text) t.push_back(static_cast<char>(std::tolower(ch)));
  if (t == "br") return {Method::br, Procedure::fixed};
  if (t == "ps1") return {Method::ps1, Procedure::fixed};
  if (t == "ps2") return {Method::ps2, Procedure::fixed};
  if (t == "tb1-fixed") return {Method::tb1, Procedure::fixed};
  if (t == "tb1-adaptive") return {Method::tb1, Procedure::adaptive};
  if (t == "tb2-fixed") return {Method::tb2, Procedure::fixed};
  if (t == "tb2-adaptive") return {Method::tb2, Procedure::adaptive};
  throw config_error("unknown method '" + text + "'");
}

namespace {

constexpr std::uint64_t kSplitTrainTag = 1001;
constexpr std::uint64_t kSplitTestTag = 1002;
constexpr std::uint64_t kMethodTagBase = 2000;

int method_ordinal(const MethodSpec& spec) {
  switch (spec.method) {
    case Method::tb1: return spec.adaptive() ? 1 : 0;
    case Method::tb2: return spec.adaptive() ? 3 : 2;
    case Method::br: return 4;
    case Method::ps1:
    case Method::ps2: return 5;  // shared, so PS1 and PS2 are score-identical
  }
  return 6;
}

std::string lower(std::string s) {
  for (char& ch : s) ch = static_cast<char>(std::tolower(ch));
  return s;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> comma_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_num(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw config_error("key '" + key + "': cannot parse number '" + value + "'");
  }
}

std::vector<double> parse_num_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  for (const auto& item : comma_list(value)) out.push_back(parse_num(key, item));
  if (out.empty()) throw config_error("key '" + key + "': empty list");
  return out;
}

bool parse_switch(const std::string& key, const std::string& value) {
  const std::string v = lower(value);
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw config_error("key '" + key + "': expected on/off, got '" + value + "'");
}

void apply_key(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "dataset") { cfg.dataset = value; return; }
  if (key == "source") {
    const std::string v = lower(value);
    if (v == "simulate") cfg.source = DataSource::simulate;
    else if (v == "files") cfg.source = DataSource::files;
    else throw config_error("source must be simulate or files");
    return;
  }
  if (key == "n") { cfg.n = static_cast<std::size_t>(parse_num(key, value)); return; }
  if (key == "labels") { cfg.labels = static_cast<int>(parse_num(key, value)); return; }
  if (key == "beta") {
    const auto v = parse_num_list(key, value);
    if (v.size() != 3) throw config_error("beta needs 3 components");
    cfg.beta = {v[0], v[1], v[2]};
    return;
  }
  if (key == "dependence") { cfg.dependence = parse_num(key, value); return; }
  if (key == "later_noise") {
    const std::string v = lower(value);
    if (v == "cube") cfg.zero_noise_later_labels = false;
    else if (v == "zero") cfg.zero_noise_later_labels = true;
    else throw config_error("later_noise must be cube or zero");
    return;
  }
  if (key == "train_file") { cfg.train_file = value; return; }
  if (key == "test_file") { cfg.test_file = value; return; }
  if (key == "format") {
    const std::string v = lower(value);
    if (v == "csv") cfg.format = FileFormat::csv;
    else if (v == "arff") cfg.format = FileFormat::arff;
    else throw config_error("format must be csv or arff");
    return;
  }
  if (key == "label_position") {
    const std::string v = lower(value);
    if (v == "last") cfg.labels_first = false;
    else if (v == "first") cfg.labels_first = true;
    else throw config_error("label_position must be last or first");
    return;
  }
  if (key == "filter_min_count") {
    cfg.filter_min_count = static_cast<int>(parse_num(key, value));
    return;
  }
  if (key == "methods") {
    cfg.methods.clear();
    for (const auto& item : comma_list(value)) cfg.methods.push_back(parse_method(item));
    if (cfg.methods.empty()) throw config_error("methods list is empty");
    return;
  }
  if (key == "alphas") {
    cfg.alphas = parse_num_list(key, value);
    for (double a : cfg.alphas)
      if (a <= 0 || a >= 1) throw config_error("alphas must lie in (0, 1)");
    return;
  }
  if (key == "replications") {
    cfg.replications = static_cast<int>(parse_num(key, value));
    if (cfg.replications < 1) throw config_error("replications must be >= 1");
    return;
  }
  if (key == "seed") {
    cfg.seed = static_cast<std::uint64_t>(parse_num(key, value));
    return;
  }
  if (key == "pvalue_mode") {
    const std::string v = lower(value);
    if (v == "greater") cfg.pvalue_mode = TailMode::greater;
    else if (v == "less") cfg.pvalue_mode = TailMode::less;
    else throw config_error("pvalue_mode must be greater or less");
    return;
  }
  if (key == "split_fixed") { cfg.split_fixed = parse_num_list(key, value); return; }
  if (key == "split_adaptive") {
    cfg.split_adaptive = parse_num_list(key, value);
    return;
  }
  if (key == "variance_floor") { cfg.variance_floor = parse_num(key, value); return; }
  if (key == "output_dir") { cfg.output_dir = value; return; }
  if (key == "timing") { cfg.timing = parse_switch(key, value); return; }
  if (key == "execution") {
    const std::string v = lower(value);
    if (v == "serial") cfg.execution = Execution::serial;
    else if (v == "parallel") cfg.execution = Execution::parallel;
    else throw config_error("execution must be serial or parallel");
    return;
  }
  if (key == "threads") { cfg.threads = static_cast<int>(parse_num(key, value)); return; }
  if (key == "dump_sets") { cfg.dump_sets = parse_switch(key, value); return; }
  throw config_error("unknown config key '" + key + "'");
}

}  // namespace

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  ExperimentConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error(path + ":" + std::to_string(line_no) +
                         ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      apply_key(cfg, key, value);
    } catch (const config_error& e) {
      throw config_error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (cfg.source == DataSource::files &&
      (cfg.train_file.empty() || cfg.test_file.empty()))
    throw config_error(path + ": files source needs train_file and test_file");
  return cfg;
}

namespace {

struct RepOutput {
  std::vector<ResultRow> rows;
  std::vector<std::string> failures;
  std::string sets_csv;
};

struct FileData {  // combined train+test rows with the protocol boundary
  MultiLabelDataset ds;
  std::size_t train_count = 0;
};

FileData load_files(const ExperimentConfig& cfg) {
  MultiLabelDataset train =
      load_dataset(cfg.train_file, cfg.format, cfg.labels, cfg.labels_first);
  const MultiLabelDataset test =
      load_dataset(cfg.test_file, cfg.format, cfg.labels, cfg.labels_first);
  if (train.d != test.d || train.c != test.c)
    throw data_error("train/test files disagree on shape");

  FileData out;
  const std::size_t n_train = train.size();
  train.features.insert(train.features.end(), test.features.begin(),
                        test.features.end());
  train.labels.insert(train.labels.end(), test.labels.begin(), test.labels.end());

  if (cfg.filter_min_count > 0) {
    // Labelsets are counted over train and test combined, then rare rows are
    // dropped from both sides.
    std::map<LabelsetCode, int> counts;
    for (std::size_t i = 0; i < train.size(); ++i) ++counts[train.code(i)];
    MultiLabelDataset kept;
    kept.d = train.d;
    kept.c = train.c;
    std::size_t kept_train = 0;
    for (std::size_t i = 0; i < train.size(); ++i) {
      if (counts[train.code(i)] <= cfg.filter_min_count) continue;
      const auto r = train.row(i);
      const auto l = train.label(i);
      kept.features.insert(kept.features.end(), r.begin(), r.end());
      kept.labels.insert(kept.labels.end(), l.begin(), l.end());
      if (i < n_train) ++kept_train;
    }
    if (kept_train == 0 || kept_train == kept.size())
      throw data_error("filter_min_count leaves an empty train or test part");
    out.ds = std::move(kept);
    out.train_count = kept_train;
  } else {
    out.ds = std::move(train);
    out.train_count = n_train;
  }
  return out;
}

// Shuffle + slice a concrete index set; mirrors split() on the full dataset.
std::vector<std::vector<std::size_t>> slice_indices(std::vector<std::size_t> idx,
                                                    const std::vector<double>& ratios,
                                                    std::uint64_t seed) {
  Rng rng(seed);
  for (std::size_t i = idx.size(); i > 1; --i)
    std::swap(idx[i - 1], idx[rng.below(i)]);

  const std::size_t n = idx.size();
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

  std::vector<std::vector<std::size_t>> out(parts);
  std::size_t pos = 0;
  for (std::size_t p = 0; p < parts; ++p) {
    out[p].assign(idx.begin() + pos, idx.begin() + pos + sizes[p]);
    pos += sizes[p];
  }
  return out;
}

struct RepData {
  const MultiLabelDataset* ds = nullptr;
  MultiLabelDataset owned;  // simulate source generates per replication
  DataSplit fixed_split;
  DataSplit adaptive_split;
  bool has_adaptive = false;
};

RepData prepare_replication(const ExperimentConfig& cfg, const FileData* files,
                            std::uint64_t seed_r) {
  RepData data;
  data.has_adaptive = std::any_of(cfg.methods.begin(), cfg.methods.end(),
                                  [](const MethodSpec& m) { return m.adaptive(); });
  if (cfg.source == DataSource::simulate) {
    SimConfig sim;
    sim.n = cfg.n;
    sim.c = cfg.labels;
    sim.beta = cfg.beta;
    sim.dependence = cfg.dependence;
    sim.zero_noise_later_labels = cfg.zero_noise_later_labels;
    sim.seed = seed_r;
    data.owned = gen_dataset(sim);
    if (cfg.filter_min_count > 0)
      data.owned = filter_rare_labelsets(data.owned, cfg.filter_min_count);
    data.ds = &data.owned;
    data.fixed_split =
        split(data.owned, cfg.split_fixed, mix_seed(seed_r, kSplitTrainTag));
    if (data.has_adaptive)
      data.adaptive_split =
          split(data.owned, cfg.split_adaptive, mix_seed(seed_r, kSplitTestTag));
    return data;
  }

  // Real-data protocol: the train part splits 40:60 into proper training and
  // calibration; adaptive methods additionally split the test part 50:50
  // into tuning and test, fixed methods see the whole test part.
  data.ds = &files->ds;
  std::vector<std::size_t> train_part(files->train_count);
  std::iota(train_part.begin(), train_part.end(), std::size_t{0});
  std::vector<std::size_t> test_part(files->ds.size() - files->train_count);
  std::iota(test_part.begin(), test_part.end(), files->train_count);

  auto tr = slice_indices(std::move(train_part), {0.4, 0.6},
                          mix_seed(seed_r, kSplitTrainTag));
  data.fixed_split.train = tr[0];
  data.fixed_split.calibration = tr[1];
  data.fixed_split.test = test_part;
  if (data.fixed_split.train.empty() || data.fixed_split.calibration.empty())
    throw data_error("train part too small for the 40:60 protocol");

  if (data.has_adaptive) {
    auto te = slice_indices(test_part, {0.5, 0.5}, mix_seed(seed_r, kSplitTestTag));
    data.adaptive_split.train = tr[0];
    data.adaptive_split.calibration = tr[1];
    data.adaptive_split.tuning = te[0];
    data.adaptive_split.test = te[1];
    if (data.adaptive_split.tuning.empty() || data.adaptive_split.test.empty())
      throw data_error("test part too small for the 50:50 tuning protocol");
  }
  return data;
}

std::unique_ptr<Predictor> fit_method(const MultiLabelDataset& ds,
                                      const DataSplit& sp, const MethodSpec& spec,
                                      const ExperimentConfig& cfg,
                                      std::uint64_t seed_r) {
  MethodConfig mcfg;
  mcfg.method = spec.method;
  mcfg.procedure = spec.procedure;
  mcfg.alpha = cfg.alphas.front();
  mcfg.seed = mix_seed(seed_r, kMethodTagBase + method_ordinal(spec));
  mcfg.pvalue_mode = cfg.pvalue_mode;
  mcfg.variance_floor = cfg.variance_floor;
  switch (spec.method) {
    case Method::tb1:
    case Method::tb2:
      return make_tb_predictor(fit_pipeline(ds, sp, mcfg));
    case Method::br:
      return make_br_predictor(fit_br(ds, sp, mcfg));
    case Method::ps1:
    case Method::ps2:
      return make_ps_predictor(fit_ps(ds, sp, mcfg), spec.method);
  }
  throw contract_error("fit_method: unreachable");
}

void emit_rows(RepOutput& out, const std::string& dataset, const MethodSpec& spec,
               const std::vector<double>& alphas, const BatchResult& result,
               const Predictor& predictor, int replication, double seconds) {
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    ResultRow row;
    row.dataset = dataset;
    row.method = spec;
    row.alpha = alphas[a];
    row.replication = replication;
    row.coverage = result.coverage[a];
    row.mean_len = result.mean_len[a];
    row.lambda_star = predictor.lambda_star(alphas[a]);
    row.seconds = seconds;
    out.rows.push_back(std::move(row));
  }
}

void dump_sets_rows(std::ostringstream& out, const Predictor& predictor,
                    const MultiLabelDataset& ds,
                    std::span<const std::size_t> rows,
                    const std::vector<double>& alphas) {
  for (std::size_t row : rows)
    for (double alpha : alphas) {
      const PredictionSet set = predictor.predict(ds.row(row), row, alpha);
      write_prediction_row(out, row, set, ds.code(row));
    }
}

RepOutput run_replication(const ExperimentConfig& cfg, const FileData* files, int r,
                          Execution inner) {
  RepOutput out;
  const std::uint64_t seed_r = mix_seed(cfg.seed, static_cast<std::uint64_t>(r));
  try {
    const RepData data = prepare_replication(cfg, files, seed_r);
    std::ostringstream sets;
    for (const MethodSpec& spec : cfg.methods) {
      const DataSplit& sp = spec.adaptive() ? data.adaptive_split : data.fixed_split;
      const auto t0 = std::chrono::steady_clock::now();
      const auto predictor = fit_method(*data.ds, sp, spec, cfg, seed_r);
      predictor->prepare(cfg.alphas);
      const BatchResult result = evaluate_rows(*predictor, *data.ds, sp.test, inner);
      double seconds = 0;
      if (cfg.timing)
        seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                      .count();
      emit_rows(out, cfg.dataset, spec, cfg.alphas, result, *predictor, r, seconds);

      // Apples-to-apples companion rows: non-adaptive methods restricted to
      // the test half the adaptive methods are scored on.
      if (cfg.source == DataSource::files && data.has_adaptive && !spec.adaptive()) {
        const BatchResult shared =
            evaluate_rows(*predictor, *data.ds, data.adaptive_split.test, inner);
        emit_rows(out, cfg.dataset + ":shared", spec, cfg.alphas, shared, *predictor,
                  r, seconds);
      }
      if (cfg.dump_sets) dump_sets_rows(sets, *predictor, *data.ds, sp.test, cfg.alphas);
    }
    out.sets_csv = sets.str();
  } catch (const std::exception& e) {
    out.rows.clear();
    out.sets_csv.clear();
    out.failures.push_back("replication " + std::to_string(r) + ": " + e.what());
  }
  return out;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  if (cfg.alphas.empty()) throw config_error("run_experiment: empty alpha grid");
  if (cfg.methods.empty()) throw config_error("run_experiment: no methods");
#ifdef _OPENMP
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
#endif

  FileData files;
  const bool from_files = cfg.source == DataSource::files;
  if (from_files) files = load_files(cfg);

  ExperimentReport report;
  report.label_count = from_files ? files.ds.c : cfg.labels;

  const int R = cfg.replications;
  std::vector<RepOutput> outputs(static_cast<std::size_t>(R));

  // Replications fan out when there are enough of them to fill the machine;
  // otherwise the per-instance loops inside evaluate_rows provide the
  // parallelism. Results are committed in replication order either way.
  const bool outer_parallel =
      cfg.execution == Execution::parallel && R >= parallel_width() && R > 1;
  const Execution inner = outer_parallel ? Execution::serial : cfg.execution;

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) if (outer_parallel)
#endif
  for (int r = 0; r < R; ++r)
    outputs[static_cast<std::size_t>(r)] =
        run_replication(cfg, from_files ? &files : nullptr, r, inner);

  std::ostringstream sets_csv;
  sets_csv << "instance,method,alpha,set_size,codes,covered\n";
  bool any_sets = false;
  for (RepOutput& out : outputs) {
    report.rows.insert(report.rows.end(),
                       std::make_move_iterator(out.rows.begin()),
                       std::make_move_iterator(out.rows.end()));
    report.failures.insert(report.failures.end(),
                           std::make_move_iterator(out.failures.begin()),
                           std::make_move_iterator(out.failures.end()));
    if (!out.sets_csv.empty()) {
      sets_csv << out.sets_csv;
      any_sets = true;
    }
  }
  if (cfg.dump_sets && any_sets) {
    std::filesystem::create_directories(cfg.output_dir);
    std::ofstream f(std::filesystem::path(cfg.output_dir) / "sets.csv");
    f << sets_csv.str();
  }
  return report;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

namespace {

std::string fmt(double v, const char* spec = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

struct GroupKey {
  std::string dataset;
  std::string method;
  double alpha;
  bool operator<(const GroupKey& o) const {
    if (dataset != o.dataset) return dataset < o.dataset;
    if (method != o.method) return method < o.method;
    return alpha < o.alpha;
  }
};

}  // namespace

std::vector<AggregateRow> aggregate_report(const std::vector<ResultRow>& rows) {
  std::map<GroupKey, std::vector<const ResultRow*>> groups;
  for (const ResultRow& row : rows)
    groups[{row.dataset, row.method.name(), row.alpha}].push_back(&row);

  std::vector<AggregateRow> out;
  out.reserve(groups.size());
  for (const auto& [key, members] : groups) {
    AggregateRow agg;
    agg.dataset = key.dataset;
    agg.method = members.front()->method;
    agg.alpha = key.alpha;
    agg.replications = static_cast<int>(members.size());

    double cov = 0, len = 0;
    for (const ResultRow* m : members) {
      cov += m->coverage;
      len += m->mean_len;
    }
    const double n = static_cast<double>(members.size());
    agg.coverage_mean = cov / n;
    agg.mean_len_mean = len / n;

    if (members.size() > 1) {
      double cov2 = 0, len2 = 0;
      for (const ResultRow* m : members) {
        cov2 += (m->coverage - agg.coverage_mean) * (m->coverage - agg.coverage_mean);
        len2 += (m->mean_len - agg.mean_len_mean) * (m->mean_len - agg.mean_len_mean);
      }
      agg.coverage_sd = std::sqrt(cov2 / (n - 1));
      agg.mean_len_sd = std::sqrt(len2 / (n - 1));
    }

    double lam = 0;
    int lam_n = 0;
    for (const ResultRow* m : members)
      if (m->lambda_star.has_value()) {
        lam += *m->lambda_star;
        ++lam_n;
      }
    if (lam_n > 0) agg.lambda_star_mean = lam / lam_n;
    out.push_back(std::move(agg));
  }
  return out;
}

std::vector<LambdaRow> lambda_diagnostics(const std::vector<ResultRow>& rows,
                                          int label_count) {
  std::map<std::pair<std::string, double>, std::pair<double, int>> groups;
  for (const ResultRow& row : rows) {
    if (!row.lambda_star.has_value()) continue;
    auto& [sum, count] = groups[{row.dataset, row.alpha}];
    sum += static_cast<double>(label_count) * *row.lambda_star;
    ++count;
  }
  std::vector<LambdaRow> out;
  out.reserve(groups.size());
  for (const auto& [key, acc] : groups)
    out.push_back({key.first, key.second, acc.first / acc.second});
  return out;
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << "dataset,method,procedure,alpha,replication,coverage,mean_len,"
         "lambda_star,seconds\n";
  for (const ResultRow& row : rows) {
    out << row.dataset << ',' << method_name(row.method.method) << ','
        << procedure_name(row.method.procedure) << ',' << fmt(row.alpha, "%g") << ','
        << row.replication << ',' << fmt(row.coverage) << ',' << fmt(row.mean_len)
        << ',';
    if (row.lambda_star.has_value()) out << fmt(*row.lambda_star);
    out << ',' << fmt(row.seconds) << '\n';
  }
}

std::vector<ResultRow> read_results_csv(std::istream& in) {
  std::vector<ResultRow> rows;
  std::string line;
  if (!std::getline(in, line)) throw data_error("read_results_csv: empty input");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) fields.push_back(trim(item));
    while (fields.size() < 9) fields.emplace_back();  // trailing empty fields
    if (fields.size() != 9)
      throw parse_error("results csv line " + std::to_string(line_no) +
                        ": expected 9 fields");
    ResultRow row;
    row.dataset = fields[0];
    const std::string spec_name =
        fields[1] == "BR" || fields[1] == "PS1" || fields[1] == "PS2"
            ? fields[1]
            : fields[1] + "-" + fields[2];
    row.method = parse_method(spec_name);
    row.alpha = parse_num("alpha", fields[3]);
    row.replication = static_cast<int>(parse_num("replication", fields[4]));
    row.coverage = parse_num("coverage", fields[5]);
    row.mean_len = parse_num("mean_len", fields[6]);
    if (!fields[7].empty()) row.lambda_star = parse_num("lambda_star", fields[7]);
    row.seconds = fields[8].empty() ? 0 : parse_num("seconds", fields[8]);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
  out << "dataset,method,procedure,alpha,coverage_mean,coverage_sd,mean_len_mean,"
         "mean_len_sd,lambda_star_mean,replications\n";
  for (const AggregateRow& row : rows) {
    out << row.dataset << ',' << method_name(row.method.method) << ','
        << procedure_name(row.method.procedure) << ',' << fmt(row.alpha, "%g") << ','
        << fmt(row.coverage_mean) << ',' << fmt(row.coverage_sd) << ','
        << fmt(row.mean_len_mean) << ',' << fmt(row.mean_len_sd) << ',';
    if (row.lambda_star_mean.has_value()) out << fmt(*row.lambda_star_mean);
    out << ',' << row.replications << '\n';
  }
}

void write_lambda_csv(std::ostream& out, const std::vector<LambdaRow>& rows) {
  out << "dataset,alpha,c_lambda_star_mean\n";
  for (const LambdaRow& row : rows)
    out << row.dataset << ',' << fmt(row.alpha, "%g") << ','
        << fmt(row.c_lambda_star_mean) << '\n';
}

void write_report_files(const ExperimentReport& report, const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);
  {
    std::ofstream f(fs::path(cfg.output_dir) / "results.csv");
    if (!f) throw data_error("cannot write results.csv in " + cfg.output_dir);
    write_results_csv(f, report.rows);
  }
  {
    std::ofstream f(fs::path(cfg.output_dir) / "aggregate.csv");
    write_aggregate_csv(f, aggregate_report(report.rows));
  }
  const auto lambda = lambda_diagnostics(report.rows, report.label_count);
  if (!lambda.empty()) {
    std::ofstream f(fs::path(cfg.output_dir) / "lambda_diag.csv");
    write_lambda_csv(f, lambda);
  }
}

}  // namespace mlcp
