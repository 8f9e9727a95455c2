// Command-line front end: dataset simulation, experiment runs, report
// aggregation and labelset-tree inspection.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "mlcp/bench.hpp"
#include "mlcp/labeltree.hpp"
#include "mlcp/simulate.hpp"

namespace {

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const mlcp::config_error*>(&e) != nullptr) return 1;
  if (dynamic_cast<const mlcp::parse_error*>(&e) != nullptr) return 2;
  if (dynamic_cast<const mlcp::data_error*>(&e) != nullptr) return 2;
  return 3;
}

mlcp::FileFormat format_for(const std::string& name, const std::string& flag) {
  if (flag == "csv") return mlcp::FileFormat::csv;
  if (flag == "arff") return mlcp::FileFormat::arff;
  // auto: by extension
  const auto ext = std::filesystem::path(name).extension().string();
  return ext == ".arff" ? mlcp::FileFormat::arff : mlcp::FileFormat::csv;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tree-based multi-label conformal prediction benchmark"};
  app.require_subcommand(1);

  // --- simulate ---
  auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic dataset CSV");
  std::size_t sim_n = 10000;
  int sim_c = 5;
  std::uint64_t sim_seed = 0;
  std::string sim_out = "sim.csv";
  std::vector<double> sim_beta = {2.0, 2.5, 2.0};
  double sim_w = 1.5;
  bool sim_zero_noise = false;
  sim_cmd->add_option("--n", sim_n, "Sample count");
  sim_cmd->add_option("--labels", sim_c, "Label count c");
  sim_cmd->add_option("--seed", sim_seed, "Generator seed");
  sim_cmd->add_option("--out", sim_out, "Output CSV path");
  sim_cmd->add_option("--beta", sim_beta, "Logistic coefficients b0 b1 b2")
      ->expected(3);
  sim_cmd->add_option("--dependence", sim_w, "Weight of earlier labels");
  sim_cmd->add_flag("--zero-later-noise", sim_zero_noise,
                    "Drop the noise term for labels 2..c");

  // --- run ---
  auto* run_cmd = app.add_subcommand("run", "Run an experiment from a config file");
  std::string run_config;
  bool run_trace = false;
  run_cmd->add_option("config", run_config, "Flat key = value config file")
      ->required();
  run_cmd->add_flag("--trace", run_trace,
                    "Print a per-layer testing trace for one instance");

  // --- report ---
  auto* rep_cmd = app.add_subcommand("report", "Aggregate one or more results CSVs");
  std::vector<std::string> rep_inputs;
  std::string rep_dir = ".";
  int rep_labels = 0;
  rep_cmd->add_option("results", rep_inputs, "results.csv files")->required();
  rep_cmd->add_option("--out", rep_dir, "Output directory");
  rep_cmd->add_option("--labels", rep_labels,
                      "Label count c (enables the c*lambda* table)");

  // --- tree ---
  auto* tree_cmd = app.add_subcommand("tree", "Print a dataset's labelset tree");
  std::string tree_data;
  std::string tree_format = "auto";
  int tree_labels = 0;
  bool tree_all = false;
  bool tree_adj = false;
  bool tree_labels_first = false;
  std::size_t tree_sim_n = 0;
  std::uint64_t tree_seed = 0;
  tree_cmd->add_option("--data", tree_data, "Dataset file (csv or arff)");
  tree_cmd->add_option("--format", tree_format, "csv, arff or auto")
      ->check(CLI::IsMember({"csv", "arff", "auto"}));
  tree_cmd->add_option("--labels", tree_labels, "Label count c")->required();
  tree_cmd->add_option("--simulate", tree_sim_n,
                       "Generate this many synthetic rows instead of --data");
  tree_cmd->add_option("--seed", tree_seed, "Seed for --simulate");
  tree_cmd->add_flag("--all", tree_all, "Tree over all 2^c labelsets");
  tree_cmd->add_flag("--adjacency", tree_adj, "Also print the adjacency listing");
  tree_cmd->add_flag("--labels-first", tree_labels_first,
                     "Labels are the first c columns");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim_cmd->parsed()) {
      mlcp::SimConfig cfg;
      cfg.n = sim_n;
      cfg.c = sim_c;
      cfg.seed = sim_seed;
      cfg.beta = {sim_beta[0], sim_beta[1], sim_beta[2]};
      cfg.dependence = sim_w;
      cfg.zero_noise_later_labels = sim_zero_noise;
      mlcp::write_csv(mlcp::gen_dataset(cfg), sim_out);
      std::cout << "wrote " << cfg.n << " rows to " << sim_out << "\n";
      return 0;
    }

    if (run_cmd->parsed()) {
      const mlcp::ExperimentConfig cfg = mlcp::parse_config(run_config);
      if (run_trace) {
        // One-instance testing trace on the first replication's first test row.
        mlcp::ExperimentConfig one = cfg;
        one.replications = 1;
        mlcp::SimConfig sim;
        sim.n = one.n;
        sim.c = one.labels;
        sim.beta = one.beta;
        sim.dependence = one.dependence;
        sim.seed = mlcp::mix_seed(one.seed, 0);
        if (one.source != mlcp::DataSource::simulate) {
          std::cerr << "--trace supports the simulate source only\n";
          return 1;
        }
        const auto ds = mlcp::gen_dataset(sim);
        const auto sp = mlcp::split(ds, one.split_fixed, mlcp::mix_seed(sim.seed, 1001));
        mlcp::MethodConfig mcfg;
        mcfg.method = mlcp::Method::tb1;
        mcfg.alpha = one.alphas.front();
        mcfg.seed = one.seed;
        const auto pipe = mlcp::fit_pipeline(ds, sp, mcfg);
        const std::size_t row = sp.test.front();
        const auto pv = mlcp::tb_pvalues(pipe, ds.row(row), row);
        mlcp::hierarchical_test_trace(
            pipe.tree, pv,
            mlcp::bonferroni_allocation(mcfg.alpha, pipe.tree.layer_count),
            std::cout);
      }
      const mlcp::ExperimentReport report = mlcp::run_experiment(cfg);
      mlcp::write_report_files(report, cfg);
      for (const std::string& failure : report.failures)
        std::cerr << "warning: " << failure << "\n";
      std::cout << "wrote " << report.rows.size() << " result rows to "
                << cfg.output_dir << "\n";
      return report.rows.empty() ? 3 : 0;
    }

    if (rep_cmd->parsed()) {
      std::vector<mlcp::ResultRow> rows;
      for (const std::string& path : rep_inputs) {
        std::ifstream f(path);
        if (!f) throw mlcp::data_error("cannot open " + path);
        auto part = mlcp::read_results_csv(f);
        rows.insert(rows.end(), part.begin(), part.end());
      }
      std::filesystem::create_directories(rep_dir);
      {
        std::ofstream f(std::filesystem::path(rep_dir) / "aggregate.csv");
        mlcp::write_aggregate_csv(f, mlcp::aggregate_report(rows));
      }
      if (rep_labels > 0) {
        const auto lambda = mlcp::lambda_diagnostics(rows, rep_labels);
        std::ofstream f(std::filesystem::path(rep_dir) / "lambda_diag.csv");
        mlcp::write_lambda_csv(f, lambda);
      }
      std::cout << "aggregated " << rows.size() << " rows into " << rep_dir << "\n";
      return 0;
    }

    if (tree_cmd->parsed()) {
      std::vector<mlcp::LabelsetCode> codes;
      if (tree_all) {
        if (tree_labels > 16) throw mlcp::data_error("--all needs labels <= 16");
        codes.resize(std::size_t{1} << tree_labels);
        for (std::size_t i = 0; i < codes.size(); ++i)
          codes[i] = static_cast<mlcp::LabelsetCode>(i);
      } else if (tree_sim_n > 0) {
        mlcp::SimConfig sim;
        sim.n = tree_sim_n;
        sim.c = tree_labels;
        sim.seed = tree_seed;
        codes = mlcp::observed_labelsets(mlcp::gen_dataset(sim));
      } else if (!tree_data.empty()) {
        const auto ds = mlcp::load_dataset(tree_data,
                                           format_for(tree_data, tree_format),
                                           tree_labels, tree_labels_first);
        codes = mlcp::observed_labelsets(ds);
      } else {
        std::cerr << "tree: need --data, --simulate or --all\n";
        return 1;
      }
      const auto tree = mlcp::build_tree(codes, tree_labels);
      std::cout << mlcp::tree_outline(tree);
      if (tree_adj) std::cout << mlcp::tree_adjacency(tree);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return 0;
}
