// Batch CLI for the stacked-metasurface MIMO cutoff-rate optimizer.
//
//   run        optimize over seeded channel realizations, write traces + JSON
//   sweep      repeat a run along one axis with paired per-realization seeds
//   bench      time one optimizer iteration by block, check size scaling
//   plot-data  fold trace CSVs into a long-format table for plotting

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include "simbeam/experiment.hpp"

namespace {

void print_summary(const simbeam::RunSummary& s,
                   const std::filesystem::path& out_dir) {
  std::cout << "wrote " << (out_dir / "summary.json").string() << '\n'
            << "realizations:       " << s.realizations.size() << '\n'
            << "mean iterations:    " << s.mean_iterations << '\n'
            << std::fixed << std::setprecision(4)  //
            << "cutoff rate:        " << s.r0_mean << " +/- " << s.r0_std
            << " bits\n";
  if (!s.realizations.empty() && s.realizations.front().has_final_mi)
    std::cout << "mutual information: " << s.mi_mean << " +/- " << s.mi_std
              << " bits\n";
  std::cout << "total time:         " << std::setprecision(1)
            << s.total_seconds << " s\n";
}

void print_bench_header() {
  std::cout << std::setw(6) << "atoms" << std::setw(4) << "M"       //
            << std::setw(12) << "iter_ms" << std::setw(12) << "P_ms"  //
            << std::setw(12) << "tx_ms" << std::setw(12) << "rx_ms"   //
            << std::setw(13) << "pairsum_us" << std::setw(14) << "layer_model"
            << std::setw(12) << "pair_model" << '\n';
}

void print_bench_row(const simbeam::BenchRow& r) {
  std::cout << std::setw(6) << r.meta_atoms << std::setw(4)
            << r.modulation_order << std::fixed << std::setprecision(3)
            << std::setw(12) << r.iteration_seconds * 1e3 << std::setw(12)
            << r.precoder_seconds * 1e3 << std::setw(12)
            << r.phase_tx_seconds * 1e3 << std::setw(12)
            << r.phase_rx_seconds * 1e3 << std::setw(13)
            << r.pair_sum_seconds * 1e6 << std::setprecision(0)
            << std::setw(14) << r.layer_model << std::setw(12) << r.pair_model
            << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stacked-metasurface MIMO link simulator and cutoff-rate optimizer"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string axis_name;
  std::string in_dir;
  std::string out_file;
  std::uint64_t seed = 0;
  std::vector<std::string> values;
  int repeats = 5;

  auto* run = app.add_subcommand(
      "run", "optimize over seeded channel realizations and write traces");
  run->add_option("--config", config_path, "experiment config file")
      ->required()
      ->check(CLI::ExistingFile);
  auto* seed_opt = run->add_option("--seed", seed, "override the master seed");
  run->add_option("--out", out_dir,
                  "output directory (default: output_dir from the config)");

  auto* sweep = app.add_subcommand(
      "sweep", "repeat the experiment along one axis with paired seeds");
  sweep->add_option("--config", config_path, "experiment config file")
      ->required()
      ->check(CLI::ExistingFile);
  sweep->add_option("--axis", axis_name,
                    "meta_atoms | modulation_order | precoding")
      ->required();
  sweep->add_option("--values", values, "comma-separated axis values")
      ->required()
      ->delimiter(',');
  sweep->add_option("--out", out_dir,
                    "output directory (default: output_dir from the config)");

  auto* bench = app.add_subcommand(
      "bench", "time one optimizer iteration by block and check scaling");
  bench->add_option("--config", config_path, "experiment config file")
      ->required()
      ->check(CLI::ExistingFile);
  bench->add_option("--repeats", repeats, "iterations to average over")
      ->required()
      ->check(CLI::PositiveNumber);

  auto* plot = app.add_subcommand(
      "plot-data", "aggregate trace CSVs into a long-format plot table");
  plot->add_option("--in", in_dir, "directory containing run outputs")
      ->required();
  plot->add_option("--out", out_file, "output CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      simbeam::ExperimentConfig cfg = simbeam::load_config(config_path);
      if (seed_opt->count() > 0) cfg.master_seed = seed;
      const std::filesystem::path dir(out_dir.empty() ? cfg.output_dir
                                                      : out_dir);
      const simbeam::RunSummary s = simbeam::run_experiment(cfg, dir);
      print_summary(s, dir);
    } else if (*sweep) {
      simbeam::ExperimentConfig cfg = simbeam::load_config(config_path);
      const simbeam::SweepAxis axis = simbeam::parse_sweep_axis(axis_name);
      const std::filesystem::path dir(out_dir.empty() ? cfg.output_dir
                                                      : out_dir);
      const auto entries = simbeam::run_sweep(cfg, axis, values, dir);
      std::cout << "wrote " << (dir / "sweep.csv").string() << '\n'
                << std::fixed << std::setprecision(4);
      for (const auto& e : entries) {
        std::cout << e.axis << '=' << e.value << "  R0 " << e.summary.r0_mean
                  << " +/- " << e.summary.r0_std;
        if (e.summary.mi_mean > 0.0)
          std::cout << "  MI " << e.summary.mi_mean << " +/- "
                    << e.summary.mi_std;
        std::cout << " bits\n";
      }
    } else if (*bench) {
      const simbeam::ExperimentConfig cfg = simbeam::load_config(config_path);
      print_bench_header();
      print_bench_row(simbeam::benchmark_iteration(cfg, repeats));
      std::cout << "scaling across meta-atom counts:\n";
      print_bench_header();
      for (const auto& row : simbeam::benchmark_scaling(cfg, repeats))
        print_bench_row(row);
    } else if (*plot) {
      simbeam::emit_plot_data(in_dir, out_file);
      std::cout << "wrote " << out_file << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
