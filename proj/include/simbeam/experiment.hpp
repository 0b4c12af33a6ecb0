#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "simbeam/apgm.hpp"
#include "simbeam/config.hpp"
#include "simbeam/objective.hpp"

namespace simbeam {

struct RealizationResult {
  int index = 0;
  std::uint64_t seed = 0;  // child seed driving this realization
  std::vector<IterationRecord> trace;
  double initial_f = 0.0;
  double initial_r0 = 0.0;
  double final_f = 0.0;
  double final_r0 = 0.0;
  bool has_final_mi = false;
  MiEstimate final_mi;
  int iterations = 0;
  int stall_events = 0;
  double seconds = 0.0;
};

struct RunSummary {
  ExperimentConfig config;
  std::vector<RealizationResult> realizations;
  double r0_mean = 0.0;
  double r0_std = 0.0;  // sample std over realizations; 0 for a single one
  double mi_mean = 0.0;
  double mi_std = 0.0;
  double mean_iterations = 0.0;
  double total_seconds = 0.0;
};

// Runs num_realizations seeded optimizations. Child seed r drives channel
// sampling, then the random start; the MI noise stream is a separate split
// of the child seed, reseeded identically at every MI evaluation so that
// comparisons across iterations and sweep variants share noise draws.
// Writes trace_r###.csv per realization and summary.json into out_dir.
// Trace CSVs carry no timing, so identical config + seed reproduce them
// byte for byte; wall times live in the JSON summary.
RunSummary run_experiment(const ExperimentConfig& config,
                          const std::filesystem::path& out_dir);

enum class SweepAxis { kMetaAtoms, kModulationOrder, kPrecoding };

SweepAxis parse_sweep_axis(const std::string& name);

struct SweepEntry {
  std::string axis;
  std::string value;
  RunSummary summary;
};

// One run_experiment per axis value under out_dir/<axis>_<value>, all
// sharing the master seed (and hence the child-seed schedule) for paired
// comparisons. Also writes a combined sweep.csv.
std::vector<SweepEntry> run_sweep(const ExperimentConfig& base, SweepAxis axis,
                                  const std::vector<std::string>& values,
                                  const std::filesystem::path& out_dir);

struct BenchRow {
  int meta_atoms = 0;
  int modulation_order = 0;
  int repeats = 0;
  double iteration_seconds = 0.0;  // mean wall time per outer iteration
  double precoder_seconds = 0.0;   // mean per iteration, by block
  double phase_tx_seconds = 0.0;
  double phase_rx_seconds = 0.0;
  double pair_sum_seconds = 0.0;  // isolated weight-accumulation kernel
  double layer_model = 0.0;       // L N^3 + K E^3 complex-multiply count
  double pair_model = 0.0;        // N_vec^2 N_s^2 complex-multiply count
};

// Times `repeats` optimizer iterations on one seeded realization and the
// isolated pair-sum kernel, reporting measured block times next to the
// complexity-model terms they should track.
BenchRow benchmark_iteration(const ExperimentConfig& config, int repeats);

// benchmark_iteration across meta-atom counts {25, 49, 100}.
std::vector<BenchRow> benchmark_scaling(const ExperimentConfig& base,
                                        int repeats);

// Collects every trace_r###.csv under in_dir (recursively), groups by
// directory, and writes long-format series (label, iteration, mean, std)
// for R0 and MI. Empty traces yield a header-only file.
void emit_plot_data(const std::filesystem::path& in_dir,
                    const std::filesystem::path& out_file);

}  // namespace simbeam
