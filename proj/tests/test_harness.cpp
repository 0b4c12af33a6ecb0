#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "simbeam/config.hpp"
#include "simbeam/experiment.hpp"

using namespace simbeam;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(bool(in));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::istringstream in(read_file(p));
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

// Fresh scratch directory under the system temp root.
fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "simbeam_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Small fast configuration used by the harness tests.
ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  cfg.geometry.atoms_per_tx_layer = 4;
  cfg.geometry.atoms_per_rx_layer = 4;
  cfg.geometry.tx_layers = 2;
  cfg.geometry.rx_layers = 2;
  cfg.geometry.link_distance = 20.0;
  cfg.sigma2 = 1e-10;
  cfg.num_realizations = 2;
  cfg.master_seed = 5;
  cfg.optimizer.tol = 0.0;
  cfg.optimizer.max_iterations = 4;
  cfg.mi_samples = 20;
  cfg.mi_every = 0;
  return cfg;
}

int count_mi_rows(const fs::path& trace) {
  int n = 0;
  const std::vector<std::string> lines = read_lines(trace);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    // field 4 (0-based 3) is the MI estimate
    std::istringstream row(lines[i]);
    std::string field;
    for (int f = 0; f <= 3; ++f) std::getline(row, field, ',');
    if (!field.empty()) ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("config: defaults reproduce the reference setup") {
  const ExperimentConfig cfg = parse_config("");
  CHECK(cfg.geometry.wavelength == 0.05);
  CHECK(cfg.geometry.atoms_per_tx_layer == 49);
  CHECK(cfg.geometry.tx_layers == 4);
  CHECK(cfg.geometry.layer_spacing == 0.025);
  CHECK(cfg.geometry.atom_area == doctest::Approx(0.000625).epsilon(1e-15));
  CHECK(cfg.geometry.link_distance == 300.0);
  CHECK(cfg.path_loss.exponent == 3.5);
  CHECK(cfg.correlation_model == "sinc");
  CHECK(cfg.constellation == ConstellationKind::kQam);
  CHECK(cfg.modulation_order == 4);
  CHECK(cfg.num_streams == 2);
  CHECK(cfg.sigma2 == doctest::Approx(1e-11).epsilon(1e-12));
  CHECK(cfg.optimizer.initial_step == 1000.0);
  CHECK(cfg.optimizer.line_search.shrink == 0.5);
  CHECK(cfg.optimizer.line_search.sufficient_decrease == 1e-3);
  CHECK(cfg.optimizer.max_iterations == 200);
  CHECK(cfg.optimizer.optimize_precoder);
  CHECK(cfg.num_realizations == 30);
  CHECK(cfg.master_seed == 1);
  CHECK(cfg.mi_samples == 1000);
}

TEST_CASE("config: values, comments, and unit conversions") {
  const ExperimentConfig cfg = parse_config(
      "# leading comment\n"
      "[geometry]\n"
      "frequency = 5.996e9   ; 5 cm carrier\n"
      "atoms_per_tx_layer = 9\n"
      "atoms_per_rx_layer = 9\n"
      "tx_layers = 2\n"
      "rx_layers = 2\n"
      "link_distance = 25\n"
      "\n"
      "[noise]\n"
      "sigma2_db = -90\n"
      "[signaling]\n"
      "constellation = psk\n"
      "modulation_order = 2\n"
      "[run]\n"
      "precoding_enabled = off\n"
      "master_seed = 1234567890123\n");
  CHECK(cfg.geometry.wavelength == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(cfg.geometry.atom_spacing == doctest::Approx(0.025).epsilon(1e-12));
  CHECK(cfg.sigma2 == doctest::Approx(1e-9).epsilon(1e-12));
  CHECK(cfg.constellation == ConstellationKind::kPsk);
  CHECK_FALSE(cfg.optimizer.optimize_precoder);
  CHECK(cfg.master_seed == 1234567890123ULL);
}

TEST_CASE("config: malformed documents are rejected with context") {
  CHECK_THROWS_AS(parse_config("[geometry]\nwavelength = 0.05\nfrequency = 6e9\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_config("[geometry]\natoms_per_tx_layer = 50\n"),
                  std::invalid_argument);  // not a perfect square
  CHECK_THROWS_AS(parse_config("[geometry]\nwavelenght = 0.05\n"),
                  std::invalid_argument);  // unknown key
  CHECK_THROWS_AS(parse_config("[optimizer]\nshrink = fast\n"),
                  std::invalid_argument);  // type mismatch
  CHECK_THROWS_AS(parse_config("wavelength = 0.05\n"),
                  std::invalid_argument);  // key outside a section
  CHECK_THROWS_AS(parse_config("[geometry\nwavelength = 0.05\n"),
                  std::invalid_argument);  // malformed header
  CHECK_THROWS_AS(parse_config("[optimizer]\nshrink = 1.5\n"),
                  std::invalid_argument);  // constraint violation
  CHECK_THROWS_AS(parse_config("[run]\nnum_realizations = 0\n"),
                  std::invalid_argument);

  // error text names the offending key
  try {
    parse_config("[geometry]\nbogus_key = 1\n");
    CHECK(false);
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("geometry.bogus_key") !=
          std::string::npos);
  }
}

TEST_CASE("config: loading from disk") {
  const fs::path dir = scratch_dir("config_load");
  const fs::path file = dir / "exp.ini";
  std::ofstream(file) << "[run]\nmaster_seed = 77\n";
  CHECK(load_config(file).master_seed == 77);
  CHECK_THROWS_AS(load_config(dir / "missing.ini"), std::runtime_error);
}

TEST_CASE("experiment: outputs are deterministic byte for byte") {
  const ExperimentConfig cfg = tiny_config();
  const fs::path dir_a = scratch_dir("run_a");
  const fs::path dir_b = scratch_dir("run_b");
  const RunSummary a = run_experiment(cfg, dir_a);
  const RunSummary b = run_experiment(cfg, dir_b);
  REQUIRE(fs::exists(dir_a / "trace_r000.csv"));
  REQUIRE(fs::exists(dir_a / "trace_r001.csv"));
  REQUIRE(fs::exists(dir_a / "summary.json"));
  for (const char* name : {"trace_r000.csv", "trace_r001.csv"})
    CHECK(read_file(dir_a / name) == read_file(dir_b / name));
  CHECK(a.r0_mean == b.r0_mean);
  CHECK(a.mi_mean == b.mi_mean);

  // trace shape: header + one row per iteration
  const std::vector<std::string> lines = read_lines(dir_a / "trace_r000.csv");
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == "iteration,f,r0,mi,mi_stderr,backtracks");
  CHECK(lines[1].substr(0, 2) == "1,");
}

TEST_CASE("experiment: aggregates are the arithmetic mean of finals") {
  const ExperimentConfig cfg = tiny_config();
  const fs::path dir = scratch_dir("run_agg");
  const RunSummary s = run_experiment(cfg, dir);
  REQUIRE(s.realizations.size() == 2);
  const double mean =
      (s.realizations[0].final_r0 + s.realizations[1].final_r0) / 2.0;
  CHECK(std::abs(s.r0_mean - mean) < 1e-12);
  double lo = std::min(s.realizations[0].final_r0, s.realizations[1].final_r0);
  double hi = std::max(s.realizations[0].final_r0, s.realizations[1].final_r0);
  CHECK(s.r0_mean >= lo);
  CHECK(s.r0_mean <= hi);
  // distinct channels: the two realizations genuinely differ
  CHECK(s.realizations[0].seed != s.realizations[1].seed);
  CHECK(s.realizations[0].final_f != s.realizations[1].final_f);
  // every realization improved or held its objective
  for (const auto& rr : s.realizations) CHECK(rr.final_f <= rr.initial_f);
}

TEST_CASE("experiment: zero-iteration run reports the initial point") {
  ExperimentConfig cfg = tiny_config();
  cfg.num_realizations = 1;
  cfg.optimizer.max_iterations = 0;
  cfg.mi_samples = 0;
  const fs::path dir = scratch_dir("run_zero");
  const RunSummary s = run_experiment(cfg, dir);
  REQUIRE(s.realizations.size() == 1);
  CHECK(s.realizations[0].iterations == 0);
  CHECK(s.realizations[0].final_f == s.realizations[0].initial_f);
  CHECK(s.realizations[0].final_r0 == s.realizations[0].initial_r0);
  CHECK_FALSE(s.realizations[0].has_final_mi);
  CHECK(s.r0_mean == s.realizations[0].initial_r0);
  const std::vector<std::string> lines = read_lines(dir / "trace_r000.csv");
  CHECK(lines.size() == 1);  // header only
}

TEST_CASE("experiment: MI scheduling in the trace") {
  ExperimentConfig cfg = tiny_config();
  cfg.mi_every = 2;  // iterations 2 and 4 of 4
  const fs::path dir = scratch_dir("run_mi");
  run_experiment(cfg, dir);
  CHECK(count_mi_rows(dir / "trace_r000.csv") == 2);

  // final-only default: exactly one MI row, on the last iteration
  ExperimentConfig final_only = tiny_config();
  const fs::path dir2 = scratch_dir("run_mi_final");
  run_experiment(final_only, dir2);
  CHECK(count_mi_rows(dir2 / "trace_r000.csv") == 1);
  const std::vector<std::string> lines = read_lines(dir2 / "trace_r000.csv");
  std::istringstream last(lines.back());
  std::string field;
  std::getline(last, field, ',');
  CHECK(field == "4");
}

TEST_CASE("sweep: paired seeds across variants and a combined table") {
  const ExperimentConfig cfg = tiny_config();
  const fs::path dir = scratch_dir("sweep_precoding");
  const std::vector<SweepEntry> entries =
      run_sweep(cfg, SweepAxis::kPrecoding, {"on", "off"}, dir);
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].axis == "precoding");
  CHECK(entries[0].value == "on");
  // paired: realization r sees the same channel seed in both variants
  for (int r = 0; r < 2; ++r)
    CHECK(entries[0].summary.realizations[r].seed ==
          entries[1].summary.realizations[r].seed);
  REQUIRE(fs::exists(dir / "precoding_on" / "trace_r000.csv"));
  REQUIRE(fs::exists(dir / "precoding_off" / "trace_r001.csv"));
  const std::vector<std::string> table = read_lines(dir / "sweep.csv");
  REQUIRE(table.size() == 3);
  CHECK(table[0] == "axis,value,r0_mean,r0_std,mi_mean,mi_std,mean_iterations");
  CHECK(table[1].substr(0, 13) == "precoding,on,");
  CHECK(table[2].substr(0, 14) == "precoding,off,");
}

TEST_CASE("sweep: meta-atom axis resizes both apertures") {
  ExperimentConfig cfg = tiny_config();
  cfg.optimizer.max_iterations = 2;
  cfg.mi_samples = 0;
  const fs::path dir = scratch_dir("sweep_atoms");
  const std::vector<SweepEntry> entries =
      run_sweep(cfg, SweepAxis::kMetaAtoms, {"4", "9"}, dir);
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].summary.config.geometry.atoms_per_tx_layer == 4);
  CHECK(entries[1].summary.config.geometry.atoms_per_rx_layer == 9);
  CHECK(entries[0].summary.r0_mean != entries[1].summary.r0_mean);
}

TEST_CASE("sweep: axis parsing and invalid values") {
  CHECK(parse_sweep_axis("meta_atoms") == SweepAxis::kMetaAtoms);
  CHECK(parse_sweep_axis("modulation_order") == SweepAxis::kModulationOrder);
  CHECK(parse_sweep_axis("precoding") == SweepAxis::kPrecoding);
  CHECK_THROWS_AS(parse_sweep_axis("bogus"), std::invalid_argument);

  const ExperimentConfig cfg = tiny_config();
  const fs::path dir = scratch_dir("sweep_bad");
  CHECK_THROWS_AS(run_sweep(cfg, SweepAxis::kMetaAtoms, {}, dir),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_sweep(cfg, SweepAxis::kMetaAtoms, {"x"}, dir),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_sweep(cfg, SweepAxis::kMetaAtoms, {"50"}, dir),
                  std::invalid_argument);  // not a perfect square
  CHECK_THROWS_AS(run_sweep(cfg, SweepAxis::kPrecoding, {"maybe"}, dir),
                  std::invalid_argument);
}

TEST_CASE("plot data: series per group with means over realizations") {
  const ExperimentConfig cfg = tiny_config();
  const fs::path dir = scratch_dir("plot_run");
  run_experiment(cfg, dir);
  const fs::path out = dir / "plot.csv";
  emit_plot_data(dir, out);
  const std::vector<std::string> lines = read_lines(out);
  REQUIRE(lines.size() >= 2);
  CHECK(lines[0] == "series,iteration,mean,std");
  int r0_rows = 0, mi_rows = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].substr(0, 3) == "r0,") ++r0_rows;
    if (lines[i].substr(0, 3) == "mi,") ++mi_rows;
  }
  CHECK(r0_rows == 4);  // one per iteration
  CHECK(mi_rows == 1);  // final-only MI

  // grouped traces from a sweep get label prefixes
  const fs::path sdir = scratch_dir("plot_sweep");
  run_sweep(cfg, SweepAxis::kPrecoding, {"on", "off"}, sdir);
  emit_plot_data(sdir, sdir / "plot.csv");
  const std::string text = read_file(sdir / "plot.csv");
  CHECK(text.find("precoding_on/r0,") != std::string::npos);
  CHECK(text.find("precoding_off/mi,") != std::string::npos);
}

TEST_CASE("plot data: degenerate inputs") {
  CHECK_THROWS_AS(
      emit_plot_data(fs::temp_directory_path() / "simbeam_tests" / "absent",
                     fs::temp_directory_path() / "x.csv"),
      std::runtime_error);
  const fs::path dir = scratch_dir("plot_empty");
  const fs::path out = dir / "plot.csv";
  emit_plot_data(dir, out);
  const std::vector<std::string> lines = read_lines(out);
  REQUIRE(lines.size() == 1);  // header only
  CHECK(lines[0] == "series,iteration,mean,std");
}

TEST_CASE("bench: block breakdown and cost models") {
  ExperimentConfig cfg = tiny_config();
  cfg.mi_samples = 0;
  const BenchRow row = benchmark_iteration(cfg, 2);
  CHECK(row.meta_atoms == 4);
  CHECK(row.modulation_order == 4);
  CHECK(row.repeats == 2);
  CHECK(row.iteration_seconds > 0.0);
  CHECK(row.precoder_seconds > 0.0);
  CHECK(row.phase_tx_seconds > 0.0);
  CHECK(row.phase_rx_seconds > 0.0);
  CHECK(row.pair_sum_seconds > 0.0);
  // analytic models: L N^3 + K E^3 and N_vec^2 N_s^2
  CHECK(row.layer_model == 2.0 * 64 + 2.0 * 64);
  CHECK(row.pair_model == 256.0 * 4.0);
  CHECK_THROWS_AS(benchmark_iteration(cfg, 0), std::invalid_argument);
}

TEST_CASE("bench: pair-sum cost grows with the alphabet") {
  // N_vec^2 grows 256x when M goes 4 -> 16 at two streams; the measured
  // kernel should clearly reflect the quadratic model once the work
  // dominates per-call overhead.
  ExperimentConfig small = tiny_config();
  small.mi_samples = 0;
  ExperimentConfig large = small;
  large.modulation_order = 16;
  large.vector_cap = 70000;
  const BenchRow a = benchmark_iteration(small, 1);
  const BenchRow b = benchmark_iteration(large, 1);
  CHECK(b.pair_model == doctest::Approx(256.0 * a.pair_model));
  CHECK(b.pair_sum_seconds / a.pair_sum_seconds > 8.0);
}
