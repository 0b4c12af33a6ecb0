#include "simbeam/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "simbeam/channel.hpp"
#include "simbeam/gradients.hpp"

namespace simbeam {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

// Dedicated noise sub-stream for MI estimation; reseeding it identically at
// every evaluation makes MI comparisons common-random-number paired.
constexpr std::uint64_t kMiStreamTag = 0x6D69;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::pair<double, double> mean_and_sample_std(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (static_cast<double>(v.size()) - 1.0))};
}

struct SharedProblem {
  PropagationSet props;
  CorrelationPair corr;
  double path_gain = 0.0;
  Constellation constellation;
  TransmitVectorSet vectors;
  DifferenceSet diffs;
};

SharedProblem build_shared(const ExperimentConfig& cfg) {
  cfg.validate();
  SharedProblem s;
  s.props = build_all_propagation(cfg.geometry);
  s.corr = build_correlation(cfg.geometry, cfg.correlation_model);
  const double loss_db = path_loss_db(cfg.path_loss, cfg.geometry.link_distance);
  s.path_gain = std::pow(10.0, -loss_db / 10.0);
  s.constellation =
      build_constellation(cfg.constellation, cfg.modulation_order);
  s.vectors =
      enumerate_vectors(s.constellation, cfg.num_streams, cfg.vector_cap);
  s.diffs = build_differences(s.vectors);
  return s;
}

MiEstimate estimate_mi(const ApgmOptimizer& opt, const SharedProblem& shared,
                       const ExperimentConfig& cfg, std::uint64_t child_seed) {
  Rng mi_rng(Rng::split(child_seed, kMiStreamTag));
  return mutual_information_mc(opt.cache().h, opt.point().precoder,
                               shared.vectors, cfg.sigma2, mi_rng,
                               cfg.mi_samples);
}

RealizationResult simulate_one(const ExperimentConfig& cfg,
                               const SharedProblem& shared, int index) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::uint64_t child = Rng::split(cfg.master_seed, index);
  Rng rng(child);
  const ChannelRealization chan =
      sample_channel(rng, child, shared.corr, shared.path_gain);
  DesignPoint initial = random_design_point(rng, shared.props, cfg.num_streams);
  if (!cfg.optimizer.optimize_precoder) {
    // Fixed identity baseline; the random P draw above is still consumed so
    // that paired variants see identical phase initializations.
    initial.precoder =
        identity_precoder(cfg.geometry.num_tx_antennas, cfg.num_streams);
  }
  const ProblemContext ctx{shared.props, chan.g, shared.diffs, cfg.sigma2};
  ApgmOptimizer opt(ctx, cfg.optimizer, std::move(initial));

  RealizationResult rr;
  rr.index = index;
  rr.seed = child;
  rr.initial_f = opt.objective();
  rr.initial_r0 = cutoff_rate(rr.initial_f, shared.diffs.num_vectors);
  while (!opt.done()) {
    IterationRecord rec = opt.step();
    if (cfg.mi_samples > 0 && cfg.mi_every > 0 &&
        rec.iteration % cfg.mi_every == 0) {
      rec.mi = estimate_mi(opt, shared, cfg, child);
      rec.has_mi = true;
    }
    rr.trace.push_back(std::move(rec));
  }
  rr.iterations = static_cast<int>(rr.trace.size());
  rr.final_f = opt.objective();
  rr.final_r0 = cutoff_rate(rr.final_f, shared.diffs.num_vectors);
  if (cfg.mi_samples > 0) {
    if (!rr.trace.empty() && rr.trace.back().has_mi) {
      rr.final_mi = rr.trace.back().mi;
    } else {
      rr.final_mi = estimate_mi(opt, shared, cfg, child);
      if (!rr.trace.empty()) {
        rr.trace.back().mi = rr.final_mi;
        rr.trace.back().has_mi = true;
      }
    }
    rr.has_final_mi = true;
  }
  rr.stall_events = opt.stall_events();
  rr.seconds = seconds_since(t0);
  return rr;
}

void write_trace_csv(const fs::path& out_dir, const RealizationResult& rr) {
  char name[32];
  std::snprintf(name, sizeof name, "trace_r%03d.csv", rr.index);
  const fs::path path = out_dir / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "iteration,f,r0,mi,mi_stderr,backtracks\n";
  for (const auto& rec : rr.trace) {
    out << rec.iteration << ',' << fmt_double(rec.f) << ','
        << fmt_double(rec.r0) << ',';
    if (rec.has_mi) out << fmt_double(rec.mi.bits);
    out << ',';
    if (rec.has_mi) out << fmt_double(rec.mi.stderr_);
    out << ',' << rec.backtracks_total() << '\n';
  }
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string kind_name(ConstellationKind kind) {
  return kind == ConstellationKind::kQam ? "qam" : "psk";
}

Json config_to_json(const ExperimentConfig& c) {
  Json j;
  j["geometry"] = {{"wavelength", c.geometry.wavelength},
                   {"num_tx_antennas", c.geometry.num_tx_antennas},
                   {"num_rx_antennas", c.geometry.num_rx_antennas},
                   {"atoms_per_tx_layer", c.geometry.atoms_per_tx_layer},
                   {"atoms_per_rx_layer", c.geometry.atoms_per_rx_layer},
                   {"tx_layers", c.geometry.tx_layers},
                   {"rx_layers", c.geometry.rx_layers},
                   {"layer_spacing", c.geometry.layer_spacing},
                   {"antenna_spacing", c.geometry.antenna_spacing},
                   {"atom_spacing", c.geometry.atom_spacing},
                   {"atom_area", c.geometry.atom_area},
                   {"link_distance", c.geometry.link_distance}};
  j["channel"] = {{"reference_distance", c.path_loss.reference_distance},
                  {"path_loss_exponent", c.path_loss.exponent},
                  {"correlation", c.correlation_model}};
  j["signaling"] = {{"constellation", kind_name(c.constellation)},
                    {"modulation_order", c.modulation_order},
                    {"num_streams", c.num_streams},
                    {"vector_cap", c.vector_cap}};
  j["noise"] = {{"sigma2", c.sigma2}};
  j["optimizer"] = {
      {"initial_step", c.optimizer.initial_step},
      {"shrink", c.optimizer.line_search.shrink},
      {"sufficient_decrease", c.optimizer.line_search.sufficient_decrease},
      {"growth", c.optimizer.line_search.growth},
      {"max_backtracks", c.optimizer.line_search.max_backtracks},
      {"tol", c.optimizer.tol},
      {"patience", c.optimizer.patience},
      {"max_iterations", c.optimizer.max_iterations}};
  j["run"] = {{"num_realizations", c.num_realizations},
              {"master_seed", c.master_seed},
              {"mi_samples", c.mi_samples},
              {"mi_every", c.mi_every},
              {"precoding_enabled", c.optimizer.optimize_precoder}};
  return j;
}

void finalize_summary(RunSummary& s) {
  std::vector<double> r0s, mis, iters;
  s.total_seconds = 0.0;
  for (const auto& rr : s.realizations) {
    r0s.push_back(rr.final_r0);
    if (rr.has_final_mi) mis.push_back(rr.final_mi.bits);
    iters.push_back(static_cast<double>(rr.iterations));
    s.total_seconds += rr.seconds;
  }
  std::tie(s.r0_mean, s.r0_std) = mean_and_sample_std(r0s);
  std::tie(s.mi_mean, s.mi_std) = mean_and_sample_std(mis);
  s.mean_iterations = mean_and_sample_std(iters).first;
}

void write_summary_json(const fs::path& path, const RunSummary& s) {
  Json j;
  j["schema_version"] = 1;
  j["config"] = config_to_json(s.config);
  j["aggregate"] = {{"r0_mean", s.r0_mean},
                    {"r0_std", s.r0_std},
                    {"mi_mean", s.mi_mean},
                    {"mi_std", s.mi_std},
                    {"mean_iterations", s.mean_iterations},
                    {"total_seconds", s.total_seconds}};
  Json reals = Json::array();
  for (const auto& rr : s.realizations) {
    Json r = {{"index", rr.index},
              {"seed", rr.seed},
              {"iterations", rr.iterations},
              {"initial_f", rr.initial_f},
              {"initial_r0", rr.initial_r0},
              {"final_f", rr.final_f},
              {"final_r0", rr.final_r0},
              {"stall_events", rr.stall_events},
              {"seconds", rr.seconds}};
    if (rr.has_final_mi) {
      r["final_mi"] = rr.final_mi.bits;
      r["final_mi_stderr"] = rr.final_mi.stderr_;
    }
    reals.push_back(std::move(r));
  }
  j["realizations"] = std::move(reals);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

RunSummary run_experiment(const ExperimentConfig& config,
                          const fs::path& out_dir) {
  const SharedProblem shared = build_shared(config);
  fs::create_directories(out_dir);
  RunSummary s;
  s.config = config;
  s.realizations.resize(config.num_realizations);
  std::string error;
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < config.num_realizations; ++r) {
    try {
      s.realizations[r] = simulate_one(config, shared, r);
    } catch (const std::exception& e) {
#pragma omp critical
      if (error.empty())
        error = "realization " + std::to_string(r) + ": " + e.what();
    }
  }
  if (!error.empty()) throw std::runtime_error(error);
  for (const auto& rr : s.realizations) write_trace_csv(out_dir, rr);
  finalize_summary(s);
  write_summary_json(out_dir / "summary.json", s);
  return s;
}

SweepAxis parse_sweep_axis(const std::string& name) {
  if (name == "meta_atoms") return SweepAxis::kMetaAtoms;
  if (name == "modulation_order") return SweepAxis::kModulationOrder;
  if (name == "precoding") return SweepAxis::kPrecoding;
  throw std::invalid_argument(
      "sweep: unknown axis '" + name +
      "' (expected meta_atoms, modulation_order, or precoding)");
}

namespace {

std::string axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kMetaAtoms:
      return "meta_atoms";
    case SweepAxis::kModulationOrder:
      return "modulation_order";
    case SweepAxis::kPrecoding:
      return "precoding";
  }
  throw std::logic_error("unreachable");
}

int parse_int_value(const std::string& raw) {
  std::size_t pos = 0;
  int out = 0;
  try {
    out = std::stoi(raw, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != raw.size() || raw.empty())
    throw std::invalid_argument("sweep: expected an integer value, got '" +
                                raw + "'");
  return out;
}

bool parse_on_off(const std::string& raw) {
  if (raw == "on" || raw == "true" || raw == "1") return true;
  if (raw == "off" || raw == "false" || raw == "0") return false;
  throw std::invalid_argument("sweep: expected on/off value, got '" + raw +
                              "'");
}

}  // namespace

std::vector<SweepEntry> run_sweep(const ExperimentConfig& base, SweepAxis axis,
                                  const std::vector<std::string>& values,
                                  const fs::path& out_dir) {
  if (values.empty()) throw std::invalid_argument("sweep: no values given");
  fs::create_directories(out_dir);
  std::vector<SweepEntry> entries;
  for (const std::string& v : values) {
    ExperimentConfig cfg = base;
    switch (axis) {
      case SweepAxis::kMetaAtoms: {
        const int n = parse_int_value(v);
        cfg.geometry.atoms_per_tx_layer = n;
        cfg.geometry.atoms_per_rx_layer = n;
        break;
      }
      case SweepAxis::kModulationOrder:
        cfg.modulation_order = parse_int_value(v);
        break;
      case SweepAxis::kPrecoding:
        cfg.optimizer.optimize_precoder = parse_on_off(v);
        break;
    }
    cfg.validate();
    SweepEntry entry;
    entry.axis = axis_name(axis);
    entry.value = v;
    entry.summary =
        run_experiment(cfg, out_dir / (entry.axis + "_" + v));
    entries.push_back(std::move(entry));
  }
  const fs::path table = out_dir / "sweep.csv";
  std::ofstream out(table, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + table.string());
  out << "axis,value,r0_mean,r0_std,mi_mean,mi_std,mean_iterations\n";
  for (const auto& e : entries) {
    out << e.axis << ',' << e.value << ',' << fmt_double(e.summary.r0_mean)
        << ',' << fmt_double(e.summary.r0_std) << ','
        << fmt_double(e.summary.mi_mean) << ',' << fmt_double(e.summary.mi_std)
        << ',' << fmt_double(e.summary.mean_iterations) << '\n';
  }
  return entries;
}

BenchRow benchmark_iteration(const ExperimentConfig& config, int repeats) {
  if (repeats < 1)
    throw std::invalid_argument("bench: repeats must be >= 1");
  ExperimentConfig cfg = config;
  cfg.optimizer.max_iterations = repeats;
  cfg.optimizer.tol = 0.0;  // run the full repeat budget
  const SharedProblem shared = build_shared(cfg);
  const std::uint64_t child = Rng::split(cfg.master_seed, 0);
  Rng rng(child);
  const ChannelRealization chan =
      sample_channel(rng, child, shared.corr, shared.path_gain);
  DesignPoint initial = random_design_point(rng, shared.props, cfg.num_streams);
  const ProblemContext ctx{shared.props, chan.g, shared.diffs, cfg.sigma2};
  ApgmOptimizer opt(ctx, cfg.optimizer, std::move(initial));

  BenchRow row;
  row.meta_atoms = cfg.geometry.atoms_per_tx_layer;
  row.modulation_order = cfg.modulation_order;
  row.repeats = repeats;
  const int tx_layers = cfg.geometry.tx_layers;
  const int rx_layers = cfg.geometry.rx_layers;
  while (!opt.done()) {
    const IterationRecord rec = opt.step();
    row.precoder_seconds += rec.block_seconds[0];
    for (int l = 1; l <= tx_layers; ++l)
      row.phase_tx_seconds += rec.block_seconds[l];
    for (int k = 1; k <= rx_layers; ++k)
      row.phase_rx_seconds += rec.block_seconds[tx_layers + k];
    for (double sec : rec.block_seconds) row.iteration_seconds += sec;
  }
  row.precoder_seconds /= repeats;
  row.phase_tx_seconds /= repeats;
  row.phase_rx_seconds /= repeats;
  row.iteration_seconds /= repeats;

  // Isolated pair-sum kernel, repeated until the measurement is long enough
  // to trust on a shared machine.
  arma::vec weights(shared.diffs.num_pairs());
  weights.fill(0.5);
  volatile double sink = 0.0;
  int reps = 0;
  const auto t0 = std::chrono::steady_clock::now();
  double elapsed = 0.0;
  do {
    for (int i = 0; i < 8; ++i) {
      const arma::cx_mat ws = weighted_pair_sum(weights, shared.diffs);
      sink = sink + ws(0, 0).real();
      ++reps;
    }
    elapsed = seconds_since(t0);
  } while (elapsed < 0.02 && reps < 100000);
  row.pair_sum_seconds = elapsed / reps;

  const double n = cfg.geometry.atoms_per_tx_layer;
  const double e = cfg.geometry.atoms_per_rx_layer;
  const double n_vec = std::pow(cfg.modulation_order, cfg.num_streams);
  row.layer_model = tx_layers * n * n * n + rx_layers * e * e * e;
  row.pair_model = n_vec * n_vec * cfg.num_streams * cfg.num_streams;
  return row;
}

std::vector<BenchRow> benchmark_scaling(const ExperimentConfig& base,
                                        int repeats) {
  std::vector<BenchRow> rows;
  for (int n : {25, 49, 100}) {
    ExperimentConfig cfg = base;
    cfg.geometry.atoms_per_tx_layer = n;
    cfg.geometry.atoms_per_rx_layer = n;
    rows.push_back(benchmark_iteration(cfg, repeats));
  }
  return rows;
}

namespace {

struct TraceRow {
  int iteration = 0;
  double f = 0.0;
  double r0 = 0.0;
  bool has_mi = false;
  double mi = 0.0;
};

std::vector<TraceRow> parse_trace_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("plot-data: cannot read " + path.string());
  std::vector<TraceRow> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (first) {
      first = false;
      continue;  // header
    }
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    while (fields.size() < 6) fields.emplace_back();
    TraceRow row;
    row.iteration = std::stoi(fields[0]);
    row.f = std::stod(fields[1]);
    row.r0 = std::stod(fields[2]);
    if (!fields[3].empty()) {
      row.has_mi = true;
      row.mi = std::stod(fields[3]);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

void emit_plot_data(const fs::path& in_dir, const fs::path& out_file) {
  if (!fs::exists(in_dir))
    throw std::runtime_error("plot-data: missing input directory " +
                             in_dir.string());
  std::map<std::string, std::vector<fs::path>> groups;
  for (const auto& entry : fs::recursive_directory_iterator(in_dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.rfind("trace_r", 0) == 0 && name.size() > 4 &&
        name.substr(name.size() - 4) == ".csv") {
      std::string rel =
          fs::relative(entry.path().parent_path(), in_dir).generic_string();
      if (rel == ".") rel = "";
      groups[rel].push_back(entry.path());
    }
  }
  std::ofstream out(out_file, std::ios::binary);
  if (!out)
    throw std::runtime_error("plot-data: cannot write " + out_file.string());
  out << "series,iteration,mean,std\n";
  for (auto& [rel, paths] : groups) {
    std::sort(paths.begin(), paths.end());
    std::vector<std::vector<TraceRow>> traces;
    std::size_t max_len = 0;
    for (const auto& p : paths) {
      traces.push_back(parse_trace_csv(p));
      max_len = std::max(max_len, traces.back().size());
    }
    const std::string prefix = rel.empty() ? "" : rel + "/";
    for (std::size_t it = 1; it <= max_len; ++it) {
      std::vector<double> vals;
      for (const auto& t : traces)
        if (t.size() >= it) vals.push_back(t[it - 1].r0);
      const auto [mean, sd] = mean_and_sample_std(vals);
      out << prefix << "r0," << it << ',' << fmt_double(mean) << ','
          << fmt_double(sd) << '\n';
    }
    for (std::size_t it = 1; it <= max_len; ++it) {
      std::vector<double> vals;
      for (const auto& t : traces)
        if (t.size() >= it && t[it - 1].has_mi) vals.push_back(t[it - 1].mi);
      if (vals.empty()) continue;
      const auto [mean, sd] = mean_and_sample_std(vals);
      out << prefix << "mi," << it << ',' << fmt_double(mean) << ','
          << fmt_double(sd) << '\n';
    }
  }
  out.flush();
  if (!out)
    throw std::runtime_error("plot-data: write failed for " +
                             out_file.string());
}

}  // namespace simbeam
