#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "simbeam/apgm.hpp"
#include "simbeam/channel.hpp"
#include "simbeam/geometry.hpp"
#include "simbeam/signaling.hpp"

namespace simbeam {

// Fully resolved experiment description. Defaults reproduce the reference
// setup: 6 GHz carrier, 2x2 antennas with 2 streams, 4-layer SIMs of 49
// atoms at half-wavelength spacing, 300 m link, QPSK, -110 dB noise.
struct ExperimentConfig {
  SimGeometry geometry;
  PathLossModel path_loss;
  std::string correlation_model = "sinc";
  ConstellationKind constellation = ConstellationKind::kQam;
  int modulation_order = 4;
  int num_streams = 2;
  int vector_cap = 4096;
  double sigma2 = 1e-11;  // linear; configs give dB
  OptimizerConfig optimizer;
  int num_realizations = 30;
  std::uint64_t master_seed = 1;
  int mi_samples = 1000;  // 0 disables MI estimation
  int mi_every = 0;       // trace MI every k iterations; 0 = final only
  std::string output_dir = "out";

  void validate() const;
};

// Parses a flat sectioned key/value document ('[section]', 'key = value',
// '#' comments). Unknown sections or keys are rejected; every error names
// the offending section.key. Absent keys fall back to the reference-setup
// defaults; spacing and atom-area defaults derive from the resolved
// wavelength. 'frequency' may replace 'wavelength' (c = 2.998e8 m/s).
ExperimentConfig parse_config(const std::string& text);

ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace simbeam
