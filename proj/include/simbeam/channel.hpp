#pragma once

#include <armadillo>
#include <cstdint>
#include <string>

#include "simbeam/geometry.hpp"
#include "simbeam/rng.hpp"

namespace simbeam {

// Distance-dependent path loss: beta(d) = beta(d0) + 10 b log10(d/d0) in dB,
// where beta(d0) is the free-space loss at the reference distance.
struct PathLossModel {
  double reference_distance = 1.0;  // d0, meters
  double exponent = 3.5;            // b
  double wavelength = 0.05;
};

// Spatial correlation of the two SIM apertures with the PSD square roots
// needed to color an iid draw.
struct CorrelationPair {
  arma::cx_mat r_tx;       // N x N, unit diagonal, Hermitian PSD
  arma::cx_mat r_rx;       // E x E
  arma::cx_mat sqrt_r_tx;  // PSD square roots
  arma::cx_mat sqrt_r_rx;
};

// One sampled inter-SIM channel G (E x N) with its parentage.
struct ChannelRealization {
  arma::cx_mat g;
  double path_gain_linear = 0.0;
  std::uint64_t seed = 0;
};

// Attenuation in dB at distance d; rejects d below the reference distance.
double path_loss_db(const PathLossModel& model, double distance);

// Isotropic-scattering aperture correlation: entry (m,n) = sinc(2 d_mn /
// wavelength) with sinc(x) = sin(pi x)/(pi x). Real symmetric, unit diagonal.
arma::cx_mat correlation_matrix(const LayerLayout& layout, double wavelength);

// Hermitian PSD square root via eigendecomposition. Eigenvalues below zero
// are clamped; values below -1e-6 relative to the largest eigenvalue mean
// the input is not PSD and are rejected.
arma::cx_mat psd_sqrt(const arma::cx_mat& r);

// Correlation pair for both SIM apertures, or identity matrices when
// `model` is "identity". Supported models: "sinc", "identity".
CorrelationPair build_correlation(const SimGeometry& geom,
                                  const std::string& model);

// Draws G = R_rx^{1/2} * Gbar * R_tx^{1/2} where Gbar has iid CN(0, beta)
// entries, beta = path_gain_linear. The rng's seed is recorded by the caller.
ChannelRealization sample_channel(Rng& rng, std::uint64_t seed,
                                  const CorrelationPair& corr,
                                  double path_gain_linear);

}  // namespace simbeam
