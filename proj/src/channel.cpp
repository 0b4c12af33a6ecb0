#include "simbeam/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace simbeam {

namespace {

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

}  // namespace

double path_loss_db(const PathLossModel& model, double distance) {
  if (model.reference_distance <= 0)
    throw std::invalid_argument("path loss: reference distance must be positive");
  if (model.exponent <= 0)
    throw std::invalid_argument("path loss: exponent must be positive");
  if (model.wavelength <= 0)
    throw std::invalid_argument("path loss: wavelength must be positive");
  if (distance < model.reference_distance)
    throw std::invalid_argument(
        "path loss: distance below reference distance (model not calibrated "
        "there)");
  const double ref_db = 20.0 * std::log10(4.0 * std::numbers::pi *
                                          model.reference_distance /
                                          model.wavelength);
  return ref_db + 10.0 * model.exponent *
                      std::log10(distance / model.reference_distance);
}

arma::cx_mat correlation_matrix(const LayerLayout& layout, double wavelength) {
  if (wavelength <= 0)
    throw std::invalid_argument("correlation: wavelength must be positive");
  const arma::uword n = layout.count();
  arma::mat r(n, n);
  for (arma::uword i = 0; i < n; ++i) {
    r(i, i) = 1.0;
    for (arma::uword j = i + 1; j < n; ++j) {
      const double d =
          arma::norm(layout.positions.row(i) - layout.positions.row(j), 2);
      const double v = sinc(2.0 * d / wavelength);
      r(i, j) = v;
      r(j, i) = v;
    }
  }
  return arma::cx_mat(r, arma::mat(n, n, arma::fill::zeros));
}

arma::cx_mat psd_sqrt(const arma::cx_mat& r) {
  if (r.n_rows != r.n_cols)
    throw std::invalid_argument("psd_sqrt: matrix must be square");
  const arma::cx_mat herm = 0.5 * (r + r.t());
  arma::vec eigval;
  arma::cx_mat eigvec;
  if (!arma::eig_sym(eigval, eigvec, herm))
    throw std::runtime_error("psd_sqrt: eigendecomposition failed");
  const double scale = std::max(eigval.max(), 1.0);
  if (eigval.min() < -1e-6 * scale)
    throw std::invalid_argument(
        "psd_sqrt: input is not PSD (eigenvalue below tolerance)");
  arma::vec clamped = arma::clamp(eigval, 0.0, arma::datum::inf);
  return eigvec * arma::diagmat(arma::sqrt(clamped)) * eigvec.t();
}

CorrelationPair build_correlation(const SimGeometry& geom,
                                  const std::string& model) {
  CorrelationPair out;
  const arma::uword n = geom.atoms_per_tx_layer;
  const arma::uword e = geom.atoms_per_rx_layer;
  if (model == "identity") {
    out.r_tx = arma::cx_mat(arma::eye(n, n), arma::mat(n, n, arma::fill::zeros));
    out.r_rx = arma::cx_mat(arma::eye(e, e), arma::mat(e, e, arma::fill::zeros));
    out.sqrt_r_tx = out.r_tx;
    out.sqrt_r_rx = out.r_rx;
    return out;
  }
  if (model != "sinc")
    throw std::invalid_argument("correlation: unknown model '" + model +
                                "' (expected sinc or identity)");
  // All layers of one SIM share the same grid, so the correlation of layer 1
  // stands for every layer.
  out.r_tx = correlation_matrix(tx_layer_layout(geom, 1), geom.wavelength);
  out.r_rx = correlation_matrix(rx_layer_layout(geom, 1), geom.wavelength);
  out.sqrt_r_tx = psd_sqrt(out.r_tx);
  out.sqrt_r_rx = psd_sqrt(out.r_rx);
  return out;
}

ChannelRealization sample_channel(Rng& rng, std::uint64_t seed,
                                  const CorrelationPair& corr,
                                  double path_gain_linear) {
  if (path_gain_linear <= 0)
    throw std::invalid_argument("channel: path gain must be positive");
  const arma::uword e = corr.r_rx.n_rows;
  const arma::uword n = corr.r_tx.n_rows;
  ChannelRealization out;
  out.path_gain_linear = path_gain_linear;
  out.seed = seed;
  const arma::cx_mat gbar =
      std::sqrt(path_gain_linear) * rng.cnormal_mat(e, n);
  out.g = corr.sqrt_r_rx * gbar * corr.sqrt_r_tx;
  return out;
}

}  // namespace simbeam
