#include "simbeam/gradients.hpp"

#include <cmath>
#include <stdexcept>

namespace simbeam {

arma::cx_mat weighted_pair_sum(const arma::mat& f_matrix, double sigma2,
                               const DifferenceSet& diffs) {
  if (sigma2 <= 0)
    throw std::invalid_argument("weighted_pair_sum: sigma2 must be positive");
  arma::vec weights(diffs.num_pairs());
  for (int p = 0; p < diffs.num_pairs(); ++p) {
    const auto [i, j] = diffs.pairs[p];
    weights(p) = std::exp(-f_matrix(i, j) / (4.0 * sigma2));
  }
  return weighted_pair_sum(weights, diffs);
}

arma::cx_mat weighted_pair_sum(const arma::vec& pair_weights,
                               const DifferenceSet& diffs) {
  if (static_cast<int>(pair_weights.n_elem) != diffs.num_pairs())
    throw std::invalid_argument("weighted_pair_sum: weight count mismatch");
  arma::cx_mat scaled = diffs.deltas;
  for (int p = 0; p < diffs.num_pairs(); ++p) scaled.col(p) *= pair_weights(p);
  // Stored pairs are i<j; the (j,i) twins contribute the same outer product.
  return 2.0 * (scaled * diffs.deltas.t());
}

arma::cx_vec diag_product(const arma::cx_mat& x, const arma::cx_mat& y) {
  if (x.n_cols != y.n_rows || x.n_rows != y.n_cols)
    throw std::invalid_argument("diag_product: nonconformal factors");
  return arma::sum(x % y.st(), 1);
}

arma::cx_mat grad_precoder(const arma::cx_mat& h, const arma::cx_mat& p,
                           const arma::cx_mat& weight_sum, double sigma2) {
  return (-1.0 / (4.0 * sigma2)) * (h.t() * (h * (p * weight_sum)));
}

arma::cx_vec phase_gradient(const arma::cx_mat& left, const arma::cx_mat& mid,
                            const arma::cx_mat& right, double sigma2) {
  return (-1.0 / (4.0 * sigma2)) * diag_product(left, mid * right);
}

arma::cx_vec grad_phase_tx(int layer, const DesignPoint& point,
                           const PropagationSet& props,
                           const CascadeCache& cache,
                           const arma::cx_mat& weight_sum, double sigma2) {
  if (layer < 1 || layer > props.tx_layers)
    throw std::invalid_argument("grad_phase_tx: layer out of range");
  const arma::cx_mat post_h =
      theta_product(layer + 1, props.tx_layers, point.phi, props);
  const arma::cx_mat pre_h =
      theta_product(1, layer - 1, point.phi, props) * props.w(layer).t();
  const arma::cx_mat core =
      cache.h * (point.precoder * weight_sum) * point.precoder.t();
  return phase_gradient(post_h, cache.zg.t() * core, pre_h, sigma2);
}

arma::cx_vec grad_phase_rx(int layer, const DesignPoint& point,
                           const PropagationSet& props,
                           const CascadeCache& cache,
                           const arma::cx_mat& weight_sum, double sigma2) {
  if (layer < 1 || layer > props.rx_layers)
    throw std::invalid_argument("grad_phase_rx: layer out of range");
  // pre = U^1 diag(psi^1) ... U^layer (freshest layers below `layer`).
  arma::cx_mat pre = props.u(1);
  for (int m = 2; m <= layer; ++m)
    pre = pre * arma::diagmat(point.psi[m - 2]) * props.u(m);
  const arma::cx_mat post_h =
      upsilon_product(props.rx_layers, layer + 1, point.psi, props);
  const arma::cx_mat core =
      cache.h * (point.precoder * weight_sum) * point.precoder.t();
  return phase_gradient(pre.t(), core * cache.gb.t(), post_h, sigma2);
}

GradientBundle compute_gradients(const DesignPoint& point,
                                 const PropagationSet& props,
                                 const CascadeCache& cache,
                                 const arma::mat& f_matrix,
                                 const DifferenceSet& diffs, double sigma2) {
  GradientBundle out;
  out.weight_sum = weighted_pair_sum(f_matrix, sigma2, diffs);
  out.grad_precoder =
      grad_precoder(cache.h, point.precoder, out.weight_sum, sigma2);
  out.grad_phi.resize(props.tx_layers);
  for (int l = 1; l <= props.tx_layers; ++l)
    out.grad_phi[l - 1] =
        grad_phase_tx(l, point, props, cache, out.weight_sum, sigma2);
  out.grad_psi.resize(props.rx_layers);
  for (int k = 1; k <= props.rx_layers; ++k)
    out.grad_psi[k - 1] =
        grad_phase_rx(k, point, props, cache, out.weight_sum, sigma2);
  return out;
}

}  // namespace simbeam
