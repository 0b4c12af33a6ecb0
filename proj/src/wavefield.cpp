#include "simbeam/wavefield.hpp"

#include <stdexcept>

namespace simbeam {

arma::cx_mat scale_rows(const arma::cx_vec& phase, const arma::cx_mat& m) {
  if (phase.n_elem != m.n_rows)
    throw std::invalid_argument("scale_rows: phase length must match rows");
  return m.each_col() % phase;
}

arma::cx_mat transmit_cascade(const std::vector<arma::cx_vec>& phi,
                              const PropagationSet& props) {
  if (static_cast<int>(phi.size()) != props.tx_layers)
    throw std::invalid_argument("transmit cascade: expected one phase vector "
                                "per transmit layer");
  arma::cx_mat b = scale_rows(phi[0], props.w(1));
  for (int l = 2; l <= props.tx_layers; ++l)
    b = scale_rows(phi[l - 1], props.w(l) * b);
  return b;
}

arma::cx_mat receive_cascade(const std::vector<arma::cx_vec>& psi,
                             const PropagationSet& props) {
  if (static_cast<int>(psi.size()) != props.rx_layers)
    throw std::invalid_argument("receive cascade: expected one phase vector "
                                "per receive layer");
  // Build right to left: U^K diag(psi^K) first, then prepend layers.
  const int k_last = props.rx_layers;
  arma::cx_mat z = props.u(k_last) * arma::diagmat(psi[k_last - 1]);
  for (int k = k_last - 1; k >= 1; --k)
    z = props.u(k) * scale_rows(psi[k - 1], z);
  return z;
}

arma::cx_mat end_to_end(const arma::cx_mat& z, const arma::cx_mat& g,
                        const arma::cx_mat& b) {
  if (z.n_cols != g.n_rows || g.n_cols != b.n_rows)
    throw std::invalid_argument("end_to_end: nonconformal Z, G, B");
  return z * g * b;
}

arma::cx_mat theta_product(int m, int n, const std::vector<arma::cx_vec>& phi,
                           const PropagationSet& props) {
  const int layers = props.tx_layers;
  if (m < 1 || m > layers + 1 || n < 0 || n > layers)
    throw std::invalid_argument("theta_product: layer index out of range");
  if (m > n) {
    // Empty product: identity sized to the input side of layer m.
    const arma::uword dim =
        (m == 1) ? props.w(1).n_cols : props.w(m - 1).n_rows;
    return arma::cx_mat(arma::eye(dim, dim),
                        arma::mat(dim, dim, arma::fill::zeros));
  }
  arma::cx_mat out = props.w(m).t() * arma::diagmat(arma::conj(phi[m - 1]));
  for (int l = m + 1; l <= n; ++l)
    out = out * props.w(l).t() * arma::diagmat(arma::conj(phi[l - 1]));
  return out;
}

arma::cx_mat upsilon_product(int m, int n, const std::vector<arma::cx_vec>& psi,
                             const PropagationSet& props) {
  const int layers = props.rx_layers;
  if (m < 0 || m > layers || n < 1 || n > layers + 1)
    throw std::invalid_argument("upsilon_product: layer index out of range");
  if (m < n) {
    const arma::uword dim =
        (n == 1) ? props.u(1).n_rows : props.u(n - 1).n_cols;
    return arma::cx_mat(arma::eye(dim, dim),
                        arma::mat(dim, dim, arma::fill::zeros));
  }
  arma::cx_mat out =
      arma::diagmat(arma::conj(psi[m - 1])) * props.u(m).t();
  for (int k = m - 1; k >= n; --k)
    out = out * arma::diagmat(arma::conj(psi[k - 1])) * props.u(k).t();
  return out;
}

void CascadeCache::refresh(const DesignPoint& point,
                           const PropagationSet& props, const arma::cx_mat& g) {
  b = transmit_cascade(point.phi, props);
  z = receive_cascade(point.psi, props);
  zg = z * g;
  gb = g * b;
  h = zg * b;
}

}  // namespace simbeam
