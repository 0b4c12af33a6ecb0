#include <doctest.h>

#include <vector>

#include "simbeam/wavefield.hpp"
#include "test_support.hpp"

using namespace simbeam;
using test_support::random_phase_vec;
using test_support::random_props;

namespace {

struct Instance {
  PropagationSet props;
  std::vector<arma::cx_vec> phi;
  std::vector<arma::cx_vec> psi;
  arma::cx_mat g;
};

Instance make_instance(std::uint64_t seed, int n = 6, int e = 5,
                       int tx_layers = 3, int rx_layers = 2) {
  Rng rng(seed);
  Instance inst;
  inst.props = random_props(rng, 2, 2, n, e, tx_layers, rx_layers);
  for (int l = 0; l < tx_layers; ++l)
    inst.phi.push_back(random_phase_vec(rng, n));
  for (int k = 0; k < rx_layers; ++k)
    inst.psi.push_back(random_phase_vec(rng, e));
  inst.g = rng.cnormal_mat(e, n) / std::sqrt(double(n));
  return inst;
}

double rel(const arma::cx_mat& a, const arma::cx_mat& b) {
  return arma::norm(a - b, "fro") / std::max(arma::norm(b, "fro"), 1e-300);
}

}  // namespace

TEST_CASE("scale_rows equals left-diagonal multiplication") {
  Rng rng(3);
  const arma::cx_mat m = rng.cnormal_mat(5, 3);
  const arma::cx_vec phase = random_phase_vec(rng, 5);
  CHECK(rel(scale_rows(phase, m), arma::diagmat(phase) * m) < 1e-14);
}

TEST_CASE("unit-modulus row scaling preserves the Frobenius norm") {
  Rng rng(5);
  const arma::cx_mat m = rng.cnormal_mat(7, 4);
  const arma::cx_vec phase = random_phase_vec(rng, 7);
  CHECK(arma::norm(scale_rows(phase, m), "fro") ==
        doctest::Approx(arma::norm(m, "fro")).epsilon(1e-13));
}

TEST_CASE("transmit cascade matches the dense layer product") {
  const Instance inst = make_instance(11);
  const arma::cx_mat b = transmit_cascade(inst.phi, inst.props);
  arma::cx_mat dense = arma::diagmat(inst.phi[0]) * inst.props.w(1);
  for (int l = 2; l <= inst.props.tx_layers; ++l)
    dense = arma::diagmat(inst.phi[l - 1]) * inst.props.w(l) * dense;
  CHECK(rel(b, dense) < 1e-13);
  CHECK(b.n_rows == 6);
  CHECK(b.n_cols == 2);
}

TEST_CASE("receive cascade matches the dense layer product") {
  const Instance inst = make_instance(13);
  const arma::cx_mat z = receive_cascade(inst.psi, inst.props);
  const arma::cx_mat expect = inst.props.u(1) * arma::diagmat(inst.psi[0]) *
                              inst.props.u(2) * arma::diagmat(inst.psi[1]);
  CHECK(rel(z, expect) < 1e-13);
  CHECK(z.n_rows == 2);
  CHECK(z.n_cols == 5);
}

TEST_CASE("end_to_end is the plain triple product") {
  const Instance inst = make_instance(17);
  const arma::cx_mat b = transmit_cascade(inst.phi, inst.props);
  const arma::cx_mat z = receive_cascade(inst.psi, inst.props);
  CHECK(rel(end_to_end(z, inst.g, b), z * inst.g * b) == 0.0);
}

TEST_CASE("full ascending partial equals the cascade adjoint") {
  const Instance inst = make_instance(19);
  const arma::cx_mat b = transmit_cascade(inst.phi, inst.props);
  const arma::cx_mat theta =
      theta_product(1, inst.props.tx_layers, inst.phi, inst.props);
  CHECK(rel(theta, b.t()) < 1e-13);
}

TEST_CASE("full descending partial equals the cascade adjoint") {
  const Instance inst = make_instance(23);
  const arma::cx_mat z = receive_cascade(inst.psi, inst.props);
  const arma::cx_mat upsilon =
      upsilon_product(inst.props.rx_layers, 1, inst.psi, inst.props);
  CHECK(rel(upsilon, z.t()) < 1e-13);
}

TEST_CASE("empty partial ranges give identities of the boundary size") {
  const Instance inst = make_instance(29);
  const int L = inst.props.tx_layers;
  const int K = inst.props.rx_layers;
  // below the first transmit layer: identity on the antenna side
  const arma::cx_mat t_lo = theta_product(1, 0, inst.phi, inst.props);
  CHECK(t_lo.n_rows == 2);
  CHECK(arma::norm(t_lo - arma::cx_mat(2, 2, arma::fill::eye), "fro") == 0.0);
  // above the last transmit layer: identity on the aperture side
  const arma::cx_mat t_hi = theta_product(L + 1, L, inst.phi, inst.props);
  CHECK(t_hi.n_rows == 6);
  CHECK(arma::norm(t_hi - arma::cx_mat(6, 6, arma::fill::eye), "fro") == 0.0);
  // below the first receive layer: identity on the antenna side
  const arma::cx_mat u_lo = upsilon_product(0, 1, inst.psi, inst.props);
  CHECK(u_lo.n_rows == 2);
  CHECK(arma::norm(u_lo - arma::cx_mat(2, 2, arma::fill::eye), "fro") == 0.0);
  // beyond the last receive layer: identity on the aperture side
  const arma::cx_mat u_hi = upsilon_product(K, K + 1, inst.psi, inst.props);
  CHECK(u_hi.n_rows == 5);
  CHECK(arma::norm(u_hi - arma::cx_mat(5, 5, arma::fill::eye), "fro") == 0.0);
}

TEST_CASE("single-layer partials match their dense form") {
  const Instance inst = make_instance(31);
  const arma::cx_mat t22 = theta_product(2, 2, inst.phi, inst.props);
  CHECK(rel(t22, inst.props.w(2).t() * arma::diagmat(arma::conj(inst.phi[1]))) <
        1e-13);
  const arma::cx_mat u22 = upsilon_product(2, 2, inst.psi, inst.props);
  CHECK(rel(u22, arma::diagmat(arma::conj(inst.psi[1])) *
                     inst.props.u(2).t()) < 1e-13);
}

TEST_CASE("partials split multiplicatively at any layer") {
  const Instance inst = make_instance(37);
  const int L = inst.props.tx_layers;
  const arma::cx_mat whole = theta_product(1, L, inst.phi, inst.props);
  for (int split = 1; split <= L; ++split) {
    const arma::cx_mat lower = theta_product(1, split - 1, inst.phi,
                                             inst.props);
    const arma::cx_mat upper = theta_product(split, L, inst.phi, inst.props);
    CHECK(rel(lower * upper, whole) < 1e-12);
  }
}

TEST_CASE("cascade cache holds consistent products") {
  const Instance inst = make_instance(41);
  DesignPoint pt;
  pt.precoder = arma::cx_mat(2, 2, arma::fill::eye);
  pt.phi = inst.phi;
  pt.psi = inst.psi;
  CascadeCache cache;
  cache.refresh(pt, inst.props, inst.g);
  const arma::cx_mat b = transmit_cascade(inst.phi, inst.props);
  const arma::cx_mat z = receive_cascade(inst.psi, inst.props);
  CHECK(rel(cache.b, b) == 0.0);
  CHECK(rel(cache.z, z) == 0.0);
  CHECK(rel(cache.zg, z * inst.g) < 1e-14);
  CHECK(rel(cache.gb, inst.g * b) < 1e-14);
  CHECK(rel(cache.h, z * inst.g * b) < 1e-14);
}
