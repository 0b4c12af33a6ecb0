#pragma once

#include <armadillo>
#include <vector>

#include "simbeam/geometry.hpp"

namespace simbeam {

// The optimization variables of one iterate: digital precoder plus the
// per-layer metasurface phase vectors of both SIMs.
struct DesignPoint {
  arma::cx_mat precoder;            // N_t x N_s, tr(P P^H) = N_s
  std::vector<arma::cx_vec> phi;    // L vectors of N unit-modulus phases
  std::vector<arma::cx_vec> psi;    // K vectors of E unit-modulus phases
};

// Applies diag(phase) from the left: scales row n of m by phase(n).
arma::cx_mat scale_rows(const arma::cx_vec& phase, const arma::cx_mat& m);

// B = diag(phi^L) W^L ... diag(phi^1) W^1, evaluated as row scalings.
arma::cx_mat transmit_cascade(const std::vector<arma::cx_vec>& phi,
                              const PropagationSet& props);

// Z = U^1 diag(psi^1) U^2 diag(psi^2) ... U^K diag(psi^K).
arma::cx_mat receive_cascade(const std::vector<arma::cx_vec>& psi,
                             const PropagationSet& props);

// H = Z G B.
arma::cx_mat end_to_end(const arma::cx_mat& z, const arma::cx_mat& g,
                        const arma::cx_mat& b);

// Partial transmit cascade (W^m)^H (diag phi^m)^H ... (W^n)^H (diag phi^n)^H
// with ascending layer index left to right; m > n gives the identity of the
// size matching the layer-m input side. theta_product(1, L) = B^H.
arma::cx_mat theta_product(int m, int n, const std::vector<arma::cx_vec>& phi,
                           const PropagationSet& props);

// Partial receive cascade (diag psi^m)^H (U^m)^H ... (diag psi^n)^H (U^n)^H
// with descending layer index from m down to n; m < n gives the identity.
// upsilon_product(K, 1) = Z^H.
arma::cx_mat upsilon_product(int m, int n, const std::vector<arma::cx_vec>& psi,
                             const PropagationSet& props);

// Cascade products for one design point. Owned and refreshed by whoever
// mutates the design point; the optimizer is the single writer.
struct CascadeCache {
  arma::cx_mat b;   // N x N_t
  arma::cx_mat z;   // N_r x E
  arma::cx_mat zg;  // Z * G, N_r x N
  arma::cx_mat gb;  // G * B, E x N_t
  arma::cx_mat h;   // Z * G * B, N_r x N_t

  void refresh(const DesignPoint& point, const PropagationSet& props,
               const arma::cx_mat& g);
};

}  // namespace simbeam
