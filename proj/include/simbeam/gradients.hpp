#pragma once

#include <armadillo>
#include <vector>

#include "simbeam/signaling.hpp"
#include "simbeam/wavefield.hpp"

namespace simbeam {

// Conjugate-Wirtinger gradients of the objective f at one design point.
// For real f of complex variables, a step x -> x - step * grad decreases f
// to first order; the finite-difference identity is
//   f(x + e*D) - f(x - e*D) = 4 e Re<grad, D> + O(e^3).
struct GradientBundle {
  arma::cx_mat grad_precoder;            // N_t x N_s
  std::vector<arma::cx_vec> grad_phi;    // L vectors of length N
  std::vector<arma::cx_vec> grad_psi;    // K vectors of length E
  arma::cx_mat weight_sum;               // N_s x N_s Hermitian PSD
};

// sum over ordered pairs of exp(-F_{i,j}/4 sigma^2) * dx_{i,j} dx_{i,j}^H.
// Diagonal pairs contribute zero. Hermitian PSD.
arma::cx_mat weighted_pair_sum(const arma::mat& f_matrix, double sigma2,
                               const DifferenceSet& diffs);

// Same accumulation from precomputed per-pair weights over the stored i<j
// list (each standing for two ordered pairs).
arma::cx_mat weighted_pair_sum(const arma::vec& pair_weights,
                               const DifferenceSet& diffs);

// diag(X * Y) without forming the product: requires X (m x n), Y (n x m).
arma::cx_vec diag_product(const arma::cx_mat& x, const arma::cx_mat& y);

// -(1/4 sigma^2) * H^H H P * weight_sum.
arma::cx_mat grad_precoder(const arma::cx_mat& h, const arma::cx_mat& p,
                           const arma::cx_mat& weight_sum, double sigma2);

// -(1/4 sigma^2) * diag(left * mid * right); shared core of the two
// phase-gradient assemblies.
arma::cx_vec phase_gradient(const arma::cx_mat& left, const arma::cx_mat& mid,
                            const arma::cx_mat& right, double sigma2);

// Gradient w.r.t. the transmit layer-l phase vector: the diagonal of
//   post^H * (Z G)^H * H P * weight_sum * P^H * pre^H
// where post collects layers above l and pre collects W^l and the layers
// below, scaled by -(1/4 sigma^2).
arma::cx_vec grad_phase_tx(int layer, const DesignPoint& point,
                           const PropagationSet& props,
                           const CascadeCache& cache,
                           const arma::cx_mat& weight_sum, double sigma2);

// Gradient w.r.t. the receive layer-k phase vector: the diagonal of
//   pre^H * H P * weight_sum * P^H * (G B)^H * post^H
// with pre = U^1 diag(psi^1) ... U^k and post the layers beyond k.
arma::cx_vec grad_phase_rx(int layer, const DesignPoint& point,
                           const PropagationSet& props,
                           const CascadeCache& cache,
                           const arma::cx_mat& weight_sum, double sigma2);

// All gradients at once from a fresh cascade cache and the full distance
// matrix.
GradientBundle compute_gradients(const DesignPoint& point,
                                 const PropagationSet& props,
                                 const CascadeCache& cache,
                                 const arma::mat& f_matrix,
                                 const DifferenceSet& diffs, double sigma2);

}  // namespace simbeam
