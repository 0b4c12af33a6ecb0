#pragma once

#include <armadillo>

#include "simbeam/rng.hpp"
#include "simbeam/signaling.hpp"

namespace simbeam {

// Pairwise received-constellation distances F_{i,j} = ||H P (x_i - x_j)||^2
// as a full symmetric N_vec x N_vec matrix with zero diagonal.
arma::mat pairwise_distances(const arma::cx_mat& h, const arma::cx_mat& p,
                             const DifferenceSet& diffs);

// The cutoff-rate surrogate objective f = sum_{i,j} exp(-F_{i,j} / (4
// sigma^2)) over all ordered pairs, diagonal included. Terms span many
// orders of magnitude, so the sum is compensated.
double objective_f(const arma::mat& f_matrix, double sigma2);

// Cutoff rate in bits: -log2(f / N_vec^2). f outside [N_vec, N_vec^2]
// (beyond rounding slack) signals numerical corruption and is rejected.
double cutoff_rate(double f, int num_vectors);

// Internal fast path used by the optimizer: per-pair distances and weights
// for the deduplicated i<j pair list, plus the compensated f.
struct PairObjective {
  double f = 0.0;
  arma::vec pair_distances;  // F per stored pair
  arma::vec pair_weights;    // exp(-F / 4 sigma^2) per stored pair
};

// Evaluates f from T = H*P directly. f = N_vec + 2 * sum of pair weights.
PairObjective evaluate_pairs(const arma::cx_mat& t, const DifferenceSet& diffs,
                             double sigma2);

struct MiEstimate {
  double bits = 0.0;
  double stderr_ = 0.0;
  int noise_samples = 0;
};

// Monte-Carlo mutual information of the discrete-input channel y = H P x + n
// with equiprobable transmit vectors and CN(0, sigma2 I) noise:
//   MI = log2(N_vec) - (1/N_vec) sum_i E_n[ log2 sum_j exp(kappa_ij) ],
//   kappa_ij = (-||H P (x_i - x_j) + n||^2 + ||n||^2) / sigma2.
// The inner sum is log-sum-exp stabilized. The standard error is over the
// per-draw samples of the outer average. Reusing an identically seeded rng
// across design points gives common-random-numbers comparisons.
MiEstimate mutual_information_mc(const arma::cx_mat& h, const arma::cx_mat& p,
                                 const TransmitVectorSet& vectors,
                                 double sigma2, Rng& rng,
                                 int num_noise_samples);

}  // namespace simbeam
