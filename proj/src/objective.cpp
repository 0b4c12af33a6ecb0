#include "simbeam/objective.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace simbeam {

namespace {

// Neumaier compensated summation; weight terms span many orders of
// magnitude once the optimizer separates the constellation.
double compensated_sum(const arma::vec& v) {
  double sum = 0.0;
  double comp = 0.0;
  for (arma::uword i = 0; i < v.n_elem; ++i) {
    const double x = v(i);
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  return sum + comp;
}

arma::vec column_squared_norms(const arma::cx_mat& m) {
  return arma::sum(arma::real(m % arma::conj(m)), 0).t();
}

}  // namespace

arma::mat pairwise_distances(const arma::cx_mat& h, const arma::cx_mat& p,
                             const DifferenceSet& diffs) {
  if (h.n_cols != p.n_rows || static_cast<int>(p.n_cols) != diffs.num_streams)
    throw std::invalid_argument("pairwise_distances: nonconformal H, P");
  const arma::cx_mat t = h * p;
  const arma::vec fp = column_squared_norms(t * diffs.deltas);
  arma::mat f(diffs.num_vectors, diffs.num_vectors, arma::fill::zeros);
  for (int pidx = 0; pidx < diffs.num_pairs(); ++pidx) {
    const auto [i, j] = diffs.pairs[pidx];
    f(i, j) = fp(pidx);
    f(j, i) = fp(pidx);
  }
  return f;
}

double objective_f(const arma::mat& f_matrix, double sigma2) {
  if (sigma2 <= 0)
    throw std::invalid_argument("objective: sigma2 must be positive");
  const arma::uword n = f_matrix.n_rows;
  if (f_matrix.n_cols != n)
    throw std::invalid_argument("objective: F must be square");
  arma::vec terms(n * (n - 1));
  arma::uword k = 0;
  for (arma::uword j = 0; j < n; ++j)
    for (arma::uword i = 0; i < n; ++i)
      if (i != j) terms(k++) = std::exp(-f_matrix(i, j) / (4.0 * sigma2));
  // Diagonal contributes exp(0) = 1 per vector, added analytically.
  return static_cast<double>(n) + compensated_sum(terms);
}

double cutoff_rate(double f, int num_vectors) {
  if (num_vectors < 1)
    throw std::invalid_argument("cutoff_rate: num_vectors must be >= 1");
  const double lo = static_cast<double>(num_vectors);
  const double hi = lo * lo;
  if (!std::isfinite(f) || f < lo * (1.0 - 1e-12) || f > hi * (1.0 + 1e-12))
    throw std::invalid_argument(
        "cutoff_rate: f outside [N_vec, N_vec^2], numerical corruption");
  const double clamped = std::min(std::max(f, lo), hi);
  return -std::log2(clamped / hi);
}

PairObjective evaluate_pairs(const arma::cx_mat& t, const DifferenceSet& diffs,
                             double sigma2) {
  if (sigma2 <= 0)
    throw std::invalid_argument("objective: sigma2 must be positive");
  PairObjective out;
  out.pair_distances = column_squared_norms(t * diffs.deltas);
  out.pair_weights = arma::exp(-out.pair_distances / (4.0 * sigma2));
  // Each stored i<j pair stands for two ordered pairs; diagonal adds N_vec.
  out.f = static_cast<double>(diffs.num_vectors) +
          2.0 * compensated_sum(out.pair_weights);
  return out;
}

MiEstimate mutual_information_mc(const arma::cx_mat& h, const arma::cx_mat& p,
                                 const TransmitVectorSet& vectors,
                                 double sigma2, Rng& rng,
                                 int num_noise_samples) {
  if (num_noise_samples < 1)
    throw std::invalid_argument("mi: num_noise_samples must be >= 1");
  if (sigma2 <= 0) throw std::invalid_argument("mi: sigma2 must be positive");
  const int n_vec = vectors.num_vectors();
  const arma::uword n_r = h.n_rows;
  const arma::cx_mat received = h * p * vectors.vectors;  // N_r x N_vec
  const double noise_scale = std::sqrt(sigma2);
  const double inv_ln2 = 1.0 / std::numbers::ln2;

  // Welford accumulation of the inner log2-sum term per transmit vector.
  arma::vec mean(n_vec, arma::fill::zeros);
  arma::vec m2(n_vec, arma::fill::zeros);
  arma::vec kappa(n_vec);
  for (int i = 0; i < n_vec; ++i) {
    for (int s = 0; s < num_noise_samples; ++s) {
      const arma::cx_vec noise = noise_scale * rng.cnormal_vec(n_r);
      // summed with the same association as dist_sq below so that the j = i
      // term cancels bitwise and kappa(i) = 0 exactly
      double noise_sq = 0.0;
      for (arma::uword r = 0; r < n_r; ++r)
        noise_sq +=
            noise(r).real() * noise(r).real() + noise(r).imag() * noise(r).imag();
      for (int j = 0; j < n_vec; ++j) {
        double dist_sq = 0.0;
        for (arma::uword r = 0; r < n_r; ++r) {
          const arma::cx_double v =
              received(r, i) - received(r, j) + noise(r);
          dist_sq += v.real() * v.real() + v.imag() * v.imag();
        }
        kappa(j) = (noise_sq - dist_sq) / sigma2;
      }
      // kappa(i) = 0 exactly, so the max is always >= 0. Splitting the log2
      // keeps the degenerate H = 0 case exact: peak = 0, acc = N_vec.
      const double peak = kappa.max();
      double acc = 0.0;
      for (int j = 0; j < n_vec; ++j) acc += std::exp(kappa(j) - peak);
      const double inner = peak * inv_ln2 + std::log2(acc);
      const double delta = inner - mean(i);
      mean(i) += delta / (s + 1);
      m2(i) += delta * (inner - mean(i));
    }
  }
  MiEstimate out;
  out.noise_samples = num_noise_samples;
  out.bits = std::log2(static_cast<double>(n_vec)) -
             arma::mean(mean);
  if (num_noise_samples > 1) {
    // Var of the estimate: independent draws across (i, s).
    const double var = arma::accu(m2 / (num_noise_samples - 1.0)) /
                       (static_cast<double>(n_vec) * n_vec *
                        num_noise_samples);
    out.stderr_ = std::sqrt(std::max(var, 0.0));
  }
  return out;
}

}  // namespace simbeam
