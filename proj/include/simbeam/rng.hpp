#pragma once

#include <armadillo>
#include <cstdint>

namespace simbeam {

// Deterministic random source. All randomness in the library flows through
// this class so that a run is reproducible from a single 64-bit seed across
// platforms. std::mt19937_64 raw output is specified by the standard; the
// distribution transforms are implemented here explicitly because the
// stdlib distribution objects are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Derives an independent child seed from (seed, index). Uses the
  // splitmix64 finalizer so nearby indices give uncorrelated streams.
  static std::uint64_t split(std::uint64_t seed, std::uint64_t index);

  // Uniform on (0, 1]; never returns 0, so log(uniform()) is safe.
  double uniform();

  // Standard normal N(0, 1) via Box-Muller; second value is cached.
  double normal();

  // Circularly symmetric complex normal CN(0, 1): unit total variance,
  // i.e. real and imaginary parts are each N(0, 1/2).
  arma::cx_double cnormal();

  arma::vec normal_vec(arma::uword n);
  arma::cx_vec cnormal_vec(arma::uword n);
  // Filled in column-major order.
  arma::cx_mat cnormal_mat(arma::uword rows, arma::uword cols);

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace simbeam
