#include "simbeam/rng.hpp"

#include <cmath>
#include <numbers>

namespace simbeam {

std::uint64_t Rng::split(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 stream member at position `index`.
  std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double Rng::uniform() {
  // Top 53 bits, shifted into (0, 1].
  const std::uint64_t bits = engine_() >> 11;
  return static_cast<double>(bits + 1) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_normal_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  cached_normal_ = r * std::sin(a);
  has_cached_ = true;
  return r * std::cos(a);
}

arma::cx_double Rng::cnormal() {
  // |z|^2 ~ Exp(1) and uniform phase gives CN(0, 1).
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(a), r * std::sin(a)};
}

arma::vec Rng::normal_vec(arma::uword n) {
  arma::vec out(n);
  for (arma::uword i = 0; i < n; ++i) out(i) = normal();
  return out;
}

arma::cx_vec Rng::cnormal_vec(arma::uword n) {
  arma::cx_vec out(n);
  for (arma::uword i = 0; i < n; ++i) out(i) = cnormal();
  return out;
}

arma::cx_mat Rng::cnormal_mat(arma::uword rows, arma::uword cols) {
  arma::cx_mat out(rows, cols);
  for (arma::uword c = 0; c < cols; ++c)
    for (arma::uword r = 0; r < rows; ++r) out(r, c) = cnormal();
  return out;
}

}  // namespace simbeam
