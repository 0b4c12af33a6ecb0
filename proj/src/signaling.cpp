#include "simbeam/signaling.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace simbeam {

ConstellationKind parse_constellation_kind(const std::string& name) {
  if (name == "qam") return ConstellationKind::kQam;
  if (name == "psk") return ConstellationKind::kPsk;
  throw std::invalid_argument("constellation: unknown kind '" + name +
                              "' (expected qam or psk)");
}

Constellation build_constellation(ConstellationKind kind, int order) {
  if (order < 2)
    throw std::invalid_argument("constellation: order must be >= 2");
  Constellation out;
  out.kind = kind;
  out.order = order;
  if (kind == ConstellationKind::kPsk) {
    out.symbols.set_size(order);
    for (int k = 0; k < order; ++k) {
      const double a = 2.0 * std::numbers::pi * k / order;
      out.symbols(k) = {std::cos(a), std::sin(a)};
    }
    return out;
  }
  // Square QAM: per-axis PAM levels {-(m-1), ..., m-1} in steps of 2,
  // average energy 2(M-1)/3, normalized to 1.
  const int side = static_cast<int>(
      std::lround(std::sqrt(static_cast<double>(order))));
  if (side * side != order || (side & (side - 1)) != 0)
    throw std::invalid_argument(
        "constellation: QAM order must be a square power of 4 (4, 16, 64), "
        "got " + std::to_string(order));
  const double scale = 1.0 / std::sqrt(2.0 * (order - 1) / 3.0);
  out.symbols.set_size(order);
  for (int a = 0; a < side; ++a) {
    for (int b = 0; b < side; ++b) {
      const double re = (2 * a - (side - 1)) * scale;
      const double im = (2 * b - (side - 1)) * scale;
      out.symbols(a * side + b) = {re, im};
    }
  }
  return out;
}

TransmitVectorSet enumerate_vectors(const Constellation& c, int num_streams,
                                    int cap) {
  if (num_streams < 1)
    throw std::invalid_argument("vectors: num_streams must be >= 1");
  double total = 1.0;
  for (int s = 0; s < num_streams; ++s) {
    total *= c.order;
    if (total > cap)
      throw std::invalid_argument(
          "vectors: M^N_s exceeds the cap of " + std::to_string(cap) +
          "; reduce the constellation order or stream count");
  }
  const int n_vec = static_cast<int>(total);
  TransmitVectorSet out;
  out.num_streams = num_streams;
  out.vectors.set_size(num_streams, n_vec);
  for (int i = 0; i < n_vec; ++i) {
    int rem = i;
    // Lexicographic: stream 0 is the most significant digit.
    for (int s = num_streams - 1; s >= 0; --s) {
      out.vectors(s, i) = c.symbols(rem % c.order);
      rem /= c.order;
    }
  }
  return out;
}

DifferenceSet build_differences(const TransmitVectorSet& v) {
  const int n_vec = v.num_vectors();
  const int n_s = v.num_streams;
  DifferenceSet out;
  out.num_streams = n_s;
  out.num_vectors = n_vec;
  const int n_pairs = n_vec * (n_vec - 1) / 2;
  out.deltas.set_size(n_s, n_pairs);
  out.outers.set_size(n_s, n_s, n_pairs);
  out.pairs.reserve(n_pairs);
  int p = 0;
  for (int i = 0; i < n_vec; ++i) {
    for (int j = i + 1; j < n_vec; ++j) {
      const arma::cx_vec d = v.vectors.col(i) - v.vectors.col(j);
      out.deltas.col(p) = d;
      out.outers.slice(p) = d * d.t();
      out.pairs.emplace_back(i, j);
      ++p;
    }
  }
  return out;
}

}  // namespace simbeam
