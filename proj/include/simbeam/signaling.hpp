#pragma once

#include <armadillo>
#include <string>
#include <utility>
#include <vector>

namespace simbeam {

enum class ConstellationKind { kQam, kPsk };

ConstellationKind parse_constellation_kind(const std::string& name);

// Unit-average-energy symbol alphabet.
struct Constellation {
  ConstellationKind kind = ConstellationKind::kQam;
  int order = 4;
  arma::cx_vec symbols;  // length `order`, (1/M) sum |s|^2 = 1
};

// All M^N_s transmit vectors in lexicographic order of per-stream symbol
// indices; stream 0 is the most significant digit.
struct TransmitVectorSet {
  int num_streams = 1;
  arma::cx_mat vectors;  // N_s x N_vec, one vector per column

  int num_vectors() const { return static_cast<int>(vectors.n_cols); }
};

// Pairwise differences x_i - x_j. Only pairs with i < j are stored; each
// stands for the ordered pairs (i,j) and (j,i), whose difference outer
// products are equal. Diagonal pairs are identically zero and handled
// analytically by consumers.
struct DifferenceSet {
  int num_streams = 1;
  int num_vectors = 1;
  arma::cx_mat deltas;                     // N_s x P, column p = x_i - x_j
  arma::cx_cube outers;                    // N_s x N_s x P, delta * delta^H
  std::vector<std::pair<int, int>> pairs;  // p -> (i, j) with i < j

  int num_pairs() const { return static_cast<int>(pairs.size()); }
};

// Square Gray-coded QAM (M in {4, 16, 64}) or uniform PSK (M >= 2), scaled
// to unit average symbol energy.
Constellation build_constellation(ConstellationKind kind, int order);

// All M^N_s tuples over the constellation. `cap` guards against
// combinatorial blow-up; M^N_s above it is rejected.
TransmitVectorSet enumerate_vectors(const Constellation& c, int num_streams,
                                    int cap = 4096);

DifferenceSet build_differences(const TransmitVectorSet& v);

}  // namespace simbeam
