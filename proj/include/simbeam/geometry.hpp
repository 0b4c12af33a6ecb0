#pragma once

#include <armadillo>

namespace simbeam {

// Full physical layout of the link: antenna arrays, metasurface layer grids,
// spacings, wavelength. SI meters throughout.
struct SimGeometry {
  double wavelength = 0.05;
  int num_tx_antennas = 2;
  int num_rx_antennas = 2;
  int atoms_per_tx_layer = 49;   // perfect square, one square grid per layer
  int atoms_per_rx_layer = 49;   // perfect square
  int tx_layers = 4;
  int rx_layers = 4;
  double layer_spacing = 0.025;
  double antenna_spacing = 0.025;
  double atom_spacing = 0.025;
  double atom_area = 0.000625;
  double link_distance = 300.0;

  // Throws std::invalid_argument on any violated constraint.
  void validate() const;
};

// Element coordinates of one layer (or antenna array). All positions share
// the same z; the layer normal is the z-axis.
struct LayerLayout {
  arma::mat positions;  // count x 3, columns are (x, y, z)

  arma::uword count() const { return positions.n_rows; }
  double plane_z() const { return positions(0, 2); }
};

// True when n is k*k for some integer k >= 1.
bool is_perfect_square(int n);

// sqrt(count) x sqrt(count) grid in a constant-z plane centered at `center`,
// row-major element order with x varying fastest. Adjacent in-row and
// in-column separation equals `spacing`.
LayerLayout build_layer_layout(int count, double spacing,
                               const arma::vec3& center);

// Uniform linear array along the x-axis centered at `center`.
LayerLayout build_antenna_layout(int count, double spacing,
                                 const arma::vec3& center);

// Rayleigh-Sommerfeld diffraction coefficient between two elements:
//   (A cos(chi) / d) * (1/(2 pi d) - j/lambda) * exp(j 2 pi d / lambda)
// where d is the element distance and chi the angle to the layer normal.
arma::cx_double rs_coefficient(double area, double distance, double cos_angle,
                               double wavelength);

// Propagation matrix from every source element to every destination element;
// rows index destination, columns index source. Source and destination must
// lie in distinct parallel planes (cos chi = |dz| / d).
arma::cx_mat build_propagation_matrix(const LayerLayout& source,
                                      const LayerLayout& dest, double area,
                                      double wavelength);

// All inter-layer propagation matrices for one link. Layers of a SIM share
// the same grid arrangement, so the inter-layer matrix is computed once and
// reused for every layer pair beyond the first.
struct PropagationSet {
  arma::cx_mat w_first;   // transmit antennas -> transmit layer 1, N x N_t
  arma::cx_mat w_shared;  // transmit layer l-1 -> layer l (l >= 2), N x N
  arma::cx_mat u_first;   // receive layer 1 -> receive antennas, N_r x E
  arma::cx_mat u_shared;  // receive layer k -> layer k-1 (k >= 2), E x E
  int tx_layers = 0;
  int rx_layers = 0;

  // 1-based layer index accessors mirroring the cascade order.
  const arma::cx_mat& w(int layer) const;
  const arma::cx_mat& u(int layer) const;
};

// Builds the full geometry: transmit antennas at z=0, transmit layer l at
// z = l * layer_spacing, receive antennas at z = link_distance, receive
// layer k at z = link_distance - k * layer_spacing (layer 1 nearest the
// receive array, layer K facing the transmitter).
PropagationSet build_all_propagation(const SimGeometry& geom);

// Layer layouts used by build_all_propagation, exposed for correlation
// matrices and diagnostics.
LayerLayout tx_layer_layout(const SimGeometry& geom, int layer);
LayerLayout rx_layer_layout(const SimGeometry& geom, int layer);
LayerLayout tx_antenna_layout(const SimGeometry& geom);
LayerLayout rx_antenna_layout(const SimGeometry& geom);

}  // namespace simbeam
