#include "simbeam/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace simbeam {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

bool is_perfect_square(int n) {
  if (n < 1) return false;
  const int r = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
  return r * r == n;
}

void SimGeometry::validate() const {
  require(wavelength > 0, "geometry: wavelength must be positive");
  require(num_tx_antennas >= 1, "geometry: num_tx_antennas must be >= 1");
  require(num_rx_antennas >= 1, "geometry: num_rx_antennas must be >= 1");
  require(tx_layers >= 1, "geometry: tx_layers must be >= 1");
  require(rx_layers >= 1, "geometry: rx_layers must be >= 1");
  require(layer_spacing > 0, "geometry: layer_spacing must be positive");
  require(antenna_spacing > 0, "geometry: antenna_spacing must be positive");
  require(atom_spacing > 0, "geometry: atom_spacing must be positive");
  require(atom_area > 0, "geometry: atom_area must be positive");
  require(link_distance > 0, "geometry: link_distance must be positive");
  require(is_perfect_square(atoms_per_tx_layer),
          "geometry: atoms_per_tx_layer must be a perfect square, got " +
              std::to_string(atoms_per_tx_layer));
  require(is_perfect_square(atoms_per_rx_layer),
          "geometry: atoms_per_rx_layer must be a perfect square, got " +
              std::to_string(atoms_per_rx_layer));
  // The two layer stacks must not interpenetrate.
  require(link_distance > (tx_layers + rx_layers) * layer_spacing,
          "geometry: link_distance must exceed the combined depth of both "
          "layer stacks");
}

LayerLayout build_layer_layout(int count, double spacing,
                               const arma::vec3& center) {
  require(is_perfect_square(count),
          "layer layout: element count must be a perfect square, got " +
              std::to_string(count));
  require(spacing > 0, "layer layout: spacing must be positive");
  const int side = static_cast<int>(
      std::lround(std::sqrt(static_cast<double>(count))));
  const double half = 0.5 * (side - 1);
  LayerLayout out;
  out.positions.set_size(count, 3);
  for (int row = 0; row < side; ++row) {
    for (int col = 0; col < side; ++col) {
      const int idx = row * side + col;  // row-major, x fastest
      out.positions(idx, 0) = center(0) + (col - half) * spacing;
      out.positions(idx, 1) = center(1) + (row - half) * spacing;
      out.positions(idx, 2) = center(2);
    }
  }
  return out;
}

LayerLayout build_antenna_layout(int count, double spacing,
                                 const arma::vec3& center) {
  require(count >= 1, "antenna layout: count must be >= 1");
  require(spacing > 0, "antenna layout: spacing must be positive");
  const double half = 0.5 * (count - 1);
  LayerLayout out;
  out.positions.set_size(count, 3);
  for (int i = 0; i < count; ++i) {
    out.positions(i, 0) = center(0) + (i - half) * spacing;
    out.positions(i, 1) = center(1);
    out.positions(i, 2) = center(2);
  }
  return out;
}

arma::cx_double rs_coefficient(double area, double distance, double cos_angle,
                               double wavelength) {
  require(area > 0, "rs_coefficient: area must be positive");
  require(distance > 0, "rs_coefficient: coincident elements (distance 0)");
  require(wavelength > 0, "rs_coefficient: wavelength must be positive");
  require(cos_angle >= 0.0 && cos_angle <= 1.0,
          "rs_coefficient: cos_angle must lie in [0, 1]");
  const double two_pi = 2.0 * std::numbers::pi;
  const arma::cx_double radial(1.0 / (two_pi * distance), -1.0 / wavelength);
  const double phase = two_pi * distance / wavelength;
  return (area * cos_angle / distance) * radial *
         arma::cx_double(std::cos(phase), std::sin(phase));
}

arma::cx_mat build_propagation_matrix(const LayerLayout& source,
                                      const LayerLayout& dest, double area,
                                      double wavelength) {
  const double dz = dest.plane_z() - source.plane_z();
  require(std::abs(dz) > 0,
          "propagation: source and destination lie in the same plane");
  arma::cx_mat out(dest.count(), source.count());
  for (arma::uword n = 0; n < source.count(); ++n) {
    const arma::rowvec src = source.positions.row(n);
    for (arma::uword m = 0; m < dest.count(); ++m) {
      const arma::rowvec diff = dest.positions.row(m) - src;
      const double d = arma::norm(diff, 2);
      out(m, n) = rs_coefficient(area, d, std::abs(dz) / d, wavelength);
    }
  }
  return out;
}

const arma::cx_mat& PropagationSet::w(int layer) const {
  if (layer < 1 || layer > tx_layers)
    throw std::invalid_argument("propagation set: transmit layer out of range");
  return layer == 1 ? w_first : w_shared;
}

const arma::cx_mat& PropagationSet::u(int layer) const {
  if (layer < 1 || layer > rx_layers)
    throw std::invalid_argument("propagation set: receive layer out of range");
  return layer == 1 ? u_first : u_shared;
}

LayerLayout tx_layer_layout(const SimGeometry& geom, int layer) {
  require(layer >= 1 && layer <= geom.tx_layers,
          "geometry: transmit layer index out of range");
  return build_layer_layout(geom.atoms_per_tx_layer, geom.atom_spacing,
                            {0.0, 0.0, layer * geom.layer_spacing});
}

LayerLayout rx_layer_layout(const SimGeometry& geom, int layer) {
  require(layer >= 1 && layer <= geom.rx_layers,
          "geometry: receive layer index out of range");
  return build_layer_layout(
      geom.atoms_per_rx_layer, geom.atom_spacing,
      {0.0, 0.0, geom.link_distance - layer * geom.layer_spacing});
}

LayerLayout tx_antenna_layout(const SimGeometry& geom) {
  return build_antenna_layout(geom.num_tx_antennas, geom.antenna_spacing,
                              {0.0, 0.0, 0.0});
}

LayerLayout rx_antenna_layout(const SimGeometry& geom) {
  return build_antenna_layout(geom.num_rx_antennas, geom.antenna_spacing,
                              {0.0, 0.0, geom.link_distance});
}

PropagationSet build_all_propagation(const SimGeometry& geom) {
  geom.validate();
  PropagationSet out;
  out.tx_layers = geom.tx_layers;
  out.rx_layers = geom.rx_layers;
  out.w_first = build_propagation_matrix(
      tx_antenna_layout(geom), tx_layer_layout(geom, 1), geom.atom_area,
      geom.wavelength);
  if (geom.tx_layers >= 2) {
    out.w_shared = build_propagation_matrix(
        tx_layer_layout(geom, 1), tx_layer_layout(geom, 2), geom.atom_area,
        geom.wavelength);
  }
  out.u_first = build_propagation_matrix(
      rx_layer_layout(geom, 1), rx_antenna_layout(geom), geom.atom_area,
      geom.wavelength);
  if (geom.rx_layers >= 2) {
    out.u_shared = build_propagation_matrix(
        rx_layer_layout(geom, 2), rx_layer_layout(geom, 1), geom.atom_area,
        geom.wavelength);
  }
  return out;
}

}  // namespace simbeam
