#include "detlab/core/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "detlab/core/errors.hpp"

namespace detlab {

namespace {
bool is_power_of_two(Index n) { return n > 0 && (n & (n - 1)) == 0; }
} // namespace

Grid::Grid(int dim, double length, Index points) : dim_(dim), length_(length), n_(points) {
  if (dim != 1 && dim != 3)
    throw ConfigurationError("grid dimension must be 1 or 3, got " + std::to_string(dim));
  if (!is_power_of_two(points) || points < 8)
    throw ConfigurationError("grid points per axis must be a power of two >= 8, got " +
                             std::to_string(points));
  if (!(length > 0.0) || !std::isfinite(length))
    throw ConfigurationError("grid length must be positive");
}

Index Grid::size() const { return dim_ == 1 ? n_ : n_ * n_ * n_; }

double Grid::dk() const { return 2.0 * std::numbers::pi / length_; }

double Grid::k_max() const { return std::numbers::pi / dx(); }

double Grid::cell_volume() const { return std::pow(dx(), dim_); }

double Grid::k_cell_volume() const { return std::pow(dk(), dim_); }

double Grid::wavenumber(Index j) const {
  const Index m = j < n_ / 2 ? j : j - n_;
  return static_cast<double>(m) * dk();
}

Eigen::Array3i Grid::axis_indices(Index flat) const {
  if (dim_ == 1) return {static_cast<int>(flat), 0, 0};
  const Index l = flat % n_;
  const Index j = (flat / n_) % n_;
  const Index i = flat / (n_ * n_);
  return {static_cast<int>(i), static_cast<int>(j), static_cast<int>(l)};
}

Index Grid::flat_index(int i, int j, int l) const {
  if (dim_ == 1) return i;
  return (static_cast<Index>(i) * n_ + j) * n_ + l;
}

Eigen::Vector3d Grid::position(Index flat) const {
  const auto a = axis_indices(flat);
  if (dim_ == 1) return {coordinate(a[0]), 0.0, 0.0};
  return {coordinate(a[0]), coordinate(a[1]), coordinate(a[2])};
}

Eigen::Vector3d Grid::wavevector(Index flat) const {
  const auto a = axis_indices(flat);
  if (dim_ == 1) return {wavenumber(a[0]), 0.0, 0.0};
  return {wavenumber(a[0]), wavenumber(a[1]), wavenumber(a[2])};
}

} // namespace detlab
