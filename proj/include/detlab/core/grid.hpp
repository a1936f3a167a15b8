#pragma once

#include <Eigen/Core>

namespace detlab {

using Index = Eigen::Index;

/// Uniform periodic grid, origin-centred: x_j = (j - N/2) dx on every axis.
/// Flattened storage is row-major, (i, j, l) -> (i*N + j)*N + l, axis 0 = x.
class Grid {
public:
  Grid() = default;
  Grid(int dim, double length, Index points);

  int dim() const { return dim_; }
  double length() const { return length_; }
  Index points() const { return n_; }
  Index size() const;

  double dx() const { return length_ / static_cast<double>(n_); }
  double dk() const;
  double k_max() const;
  double cell_volume() const;
  double k_cell_volume() const;

  double coordinate(Index j) const { return static_cast<double>(j - n_ / 2) * dx(); }
  /// Wavenumber of FFT-ordered index j (0..N/2-1 positive, then negative).
  double wavenumber(Index j) const;

  /// Axis indices of a flat index; unused axes are zero.
  Eigen::Array3i axis_indices(Index flat) const;
  Index flat_index(int i, int j = 0, int l = 0) const;

  Eigen::Vector3d position(Index flat) const;
  Eigen::Vector3d wavevector(Index flat) const;

  bool operator==(const Grid& o) const {
    return dim_ == o.dim_ && n_ == o.n_ && length_ == o.length_;
  }
  bool operator!=(const Grid& o) const { return !(*this == o); }

private:
  int dim_ = 1;
  double length_ = 1.0;
  Index n_ = 8;
};

} // namespace detlab
