#pragma once

#include <vector>

#include <Eigen/Core>

#include "detlab/core/fields.hpp"
#include "detlab/propagator.hpp"

namespace detlab {

enum class ShapeKind { Sphere, Ellipsoid, Tabulated };

/// Star-shaped Ω = {x : |x| < R s(x/|x|)}. In 1D the "sphere" is (−R, R).
class DetectorRegion {
public:
  static DetectorRegion sphere(int dim, double radius);
  /// Semi-axes R·(a, b, c).
  static DetectorRegion ellipsoid(double radius, const Eigen::Vector3d& axes);
  /// s on a (θ, φ) grid: θ_i = π i/(nθ−1), φ_j = 2π j/nφ, row-major [i][j];
  /// bilinear interpolation, periodic in φ.
  static DetectorRegion tabulated(double radius, int n_theta, int n_phi, std::vector<double> s);

  int dim() const { return dim_; }
  double R() const { return radius_; }
  ShapeKind kind() const { return kind_; }
  const Eigen::Vector3d& axes() const { return axes_; }

  double shape(const Eigen::Vector3d& u) const;
  Eigen::Vector3d surface_point(const Eigen::Vector3d& u) const { return radius_ * shape(u) * u; }
  /// Outward unit normal at the boundary point in the direction of x.
  Eigen::Vector3d normal(const Eigen::Vector3d& x) const;
  bool contains(const Eigen::Vector3d& x) const;
  /// ρ = |x| / (R s(u)); equals |x|/R for spheres.
  double scaled_radius(const Eigen::Vector3d& x) const;
  /// s²/(n·u): dA = R² · area_factor · dΩ.
  double area_factor(const Eigen::Vector3d& u) const;

  /// Checks n(x)·x > 0 on `samples` boundary points; throws StarShapeError.
  void check_star_shaped(int samples = 1000) const;

  DetectorRegion with_radius(double radius) const;

private:
  int dim_ = 3;
  double radius_ = 1.0;
  ShapeKind kind_ = ShapeKind::Sphere;
  Eigen::Vector3d axes_ = Eigen::Vector3d::Ones();
  int n_theta_ = 0, n_phi_ = 0;
  std::vector<double> table_;
};

/// −iλ on Ω^c cells, zero inside.
ComplexPotential absorbing_potential(const Grid& grid, const DetectorRegion& region, double lambda);
/// −iλ on x ≥ x_step (1D half-line absorber).
ComplexPotential half_line_potential(const Grid& grid, double x_step, double lambda);

/// Probability of f outside Ω.
double mass_outside(const WaveField& f, const DetectorRegion& region);

} // namespace detlab
