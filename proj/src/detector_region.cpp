#include "detlab/detector_region.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "detlab/core/errors.hpp"

namespace detlab {

namespace {

Eigen::Vector3d unit(const Eigen::Vector3d& x) {
  const double r = x.norm();
  return r > 0 ? Eigen::Vector3d(x / r) : Eigen::Vector3d::UnitZ();
}

/// Fibonacci lattice on the sphere, deterministic.
Eigen::Vector3d fibonacci_direction(int i, int n) {
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  const double z = 1.0 - (2.0 * i + 1.0) / n;
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {r * std::cos(golden * i), r * std::sin(golden * i), z};
}

} // namespace

DetectorRegion DetectorRegion::sphere(int dim, double radius) {
  if (dim != 1 && dim != 3) throw ConfigurationError("region dimension must be 1 or 3");
  if (!(radius > 0)) throw ConfigurationError("region radius must be positive");
  DetectorRegion r;
  r.dim_ = dim;
  r.radius_ = radius;
  return r;
}

DetectorRegion DetectorRegion::ellipsoid(double radius, const Eigen::Vector3d& axes) {
  if (!(radius > 0) || !(axes.array() > 0).all())
    throw ConfigurationError("ellipsoid radius and axes must be positive");
  DetectorRegion r;
  r.dim_ = 3;
  r.radius_ = radius;
  r.kind_ = ShapeKind::Ellipsoid;
  r.axes_ = axes;
  return r;
}

DetectorRegion DetectorRegion::tabulated(double radius, int n_theta, int n_phi, std::vector<double> s) {
  if (n_theta < 2 || n_phi < 3 || s.size() != static_cast<size_t>(n_theta) * n_phi)
    throw ConfigurationError("tabulated shape needs n_theta >= 2, n_phi >= 3 and n_theta*n_phi values");
  for (double v : s)
    if (!(v > 0)) throw ConfigurationError("tabulated shape values must be positive");
  DetectorRegion r;
  r.dim_ = 3;
  r.radius_ = radius;
  r.kind_ = ShapeKind::Tabulated;
  r.n_theta_ = n_theta;
  r.n_phi_ = n_phi;
  r.table_ = std::move(s);
  r.check_star_shaped();
  return r;
}

DetectorRegion DetectorRegion::with_radius(double radius) const {
  if (!(radius > 0)) throw ConfigurationError("region radius must be positive");
  DetectorRegion r = *this;
  r.radius_ = radius;
  return r;
}

double DetectorRegion::shape(const Eigen::Vector3d& u) const {
  switch (kind_) {
  case ShapeKind::Sphere:
    return 1.0;
  case ShapeKind::Ellipsoid:
    return 1.0 / std::sqrt((u.array() / axes_.array()).square().sum());
  case ShapeKind::Tabulated: {
    const double theta = std::acos(std::clamp(u.z(), -1.0, 1.0));
    double phi = std::atan2(u.y(), u.x());
    if (phi < 0) phi += 2 * std::numbers::pi;
    const double ft = theta / std::numbers::pi * (n_theta_ - 1);
    const double fp = phi / (2 * std::numbers::pi) * n_phi_;
    const int i0 = std::min(static_cast<int>(ft), n_theta_ - 2);
    const int j0 = static_cast<int>(fp) % n_phi_;
    const int j1 = (j0 + 1) % n_phi_;
    const double a = ft - i0, b = fp - std::floor(fp);
    auto at = [&](int i, int j) { return table_[static_cast<size_t>(i) * n_phi_ + j]; };
    return (1 - a) * ((1 - b) * at(i0, j0) + b * at(i0, j1)) +
           a * ((1 - b) * at(i0 + 1, j0) + b * at(i0 + 1, j1));
  }
  }
  return 1.0;
}

Eigen::Vector3d DetectorRegion::normal(const Eigen::Vector3d& x) const {
  const Eigen::Vector3d u = unit(x);
  if (dim_ == 1) return {u.x() >= 0 ? 1.0 : -1.0, 0.0, 0.0};
  switch (kind_) {
  case ShapeKind::Sphere:
    return u;
  case ShapeKind::Ellipsoid:
    return unit(Eigen::Vector3d(u.array() / axes_.array().square()));
  case ShapeKind::Tabulated:
    break;
  }
  // gradient of F(x) = |x| / (R s(x/|x|)) by central differences
  const Eigen::Vector3d p = surface_point(u);
  const double h = 1e-6 * radius_;
  Eigen::Vector3d grad;
  for (int a = 0; a < 3; ++a) {
    Eigen::Vector3d e = Eigen::Vector3d::Zero();
    e[a] = h;
    auto F = [&](const Eigen::Vector3d& y) { return y.norm() / (radius_ * shape(unit(y))); };
    grad[a] = (F(p + e) - F(p - e)) / (2 * h);
  }
  return unit(grad);
}

bool DetectorRegion::contains(const Eigen::Vector3d& x) const {
  const double r = x.norm();
  if (r == 0.0) return true;
  return r < radius_ * shape(x / r);
}

double DetectorRegion::scaled_radius(const Eigen::Vector3d& x) const {
  const double r = x.norm();
  if (r == 0.0) return 0.0;
  return r / (radius_ * shape(x / r));
}

double DetectorRegion::area_factor(const Eigen::Vector3d& u) const {
  const double s = shape(u);
  const double nu = normal(u).dot(u);
  if (!(nu > 0)) throw StarShapeError("area_factor: n·u <= 0");
  return s * s / nu;
}

void DetectorRegion::check_star_shaped(int samples) const {
  if (dim_ == 1) return;
  for (int i = 0; i < samples; ++i) {
    const Eigen::Vector3d u = fibonacci_direction(i, samples);
    const Eigen::Vector3d x = surface_point(u);
    if (!(shape(u) > 0) || !(normal(x).dot(x) > 0)) {
      std::ostringstream os;
      os << "region is not star-shaped: n(x)·x <= 0 at u=(" << u.transpose() << ")";
      throw StarShapeError(os.str());
    }
  }
}

ComplexPotential absorbing_potential(const Grid& grid, const DetectorRegion& region, double lambda) {
  if (!(lambda >= 0)) throw ConfigurationError("lambda must be non-negative");
  if (grid.dim() != region.dim()) throw ConfigurationError("grid and region dimensions differ");
  ComplexPotential v = ComplexPotential::zero(grid);
  for (Index f = 0; f < grid.size(); ++f)
    if (!region.contains(grid.position(f))) v.values[f] = Complex(0.0, -lambda);
  return v;
}

ComplexPotential half_line_potential(const Grid& grid, double x_step, double lambda) {
  if (grid.dim() != 1) throw ConfigurationError("half-line potential is 1D only");
  ComplexPotential v = ComplexPotential::zero(grid);
  for (Index i = 0; i < grid.size(); ++i)
    if (grid.coordinate(i) >= x_step) v.values[i] = Complex(0.0, -lambda);
  return v;
}

double mass_outside(const WaveField& f, const DetectorRegion& region) {
  double s = 0.0;
  for (Index i = 0; i < f.grid.size(); ++i)
    if (!region.contains(f.grid.position(i))) s += std::norm(f.values[i]);
  return s * f.grid.cell_volume();
}

} // namespace detlab
