#pragma once

#include <Eigen/Core>

#include "detlab/core/fields.hpp"

namespace detlab {

/// Off-grid evaluation of Ψ and ∇Ψ: fourth-order centred differences at the
/// nodes, then 4-point Lagrange (cubic) interpolation per axis. Periodic.
class FieldSampler {
public:
  struct Sample {
    Complex value;
    Eigen::Vector3cd gradient;
  };

  explicit FieldSampler(const WaveField& f) : f_(&f) {}
  Sample operator()(const Eigen::Vector3d& x) const;
  /// Node derivative along `axis` (4th-order stencil).
  Complex node_derivative(Index flat, int axis) const;

private:
  const WaveField* f_;
};

/// j = (ħ/m) Im(Ψ* ∇Ψ).
inline Eigen::Vector3d probability_current(const FieldSampler::Sample& s, const PhysicalUnits& u) {
  Eigen::Vector3d j;
  for (int a = 0; a < 3; ++a) j[a] = u.hbar / u.mass * std::imag(std::conj(s.value) * s.gradient[a]);
  return j;
}

} // namespace detlab
