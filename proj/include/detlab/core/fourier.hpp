#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "detlab/core/errors.hpp"
#include "detlab/core/fields.hpp"

namespace detlab {

namespace detail {

/// In-place 1D FFTs along every axis of a flattened N^d array.
template <typename Real>
void fft_all_axes(typename BasicWaveField<Real>::Values& data, const Grid& grid, bool inverse) {
  using C = std::complex<Real>;
  thread_local Eigen::FFT<Real> engine;
  const Index n = grid.points();
  std::vector<C> line(static_cast<size_t>(n)), out(static_cast<size_t>(n));

  auto run = [&](Index offset, Index stride) {
    for (Index j = 0; j < n; ++j) line[j] = data[offset + j * stride];
    if (inverse)
      engine.inv(out, line);
    else
      engine.fwd(out, line);
    for (Index j = 0; j < n; ++j) data[offset + j * stride] = out[j];
  };

  if (grid.dim() == 1) {
    run(0, 1);
    return;
  }
  const Index n2 = n * n;
  for (Index a = 0; a < n2; ++a) run(a * n, 1);                     // axis 2
  for (Index i = 0; i < n; ++i)
    for (Index l = 0; l < n; ++l) run(i * n2 + l, n);               // axis 1
  for (Index a = 0; a < n2; ++a) run(a, n2);                        // axis 0
}

/// (-1)^(m_x + m_y + m_z): shift between FFT index origin and the centred grid.
template <typename Real>
void apply_centre_phase(typename BasicWaveField<Real>::Values& data, const Grid& grid) {
  const Index n = grid.points();
  if (grid.dim() == 1) {
    for (Index i = 1; i < n; i += 2) data[i] = -data[i];
    return;
  }
  Index f = 0;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      for (Index l = 0; l < n; ++l, ++f)
        if (((i + j + l) & 1) != 0) data[f] = -data[f];
}

} // namespace detail

template <typename Real>
BasicSpectralField<Real> forward_transform(const BasicWaveField<Real>& f) {
  BasicSpectralField<Real> g{f.grid, f.values, f.units};
  detail::fft_all_axes<Real>(g.values, f.grid, false);
  detail::apply_centre_phase<Real>(g.values, f.grid);
  const Real scale = std::pow(static_cast<Real>(f.grid.dx()) / std::sqrt(2 * std::numbers::pi_v<Real>),
                              static_cast<Real>(f.grid.dim()));
  g.values *= scale;
  return g;
}

template <typename Real>
BasicWaveField<Real> inverse_transform(const BasicSpectralField<Real>& g) {
  BasicWaveField<Real> f(g.grid, g.values, g.units);
  detail::apply_centre_phase<Real>(f.values, g.grid);
  detail::fft_all_axes<Real>(f.values, g.grid, true);
  const Real scale = std::pow(std::sqrt(2 * std::numbers::pi_v<Real>) / static_cast<Real>(g.grid.dx()),
                              static_cast<Real>(g.grid.dim()));
  f.values *= scale;
  return f;
}

} // namespace detlab
