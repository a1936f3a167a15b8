#include "detlab/core/sampler.hpp"

#include <cmath>

namespace detlab {

namespace {

inline Index wrap(Index i, Index n) { return ((i % n) + n) % n; }

inline void lagrange4(double s, double w[4]) {
  w[0] = -s * (s - 1) * (s - 2) / 6.0;
  w[1] = (s + 1) * (s - 1) * (s - 2) / 2.0;
  w[2] = -(s + 1) * s * (s - 2) / 2.0;
  w[3] = (s + 1) * s * (s - 1) / 6.0;
}

} // namespace

Complex FieldSampler::node_derivative(Index flat, int axis) const {
  const Grid& g = f_->grid;
  const Index n = g.points();
  auto idx = g.axis_indices(flat);
  auto at = [&](int shift) {
    Eigen::Array3i a = idx;
    a[axis] = static_cast<int>(wrap(a[axis] + shift, n));
    return f_->values[g.flat_index(a[0], a[1], a[2])];
  };
  return (-at(2) + 8.0 * at(1) - 8.0 * at(-1) + at(-2)) / (12.0 * g.dx());
}

FieldSampler::Sample FieldSampler::operator()(const Eigen::Vector3d& x) const {
  const Grid& g = f_->grid;
  const Index n = g.points();
  const double dx = g.dx();
  const int dim = g.dim();
  Index base[3] = {0, 0, 0};
  double w[3][4] = {{0, 1, 0, 0}, {0, 1, 0, 0}, {0, 1, 0, 0}};
  for (int a = 0; a < dim; ++a) {
    const double s = x[a] / dx + static_cast<double>(n / 2);
    const double fl = std::floor(s);
    base[a] = static_cast<Index>(fl);
    lagrange4(s - fl, w[a]);
  }
  Sample out{0.0, Eigen::Vector3cd::Zero()};
  if (dim == 1) {
    for (int p = 0; p < 4; ++p) {
      const Index i = wrap(base[0] - 1 + p, n);
      out.value += w[0][p] * f_->values[i];
      out.gradient[0] += w[0][p] * node_derivative(i, 0);
    }
    return out;
  }
  for (int p = 0; p < 4; ++p)
    for (int q = 0; q < 4; ++q)
      for (int r = 0; r < 4; ++r) {
        const double wt = w[0][p] * w[1][q] * w[2][r];
        const Index flat = g.flat_index(static_cast<int>(wrap(base[0] - 1 + p, n)),
                                        static_cast<int>(wrap(base[1] - 1 + q, n)),
                                        static_cast<int>(wrap(base[2] - 1 + r, n)));
        out.value += wt * f_->values[flat];
        for (int a = 0; a < 3; ++a) out.gradient[a] += wt * node_derivative(flat, a);
      }
  return out;
}

} // namespace detlab
