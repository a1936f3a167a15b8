#include "detlab/packets.hpp"

#include <cmath>
#include <numbers>

#include "detlab/core/errors.hpp"

namespace detlab {

namespace {
constexpr double pi = std::numbers::pi;

void check_axes(int dim, const std::array<GaussianAxis, 3>& axes) {
  for (int a = 0; a < dim; ++a)
    if (!(axes[a].sigma > 0)) throw ConfigurationError("Gaussian widths must be positive");
}
} // namespace

GaussianPacket::GaussianPacket(int dim, std::array<GaussianAxis, 3> axes) : dim_(dim), axes_(axes) {
  if (dim != 1 && dim != 3) throw ConfigurationError("packet dimension must be 1 or 3");
  check_axes(dim, axes_);
}

GaussianPacket GaussianPacket::isotropic(int dim, double sigma, const Eigen::Vector3d& x0,
                                         const Eigen::Vector3d& k0) {
  std::array<GaussianAxis, 3> axes;
  for (int a = 0; a < 3; ++a) axes[a] = {sigma, x0[a], k0[a]};
  return GaussianPacket(dim, axes);
}

Complex GaussianPacket::position(const Eigen::Vector3d& x) const {
  Complex v = 1.0;
  for (int a = 0; a < dim_; ++a) {
    const auto& g = axes_[a];
    const double d = x[a] - g.x0;
    v *= std::pow(2 * pi * g.sigma * g.sigma, -0.25) *
         std::exp(Complex(-d * d / (4 * g.sigma * g.sigma), g.k0 * d));
  }
  return v;
}

Complex GaussianPacket::spectral(const Eigen::Vector3d& k) const {
  Complex v = 1.0;
  for (int a = 0; a < dim_; ++a) {
    const auto& g = axes_[a];
    const double d = k[a] - g.k0;
    v *= std::pow(2 * g.sigma * g.sigma / pi, 0.25) *
         std::exp(Complex(-g.sigma * g.sigma * d * d, -k[a] * g.x0));
  }
  return v;
}

double GaussianPacket::k_extent() const {
  double s = 0;
  for (int a = 0; a < dim_; ++a) {
    const double reach = std::abs(axes_[a].k0) + 5.5 / axes_[a].sigma;
    s += reach * reach;
  }
  return std::sqrt(s);
}

Complex overlap(const GaussianPacket& p, const GaussianPacket& q) {
  if (p.dim() != q.dim()) throw ArgumentError("overlap: dimension mismatch");
  Complex v = 1.0;
  for (int a = 0; a < p.dim(); ++a) {
    const auto& g1 = p.axes()[a];
    const auto& g2 = q.axes()[a];
    const double s1 = g1.sigma * g1.sigma, s2 = g2.sigma * g2.sigma;
    // ∫ conj(ĝ1) ĝ2 dk = N √(π/A) exp(B²/4A + C)
    const double A = s1 + s2;
    const Complex B(2 * s1 * g1.k0 + 2 * s2 * g2.k0, g1.x0 - g2.x0);
    const double C = -s1 * g1.k0 * g1.k0 - s2 * g2.k0 * g2.k0;
    const double norm = std::pow(4 * s1 * s2 / (pi * pi), 0.25);
    v *= norm * std::sqrt(pi / A) * std::exp(B * B / (4 * A) + C);
  }
  return v;
}

PacketState::PacketState(const GaussianPacket& g) : coeffs_{1.0}, terms_{g} {}

PacketState::PacketState(std::vector<Complex> coeffs, std::vector<GaussianPacket> terms)
    : coeffs_(std::move(coeffs)), terms_(std::move(terms)) {
  if (coeffs_.size() != terms_.size() || terms_.empty())
    throw ConfigurationError("superposition needs matching, non-empty coefficient and term lists");
  Complex n2 = 0;
  for (size_t i = 0; i < terms_.size(); ++i)
    for (size_t j = 0; j < terms_.size(); ++j)
      n2 += std::conj(coeffs_[i]) * coeffs_[j] * overlap(terms_[i], terms_[j]);
  if (!(n2.real() > 1e-300)) throw ConfigurationError("superposition has zero norm");
  const double s = 1.0 / std::sqrt(n2.real());
  for (auto& c : coeffs_) c *= s;
}

Complex PacketState::position(const Eigen::Vector3d& x) const {
  Complex v = 0;
  for (size_t i = 0; i < terms_.size(); ++i) v += coeffs_[i] * terms_[i].position(x);
  return v;
}

Complex PacketState::spectral(const Eigen::Vector3d& k) const {
  Complex v = 0;
  for (size_t i = 0; i < terms_.size(); ++i) v += coeffs_[i] * terms_[i].spectral(k);
  return v;
}

double PacketState::k_extent() const {
  double e = 0;
  for (const auto& t : terms_) e = std::max(e, t.k_extent());
  return e;
}

WaveField PacketState::sample(const Grid& grid, const PhysicalUnits& units) const {
  if (grid.dim() != dim()) throw ConfigurationError("packet and grid dimensions differ");
  WaveField f(grid, units);
  for (Index i = 0; i < grid.size(); ++i) f.values[i] = position(grid.position(i));
  return f;
}

SpectralAmplitude::SpectralAmplitude(int dim, Fn fn, double k_extent)
    : dim_(dim), fn_(std::move(fn)), k_extent_(k_extent) {}

SpectralAmplitude SpectralAmplitude::from_state(const PacketState& s) {
  return SpectralAmplitude(s.dim(), [s](const Eigen::Vector3d& k) { return s.spectral(k); },
                           s.k_extent());
}

SpectralAmplitude SpectralAmplitude::from_field(const SpectralField& g) {
  const Grid grid = g.grid;
  const Eigen::VectorXcd v = g.values;
  auto lookup = [grid, v](int i, int j, int l) {
    const Index n = grid.points();
    auto wrap = [n](int m) { return static_cast<int>(((m % n) + n) % n); };
    return v[grid.flat_index(wrap(i), wrap(j), wrap(l))];
  };
  auto fn = [grid, lookup](const Eigen::Vector3d& k) -> Complex {
    const double dk = grid.dk();
    const double kmax = grid.k_max();
    for (int a = 0; a < grid.dim(); ++a)
      if (std::abs(k[a]) >= kmax - dk) return 0.0;
    int base[3] = {0, 0, 0};
    double frac[3] = {0, 0, 0};
    for (int a = 0; a < grid.dim(); ++a) {
      const double s = k[a] / dk;
      base[a] = static_cast<int>(std::floor(s));
      frac[a] = s - base[a];
    }
    if (grid.dim() == 1)
      return (1 - frac[0]) * lookup(base[0], 0, 0) + frac[0] * lookup(base[0] + 1, 0, 0);
    Complex acc = 0;
    for (int c = 0; c < 8; ++c) {
      const int di = c & 1, dj = (c >> 1) & 1, dl = (c >> 2) & 1;
      const double w = (di ? frac[0] : 1 - frac[0]) * (dj ? frac[1] : 1 - frac[1]) *
                       (dl ? frac[2] : 1 - frac[2]);
      acc += w * lookup(base[0] + di, base[1] + dj, base[2] + dl);
    }
    return acc;
  };
  return SpectralAmplitude(grid.dim(), fn, grid.k_max());
}

WaveField radial_reduction(const GaussianPacket& iso3d, const Grid& grid1d, const PhysicalUnits& units) {
  if (iso3d.dim() != 3 || grid1d.dim() != 1)
    throw ConfigurationError("radial_reduction maps a 3D packet onto a 1D grid");
  for (const auto& a : iso3d.axes())
    if (a.x0 != 0 || a.k0 != 0 || a.sigma != iso3d.axes()[0].sigma)
      throw ConfigurationError("radial_reduction needs an isotropic packet centred at rest");
  WaveField f(grid1d, units);
  for (Index i = 0; i < grid1d.size(); ++i) {
    const double x = grid1d.coordinate(i);
    f.values[i] = std::sqrt(2 * pi) * x * iso3d.position({std::abs(x), 0, 0});
  }
  return f;
}

PacketState spherical_shell(double sigma, double k0) {
  if (!(sigma > 0) || !(k0 > 0)) throw ConfigurationError("spherical_shell: sigma and k0 must be positive");
  const auto out = GaussianPacket::isotropic(1, sigma, Eigen::Vector3d::Zero(), Eigen::Vector3d(k0, 0, 0));
  const auto in = GaussianPacket::isotropic(1, sigma, Eigen::Vector3d::Zero(), Eigen::Vector3d(-k0, 0, 0));
  return PacketState({1.0, -1.0}, {out, in});
}

SpectralAmplitude radial_lift(const PacketState& u) {
  if (u.dim() != 1) throw ConfigurationError("radial_lift: needs a 1D radial image");
  if (std::abs(u.position({0.0, 0, 0})) > 1e-12) throw ConfigurationError("radial_lift: radial image must be odd");
  auto fn = [u](const Eigen::Vector3d& k) {
    // û is odd, so û(q)/q is smooth at 0; step off the removable point.
    const double q = std::max(k.norm(), 1e-9);
    return Complex(0, 1) * u.spectral({q, 0, 0}) / (std::sqrt(2 * pi) * q);
  };
  return SpectralAmplitude(3, fn, u.k_extent());
}

} // namespace detlab
