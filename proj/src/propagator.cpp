#include "detlab/propagator.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "detlab/core/errors.hpp"
#include "detlab/core/fourier.hpp"
#include "detlab/core/special.hpp"

namespace detlab {

void EvolutionConfig::validate(const Grid& grid, const PhysicalUnits& units) const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigurationError("evolution dt must be positive");
  if (!(edge_threshold > 0.0)) throw ConfigurationError("edge threshold must be positive");
  if (scheme == Scheme::SplitStep) {
    const double k2 = grid.dim() * grid.k_max() * grid.k_max();
    const double phase = units.hbar * k2 * dt / (2.0 * units.mass);
    if (!(phase < std::numbers::pi / 4)) {
      std::ostringstream os;
      os << "split-step kinetic phase per step " << phase << " exceeds pi/4 (dt=" << dt
         << ", k_max=" << grid.k_max() << ")";
      throw ConfigurationError(os.str());
    }
  }
}

ComplexPotential ComplexPotential::zero(const Grid& grid) {
  return {Eigen::VectorXcd::Zero(grid.size())};
}

ComplexPotential ComplexPotential::uniform(const Grid& grid, Complex v) {
  return {Eigen::VectorXcd::Constant(grid.size(), v)};
}

void ComplexPotential::validate(const Grid& grid) const {
  if (values.size() != grid.size()) throw ConfigurationError("potential size does not match grid");
  if ((values.imag().array() > 0.0).any())
    throw ConfigurationError("potential must satisfy Im V <= 0 (absorption only)");
  if (!values.allFinite()) throw ConfigurationError("potential has non-finite entries");
}

bool ComplexPotential::is_zero() const { return (values.array() == Complex(0.0)).all(); }

double edge_mass(const WaveField& f, double band_fraction) {
  const Index n = f.grid.points();
  const Index band = std::max<Index>(2, static_cast<Index>(std::ceil(band_fraction * n)));
  auto in_band = [&](Index i) { return i < band || i >= n - band; };
  double s = 0.0;
  if (f.grid.dim() == 1) {
    for (Index i = 0; i < n; ++i)
      if (in_band(i)) s += std::norm(f.values[i]);
  } else {
    Index flat = 0;
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        for (Index l = 0; l < n; ++l, ++flat)
          if (in_band(i) || in_band(j) || in_band(l)) s += std::norm(f.values[flat]);
  }
  return s * f.grid.cell_volume();
}

namespace {

Eigen::VectorXcd kinetic_factor(const Grid& grid, const PhysicalUnits& u, double t) {
  const Index total = grid.size();
  Eigen::VectorXcd fac(total);
  const double c = u.hbar * t / (2.0 * u.mass);
  if (grid.dim() == 1) {
    for (Index i = 0; i < total; ++i) {
      const double k = grid.wavenumber(i);
      fac[i] = std::polar(1.0, -c * k * k);
    }
    return fac;
  }
  const Index n = grid.points();
  std::vector<double> k2(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) k2[i] = grid.wavenumber(i) * grid.wavenumber(i);
  Index flat = 0;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      for (Index l = 0; l < n; ++l, ++flat) fac[flat] = std::polar(1.0, -c * (k2[i] + k2[j] + k2[l]));
  return fac;
}

void check_edges(const WaveField& f, double threshold, double band, double t) {
  const double m = edge_mass(f, band);
  if (m > threshold) {
    std::ostringstream os;
    os << "edge mass " << m << " exceeds threshold " << threshold << " at t=" << t
       << "; enlarge the box";
    throw WraparoundError(os.str());
  }
}

} // namespace

void apply_free_phase(SpectralField& g, double t) {
  g.values.array() *= kinetic_factor(g.grid, g.units, t).array();
}

WaveField evolve_free(const WaveField& f, double t, double edge_threshold, double band_fraction) {
  if (!(t >= 0.0)) throw DomainError("evolve_free: t must be non-negative");
  if (t == 0.0) return f;
  SpectralField g = forward_transform(f);
  apply_free_phase(g, t);
  WaveField out = inverse_transform(g);
  if (std::isfinite(edge_threshold)) check_edges(out, edge_threshold, band_fraction, t);
  return out;
}

EvolutionResult evolve_potential(const WaveField& f, const ComplexPotential& v, double t_total,
                                 const EvolutionConfig& cfg, const StepObserver& observer) {
  if (!(t_total >= 0.0)) throw DomainError("evolve_potential: t_total must be non-negative");
  v.validate(f.grid);
  cfg.validate(f.grid, f.units);
  if (cfg.scheme == Scheme::ExactFreeSpectral) {
    if (!v.is_zero())
      throw ConfigurationError("exact-free-spectral scheme requires a zero potential");
    EvolutionResult r{evolve_free(f, t_total, cfg.edge_threshold, cfg.edge_band_fraction), {}, {}};
    return r;
  }

  EvolutionResult r;
  const Index steps = std::max<Index>(1, static_cast<Index>(std::ceil(t_total / cfg.dt - 1e-9)));
  const double dt = t_total / static_cast<double>(steps);
  const double dv = f.grid.cell_volume();
  const auto& u = f.units;

  const Eigen::VectorXcd half = kinetic_factor(f.grid, u, 0.5 * dt);
  const Eigen::VectorXcd full = kinetic_factor(f.grid, u, dt);
  Eigen::VectorXcd kick(v.values.size());
  for (Index i = 0; i < kick.size(); ++i) kick[i] = std::exp(Complex(0, -dt / u.hbar) * v.values[i]);
  const Eigen::ArrayXd keep = kick.array().abs2();
  const Eigen::ArrayXd lost = 1.0 - keep;
  const bool absorbing = (lost > 0.0).any();

  r.times.reserve(static_cast<size_t>(steps));
  r.absorption_record.reserve(static_cast<size_t>(steps));

  SpectralField g = forward_transform(f);
  g.values.array() *= half.array();
  WaveField psi = f;
  Eigen::ArrayXd absorbed = Eigen::ArrayXd::Zero(f.grid.size());
  double norm = f.norm_squared();

  for (Index s = 0; s < steps; ++s) {
    psi = inverse_transform(g);
    const double t = (static_cast<double>(s) + 0.5) * dt;
    check_edges(psi, cfg.edge_threshold, cfg.edge_band_fraction, t);

    double loss = 0.0;
    if (absorbing) {
      absorbed = psi.values.array().abs2() * lost * dv;
      loss = absorbed.sum();
    }
    if (observer) observer(StepView{s, t, dt, psi, absorbed});
    if (absorbing) psi.values.array() *= kick.array();

    const double after = psi.norm_squared();
    if (after > norm * (1.0 + 1e-10) + 1e-300) {
      std::ostringstream os;
      os << "norm increased from " << norm << " to " << after << " at step " << s;
      throw InstabilityError(os.str());
    }
    norm = after;
    r.times.push_back(t);
    r.absorption_record.push_back(loss);

    g = forward_transform(psi);
    g.values.array() *= (s + 1 == steps ? half : full).array();
  }
  r.final = inverse_transform(g);
  check_edges(r.final, cfg.edge_threshold, cfg.edge_band_fraction, t_total);
  return r;
}

Complex evolved_width(double sigma, double dt, const PhysicalUnits& u) {
  return std::sqrt(Complex(sigma * sigma, u.hbar * dt / (2.0 * u.mass)));
}

double soft_step_width(double sigma, double dt, const PhysicalUnits& u) {
  const double a = u.hbar * dt / (2.0 * u.mass * sigma);
  return std::sqrt(sigma * sigma + a * a);
}

Complex evolved_soft_step(double x, double k0, double sigma, double dt, const PhysicalUnits& u) {
  const Complex s = evolved_width(sigma, dt, u);
  const double shift = u.hbar * k0 * dt / u.mass;
  const Complex step = 0.5 * (1.0 - complex_erf((x - shift) / (2.0 * s)));
  return step * std::polar(1.0, k0 * x - u.hbar * k0 * k0 * dt / (2.0 * u.mass));
}

namespace {

template <typename T>
void put(std::ostream& out, T v) {
  static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes little-endian");
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw ArgumentError("snapshot: truncated stream");
  return v;
}

} // namespace

void write_snapshot(std::ostream& out, const WaveField& f, double t) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(f.grid.dim()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(f.grid.points()));
  put<double>(out, f.grid.length());
  put<double>(out, t);
  for (Index i = 0; i < f.values.size(); ++i) {
    put<double>(out, f.values[i].real());
    put<double>(out, f.values[i].imag());
  }
}

WaveField read_snapshot(std::istream& in, double* t) {
  const auto dim = get<std::uint32_t>(in);
  const auto n = get<std::uint32_t>(in);
  const double length = get<double>(in);
  const double time = get<double>(in);
  WaveField f(Grid(static_cast<int>(dim), length, n));
  for (Index i = 0; i < f.values.size(); ++i) {
    const double re = get<double>(in);
    const double im = get<double>(in);
    f.values[i] = {re, im};
  }
  if (t) *t = time;
  return f;
}

} // namespace detlab
