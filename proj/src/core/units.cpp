#include "detlab/core/units.hpp"

#include <cmath>

#include "detlab/core/errors.hpp"

namespace detlab {

void PhysicalUnits::validate() const {
  auto ok = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!ok(hbar) || !ok(mass) || !ok(c))
    throw ConfigurationError("physical units must be finite and strictly positive");
}

PhysicalUnits PhysicalUnits::electron_si() {
  return {1.054571817e-34, 9.1093837015e-31, 299792458.0};
}

} // namespace detlab
