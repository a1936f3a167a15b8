#pragma once

namespace detlab {

/// ħ, m and c. Defaults give natural units; c only matters for the Dirac code.
struct PhysicalUnits {
  double hbar = 1.0;
  double mass = 1.0;
  double c = 1.0;

  void validate() const;

  /// Electron in SI units.
  static PhysicalUnits electron_si();
};

} // namespace detlab
