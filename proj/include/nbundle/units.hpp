#pragma once

#include <string>
#include <string_view>

#include "nbundle/types.hpp"

namespace nbundle {

enum class TimeUnit { ps, ns, us };
enum class EnergyUnit { meV, ueV, neV };

std::string_view to_string(TimeUnit u);
std::string_view to_string(EnergyUnit u);

/// Unit system a parameter set is expressed in. Rates and angular frequencies
/// are stored in 1/time; energies are derived via ħ.
struct UnitSystem {
  TimeUnit time = TimeUnit::ps;
  EnergyUnit energy = EnergyUnit::meV;

  friend bool operator==(const UnitSystem&, const UnitSystem&) = default;
};

std::string describe(const UnitSystem& u);

/// ħ-based conversions between energies and angular frequencies.
struct UnitConvention {
  static constexpr Real hbar_meV_ps = 0.6582119569;

  /// Multiply a rate given per `from` to obtain it per `to`.
  static Real rate_factor(TimeUnit from, TimeUnit to);
  static Real energy_to_rate(Real energy, EnergyUnit e, TimeUnit t);
  static Real rate_to_energy(Real rate, TimeUnit t, EnergyUnit e);
};

}  // namespace nbundle
