#include "nbundle/units.hpp"

namespace nbundle {

namespace {

// Seconds per unit, as powers of ten.
Real seconds(TimeUnit u) {
  switch (u) {
    case TimeUnit::ps: return 1e-12;
    case TimeUnit::ns: return 1e-9;
    case TimeUnit::us: return 1e-6;
  }
  return 1.0;
}

Real in_meV(EnergyUnit u) {
  switch (u) {
    case EnergyUnit::meV: return 1.0;
    case EnergyUnit::ueV: return 1e-3;
    case EnergyUnit::neV: return 1e-6;
  }
  return 1.0;
}

}  // namespace

std::string_view to_string(TimeUnit u) {
  switch (u) {
    case TimeUnit::ps: return "ps";
    case TimeUnit::ns: return "ns";
    case TimeUnit::us: return "us";
  }
  return "?";
}

std::string_view to_string(EnergyUnit u) {
  switch (u) {
    case EnergyUnit::meV: return "meV";
    case EnergyUnit::ueV: return "ueV";
    case EnergyUnit::neV: return "neV";
  }
  return "?";
}

std::string describe(const UnitSystem& u) {
  return "rates per_" + std::string(to_string(u.time)) + ", energies " +
         std::string(to_string(u.energy));
}

Real UnitConvention::rate_factor(TimeUnit from, TimeUnit to) {
  if (from == to) return 1.0;
  return seconds(to) / seconds(from);
}

Real UnitConvention::energy_to_rate(Real energy, EnergyUnit e, TimeUnit t) {
  const Real per_ps = energy * in_meV(e) / hbar_meV_ps;
  return per_ps * rate_factor(TimeUnit::ps, t);
}

Real UnitConvention::rate_to_energy(Real rate, TimeUnit t, EnergyUnit e) {
  const Real per_ps = rate * rate_factor(t, TimeUnit::ps);
  return per_ps * hbar_meV_ps / in_meV(e);
}

}  // namespace nbundle
