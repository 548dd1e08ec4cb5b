#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "nbundle/fock_algebra.hpp"
#include "nbundle/units.hpp"

namespace nbundle {

/// Rates and detunings of the driven, dissipative Jaynes–Cummings model, all
/// as angular frequencies in 1/`units.time`.
struct SystemParams {
  Real g = 1.0;          // emitter–cavity coupling
  Real f = 0.0;          // drive strength
  Real gamma = 0.0;      // radiative decay of |X>
  Real kappa = 0.0;      // cavity loss
  Real gamma_phi = 0.0;  // pure dephasing on |X><X|
  Real delta_LX = 0.0;   // ω_L − ω_X
  Real delta_CX = 0.0;   // ω_C − ω_X
  UnitSystem units{};
  std::string label = "custom";

  /// ω_C − ω_L; never stored.
  Real delta_CL() const { return delta_CX - delta_LX; }

  /// Throws InvalidArgument unless g > 0 and all rates are non-negative.
  void validate() const;

  /// Same physics expressed per `t`.
  SystemParams in_time_unit(TimeUnit t) const;

  /// Converts an angular frequency of this unit system to its energy unit.
  Real energy(Real rate) const { return UnitConvention::rate_to_energy(rate, units.time, units.energy); }
  Real rate_from_energy(Real e) const {
    return UnitConvention::energy_to_rate(e, units.energy, units.time);
  }
};

enum class PresetName { qd, qd_weak_losses, superconducting, superconducting_bad_cavity };

PresetName parse_preset(std::string_view name);
std::string_view to_string(PresetName p);

/// Platform parameter sets, with delta_LX at the N=2 bundle resonance.
/// QD presets use ps⁻¹/meV; superconducting presets use ns⁻¹/µeV.
SystemParams preset(PresetName name);
SystemParams preset(std::string_view name);

/// H/ħ = −Δω_LX|X><X| + Δω_CL a†a + g(σ₊a + σ₋a†) + f(σ₊ + σ₋).
Operator build_hamiltonian(const SystemParams& params, const HilbertSpace& space);

enum class ChannelKind { radiative, cavity, dephasing };
std::string_view to_string(ChannelKind k);

struct Channel {
  Operator op;
  Real rate;
  ChannelKind kind;
};

/// (σ₋, γ), (a, κ), (|X><X|, γ_φ); channels with zero rate are dropped.
std::vector<Channel> lindblad_channels(const SystemParams& params, const HilbertSpace& space);

}  // namespace nbundle
