#include "nbundle/model.hpp"

#include <cmath>

#include "nbundle/bundle_theory.hpp"

namespace nbundle {

void SystemParams::validate() const {
  auto need = [](bool ok, const char* msg) {
    if (!ok) throw InvalidArgument(msg);
  };
  need(std::isfinite(g) && g > 0, "g must be > 0");
  need(std::isfinite(f) && f >= 0, "f must be >= 0");
  need(std::isfinite(gamma) && gamma >= 0, "gamma must be >= 0");
  need(std::isfinite(kappa) && kappa >= 0, "kappa must be >= 0");
  need(std::isfinite(gamma_phi) && gamma_phi >= 0, "gamma_phi must be >= 0");
  need(std::isfinite(delta_LX) && std::isfinite(delta_CX), "detunings must be finite");
}

SystemParams SystemParams::in_time_unit(TimeUnit t) const {
  const Real s = UnitConvention::rate_factor(units.time, t);
  SystemParams out = *this;
  out.g *= s;
  out.f *= s;
  out.gamma *= s;
  out.kappa *= s;
  out.gamma_phi *= s;
  out.delta_LX *= s;
  out.delta_CX *= s;
  out.units.time = t;
  return out;
}

PresetName parse_preset(std::string_view name) {
  if (name == "qd") return PresetName::qd;
  if (name == "qd_weak_losses") return PresetName::qd_weak_losses;
  if (name == "superconducting") return PresetName::superconducting;
  if (name == "superconducting_bad_cavity") return PresetName::superconducting_bad_cavity;
  throw InvalidArgument("unknown preset '" + std::string(name) + "'");
}

std::string_view to_string(PresetName p) {
  switch (p) {
    case PresetName::qd: return "qd";
    case PresetName::qd_weak_losses: return "qd_weak_losses";
    case PresetName::superconducting: return "superconducting";
    case PresetName::superconducting_bad_cavity: return "superconducting_bad_cavity";
  }
  return "?";
}

SystemParams preset(PresetName name) {
  SystemParams p;
  p.label = std::string(to_string(name));
  const bool qd = name == PresetName::qd || name == PresetName::qd_weak_losses;
  if (qd) {
    p.units = {TimeUnit::ps, EnergyUnit::meV};
    p.g = UnitConvention::energy_to_rate(0.02, EnergyUnit::meV, TimeUnit::ps);
    p.gamma = 1.0 * UnitConvention::rate_factor(TimeUnit::ns, TimeUnit::ps);
    p.kappa = 8.5 * UnitConvention::rate_factor(TimeUnit::ns, TimeUnit::ps);
  } else {
    p.units = {TimeUnit::ns, EnergyUnit::ueV};
    p.g = UnitConvention::energy_to_rate(0.079, EnergyUnit::ueV, TimeUnit::ns);
    p.gamma = 1.54 * UnitConvention::rate_factor(TimeUnit::us, TimeUnit::ns);
    p.kappa = 0.29 * UnitConvention::rate_factor(TimeUnit::us, TimeUnit::ns);
  }
  if (name == PresetName::qd_weak_losses) {
    p.gamma = 0.01 * p.g;
    p.kappa = 0.1 * p.g;
  }
  if (name == PresetName::superconducting_bad_cavity) p.kappa = 0.1 * p.g;

  p.delta_CX = -60.0 * p.g;
  p.f = 32.0 * p.g;
  p.delta_LX = bundle_resonance_detuning(2, p.f, p.delta_CX);
  return p;
}

SystemParams preset(std::string_view name) { return preset(parse_preset(name)); }

Operator build_hamiltonian(const SystemParams& params, const HilbertSpace& space) {
  const OperatorSet ops = build_operators(space);
  ComplexMatrix h = -params.delta_LX * ops.proj_x.matrix + params.delta_CL() * ops.number.matrix;
  h += params.g * (ops.sigma_plus.matrix * ops.a.matrix + ops.sigma_minus.matrix * ops.a_dag.matrix);
  h += params.f * (ops.sigma_plus.matrix + ops.sigma_minus.matrix);
  return {space, hermitian_part(h)};
}

std::string_view to_string(ChannelKind k) {
  switch (k) {
    case ChannelKind::radiative: return "radiative";
    case ChannelKind::cavity: return "cavity";
    case ChannelKind::dephasing: return "dephasing";
  }
  return "?";
}

std::vector<Channel> lindblad_channels(const SystemParams& params, const HilbertSpace& space) {
  OperatorSet ops = build_operators(space);
  std::vector<Channel> out;
  if (params.gamma > 0) out.push_back({ops.sigma_minus, params.gamma, ChannelKind::radiative});
  if (params.kappa > 0) out.push_back({ops.a, params.kappa, ChannelKind::cavity});
  if (params.gamma_phi > 0) out.push_back({ops.proj_x, params.gamma_phi, ChannelKind::dephasing});
  return out;
}

}  // namespace nbundle
