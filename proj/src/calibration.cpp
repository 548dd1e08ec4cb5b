#include "nbundle/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace nbundle {

CalibrationScenario parse_scenario(std::string_view s) {
  if (s == "a" || s == "driven_jc_from_G0") return CalibrationScenario::driven_jc_from_G0;
  if (s == "b" || s == "undriven_jc_from_G1") return CalibrationScenario::undriven_jc_from_G1;
  if (s == "c" || s == "undriven_jc_from_G2") return CalibrationScenario::undriven_jc_from_G2;
  throw InvalidArgument("unknown calibration scenario '" + std::string(s) + "' (expected a, b or c)");
}

std::string_view to_string(CalibrationScenario s) {
  switch (s) {
    case CalibrationScenario::driven_jc_from_G0: return "driven_jc_from_G0";
    case CalibrationScenario::undriven_jc_from_G1: return "undriven_jc_from_G1";
    case CalibrationScenario::undriven_jc_from_G2: return "undriven_jc_from_G2";
  }
  return "?";
}

void ReferenceDynamics::validate() const {
  if (times.size() != exciton_occupation.size()) throw InvalidArgument("reference columns differ in length");
  if (times.size() < 3) throw InvalidArgument("reference needs at least three samples");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (i > 0 && !(times[i] > times[i - 1])) throw InvalidArgument("reference times must be increasing");
    const Real v = exciton_occupation[i];
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("reference occupation outside [0, 1]");
  }
}

ReferenceDynamics load_reference_csv(const std::string& path, CalibrationScenario scenario, TimeUnit target) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open reference file '" + path + "'");
  ReferenceDynamics ref;
  ref.scenario = scenario;
  ref.source_label = path;
  std::string line;
  std::optional<TimeUnit> unit;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!unit) {
      const auto comma = line.find(',');
      const std::string head = line.substr(0, comma);
      if (head == "time_ps") unit = TimeUnit::ps;
      else if (head == "time_ns") unit = TimeUnit::ns;
      else if (head == "time_us") unit = TimeUnit::us;
      else throw InvalidArgument(path + ":" + std::to_string(lineno) + ": header must start with time_ps, time_ns or time_us");
      continue;
    }
    std::istringstream row(line);
    Real t = 0, v = 0;
    char sep = 0;
    if (!(row >> t >> sep >> v) || sep != ',') {
      throw InvalidArgument(path + ":" + std::to_string(lineno) + ": expected 'time,occupation'");
    }
    ref.times.push_back(t * UnitConvention::rate_factor(target, *unit));
    ref.exciton_occupation.push_back(v);
  }
  ref.validate();
  return ref;
}

Real Envelope::operator()(Real t) const {
  if (times.empty()) return 0;
  if (t <= times.front()) return values.front();
  if (t >= times.back()) return values.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - times.begin());
  const Real w = (t - times[i - 1]) / (times[i] - times[i - 1]);
  return (1 - w) * values[i - 1] + w * values[i];
}

namespace {

Envelope maxima_envelope(const std::vector<Real>& times, const std::vector<Real>& values) {
  Envelope env;
  for (std::size_t i = 1; i + 1 < values.size(); ++i) {
    const Real l = values[i - 1], c = values[i], r = values[i + 1];
    if (!(c > l && c > r)) continue;
    // Parabola through the three samples (non-uniform spacing allowed).
    const Real x0 = times[i - 1] - times[i], x2 = times[i + 1] - times[i];
    const Real d0 = (l - c) / x0, d2 = (r - c) / x2;
    const Real a = (d2 - d0) / (x2 - x0);
    const Real b = d0 - a * x0;
    Real tv = times[i], vv = c;
    if (a < 0) {
      const Real dx = std::clamp(-b / (2 * a), x0, x2);
      tv = times[i] + dx;
      vv = c + b * dx + a * dx * dx;
    }
    env.times.push_back(tv);
    env.values.push_back(vv);
  }
  return env;
}

}  // namespace

Envelope extract_envelope(const std::vector<Real>& times, const std::vector<Real>& values) {
  if (times.size() != values.size()) throw InvalidArgument("envelope input columns differ in length");
  Envelope env = maxima_envelope(times, values);
  if (env.times.size() < 3) {
    throw InsufficientOscillation("envelope needs at least three local maxima, found " +
                                  std::to_string(env.times.size()));
  }
  return env;
}

SystemParams calibration_model(const SystemParams& params, CalibrationScenario scenario, Real gamma_phi) {
  SystemParams m = params;
  m.kappa = 0;
  m.gamma = 0;
  m.gamma_phi = gamma_phi;
  m.delta_LX = 0;
  m.delta_CX = 0;
  if (scenario != CalibrationScenario::driven_jc_from_G0) m.f = 0;
  m.label = params.label + "/calibration";
  return m;
}

TimeSeries simulate_scenario(const SystemParams& params, CalibrationScenario scenario, Real gamma_phi,
                             const std::vector<Real>& times, int n_max) {
  const SystemParams m = calibration_model(params, scenario, gamma_phi);
  int initial_photons = 0;
  int space_n = n_max;
  switch (scenario) {
    case CalibrationScenario::driven_jc_from_G0: break;
    case CalibrationScenario::undriven_jc_from_G1: initial_photons = 1; space_n = 2; break;
    case CalibrationScenario::undriven_jc_from_G2: initial_photons = 2; space_n = 3; break;
  }
  const HilbertSpace space(space_n);
  const Liouvillian L = build_liouvillian(m, space);
  return evolve(L, DensityMatrix::basis_state(space, Emitter::G, initial_photons), times);
}

namespace {

std::vector<Real> model_grid(const ReferenceDynamics& ref, const SystemParams& params, CalibrationScenario scenario,
                             int n_max) {
  std::vector<Real> spacing;
  for (std::size_t i = 1; i < ref.times.size(); ++i) spacing.push_back(ref.times[i] - ref.times[i - 1]);
  std::nth_element(spacing.begin(), spacing.begin() + static_cast<std::ptrdiff_t>(spacing.size() / 2), spacing.end());
  const Real ref_dt = spacing[spacing.size() / 2];
  const int photons = scenario == CalibrationScenario::driven_jc_from_G0 ? n_max + 1 : 3;
  const Real f = scenario == CalibrationScenario::driven_jc_from_G0 ? params.f : 0.0;
  const Real omega = 2.0 * std::max(f, params.g * std::sqrt(static_cast<Real>(photons)));
  const Real dt = std::min(ref_dt, std::numbers::pi / (20.0 * omega));
  const Real t0 = std::min(0.0, ref.times.front());
  const int n = std::max(3, static_cast<int>(std::ceil((ref.times.back() - t0) / dt)) + 1);
  return linear_grid(t0, ref.times.back(), n);
}

}  // namespace

Real envelope_mismatch(const ReferenceDynamics& reference, const SystemParams& params, Real gamma_phi, int n_max) {
  const Envelope ref_env = extract_envelope(reference.times, reference.exciton_occupation);
  const std::vector<Real> grid = model_grid(reference, params, reference.scenario, n_max);
  const TimeSeries sim = simulate_scenario(params, reference.scenario, gamma_phi, grid, n_max);
  const Envelope maxima = maxima_envelope(sim.times, sim.exciton);
  const Envelope curve{sim.times, sim.exciton};
  // Past the last maximum (or with no oscillation at all) the curve is its own envelope.
  auto model = [&](Real t) {
    const bool inside = maxima.times.size() >= 2 && t >= maxima.times.front() && t <= maxima.times.back();
    return inside ? maxima(t) : curve(t);
  };

  Real sum = 0;
  int count = 0;
  for (std::size_t i = 0; i < ref_env.times.size(); ++i) {
    const Real t = ref_env.times[i];
    if (t < sim.times.front() || t > sim.times.back()) continue;
    const Real d = model(t) - ref_env.values[i];
    sum += d * d;
    ++count;
  }
  if (count == 0) return std::numeric_limits<Real>::infinity();
  return std::sqrt(sum / count);
}

DephasingFit fit_dephasing_rate(const ReferenceDynamics& reference, const SystemParams& params,
                                const CalibrationOptions& options) {
  reference.validate();
  params.validate();
  if (reference.scenario == CalibrationScenario::driven_jc_from_G0 && !(params.f > 0)) {
    throw InvalidArgument("driven calibration scenario needs f > 0");
  }
  DephasingFit fit;
  auto objective = [&](Real log_rate) {
    ++fit.evaluations;
    return envelope_mismatch(reference, params, std::exp(log_rate), options.n_max);
  };

  const Real invphi = (std::sqrt(5.0) - 1) / 2;
  Real lo = std::log(options.lower * params.g);
  Real hi = std::log(options.upper * params.g);
  Real x1 = hi - invphi * (hi - lo);
  Real x2 = lo + invphi * (hi - lo);
  Real f1 = objective(x1);
  Real f2 = objective(x2);
  while (hi - lo > options.log_tolerance) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = objective(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = objective(x2);
    }
  }
  const Real best = f1 <= f2 ? x1 : x2;
  fit.raw_minimizer = std::exp(best);
  fit.residual = std::min(f1, f2);
  // A minimum pinned to the lowest decade of the bracket means the reference
  // shows no measurable damping.
  fit.degenerate = fit.raw_minimizer <= 10.0 * options.lower * params.g;
  fit.gamma_phi = fit.degenerate ? 0.0 : fit.raw_minimizer;
  return fit;
}

Real scale_dephasing_rate(Real gamma_phi_ref, Real f_ref, Real f) {
  if (!(f_ref > 0)) throw InvalidArgument("reference drive strength must be > 0");
  const Real s = f / f_ref;
  return gamma_phi_ref * s * s;
}

}  // namespace nbundle
