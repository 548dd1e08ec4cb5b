#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "nbundle/model.hpp"
#include "nbundle/solver.hpp"

namespace nbundle {

/// (a) driven JC from |G,0>, (b) undriven JC from |G,1>, (c) undriven JC from |G,2>.
enum class CalibrationScenario { driven_jc_from_G0, undriven_jc_from_G1, undriven_jc_from_G2 };

CalibrationScenario parse_scenario(std::string_view s);  // "a"/"b"/"c" or the full names
std::string_view to_string(CalibrationScenario s);

/// Exciton occupation dynamics against which the dephasing rate is fitted.
/// Times are in the time unit of the SystemParams used for the fit.
struct ReferenceDynamics {
  std::vector<Real> times;
  std::vector<Real> exciton_occupation;
  CalibrationScenario scenario = CalibrationScenario::driven_jc_from_G0;
  std::string source_label;

  void validate() const;
};

/// Reads `time_<unit>,occupation` CSV ('#' lines are comments) and converts
/// times to `target` units.
ReferenceDynamics load_reference_csv(const std::string& path, CalibrationScenario scenario, TimeUnit target);

/// Upper envelope: strict local maxima (vertex-refined by a parabola through
/// each maximum and its neighbours), linearly interpolated.
struct Envelope {
  std::vector<Real> times;
  std::vector<Real> values;

  /// Piecewise-linear value, held constant outside the maxima range.
  Real operator()(Real t) const;
};

/// Throws InsufficientOscillation with fewer than three maxima.
Envelope extract_envelope(const std::vector<Real>& times, const std::vector<Real>& values);
inline Envelope extract_envelope(const TimeSeries& series) {
  return extract_envelope(series.times, series.exciton);
}

struct DephasingFit {
  Real gamma_phi = 0;      // fitted rate (0 when degenerate)
  Real raw_minimizer = 0;  // golden-section argmin before the degeneracy rule
  Real residual = 0;       // RMS envelope mismatch at the optimum
  bool degenerate = false;
  int evaluations = 0;
};

struct CalibrationOptions {
  Real lower = 1e-6;  // search interval in units of g
  Real upper = 10.0;
  Real log_tolerance = 1e-5;  // golden-section stop on ln γ_φ
  int n_max = 12;             // truncation for the driven scenario
};

/// Phenomenological model the fit runs: κ = γ = 0, Δω_LX = Δω_CX = 0, only the
/// |X><X| channel, scenario-specific drive and initial state.
SystemParams calibration_model(const SystemParams& params, CalibrationScenario scenario, Real gamma_phi);

/// Exciton dynamics of the phenomenological model on `times`.
TimeSeries simulate_scenario(const SystemParams& params, CalibrationScenario scenario, Real gamma_phi,
                             const std::vector<Real>& times, int n_max = 12);

/// RMS difference between the model envelope and the reference envelope,
/// evaluated at the reference maxima times inside the overlapping window.
Real envelope_mismatch(const ReferenceDynamics& reference, const SystemParams& params, Real gamma_phi,
                       int n_max = 12);

/// Golden-section search on ln γ_φ over [lower, upper]·g.
DephasingFit fit_dephasing_rate(const ReferenceDynamics& reference, const SystemParams& params,
                                const CalibrationOptions& options = {});

/// γ_φ ∝ f²: gamma_phi_ref · (f / f_ref)².
Real scale_dephasing_rate(Real gamma_phi_ref, Real f_ref, Real f);

}  // namespace nbundle
