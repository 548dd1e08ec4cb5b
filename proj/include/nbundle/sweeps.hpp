#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nbundle/model.hpp"
#include "nbundle/solver.hpp"

namespace nbundle {

enum class SweepAxis { delta_LX, gamma_phi, kappa };

SweepAxis parse_axis(std::string_view s);
std::string_view to_string(SweepAxis a);

/// Fixed truncation, or autotruncation starting from `n_max`.
struct NMaxPolicy {
  int n_max = 8;
  bool autotruncate = true;
};

struct SweepSpec {
  SystemParams base;
  SweepAxis axis = SweepAxis::delta_LX;
  std::vector<Real> points;  // axis values in the base's rate unit, sorted
  NMaxPolicy n_max{};
  int n_report = 6;
  unsigned threads = 0;
  AutotruncateOptions truncation{};

  void validate() const;
};

/// Returns `params` with the axis set to `value`.
SystemParams at_axis(const SystemParams& params, SweepAxis axis, Real value);

struct SweepRow {
  Real axis_value = 0;
  std::string status = "ok";  // "ok" or "error: <message>"
  int n_max_used = 0;
  Real mean_n = 0;
  std::optional<Real> r;
  std::optional<Real> ratio31;
  RealVector probs;  // P(0..n_report)
  Real residual = 0;

  bool ok() const { return status == "ok"; }
};

struct SweepTable {
  SweepSpec spec;
  std::vector<SweepRow> rows;
};

/// One steady state per point. Rows are independent, in axis order, and do
/// not depend on worker scheduling. Solver failures are stored in the row.
SweepTable run_sweep(const SweepSpec& spec);

std::vector<Real> linear_points(Real lo, Real hi, int count);
std::vector<Real> log_points(Real lo, Real hi, int count);

struct RefineWindow {
  Real lo;
  Real hi;
};

/// Adds points inside each window at `factor`× the local grid density of
/// `points`; the result is sorted and duplicate-free.
std::vector<Real> refine_points(std::vector<Real> points, const std::vector<RefineWindow>& windows, int factor = 5);

/// CSV with '#' metadata lines and the fixed header
///   axis_native,axis_g,status,n_max_used,mean_n,r,ratio31,P0..P{n_report},residual
/// Undefined ratios are written as "nan".
void write_sweep_csv(std::ostream& out, const SweepTable& table, const std::string& header_comment = {});

/// Unit label of the axis column in native units ("meV", "per_ns", ...).
std::string native_axis_unit(const SystemParams& params, SweepAxis axis);
/// Converts an internal axis value to native display units.
Real to_native(const SystemParams& params, SweepAxis axis, Real value);

}  // namespace nbundle
