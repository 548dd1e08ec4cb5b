#include "nbundle/sweeps.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "nbundle/parallel.hpp"

namespace nbundle {

SweepAxis parse_axis(std::string_view s) {
  if (s == "delta_LX") return SweepAxis::delta_LX;
  if (s == "gamma_phi") return SweepAxis::gamma_phi;
  if (s == "kappa") return SweepAxis::kappa;
  throw InvalidArgument("unknown sweep axis '" + std::string(s) + "'");
}

std::string_view to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::delta_LX: return "delta_LX";
    case SweepAxis::gamma_phi: return "gamma_phi";
    case SweepAxis::kappa: return "kappa";
  }
  return "?";
}

void SweepSpec::validate() const {
  base.validate();
  if (points.empty()) throw InvalidArgument("sweep has no points");
  if (!std::is_sorted(points.begin(), points.end())) throw InvalidArgument("sweep points must be sorted");
  if (n_report < 3) throw InvalidArgument("n_report must be >= 3");
  if (axis != SweepAxis::delta_LX && points.front() < 0) throw InvalidArgument("rates must be >= 0");
}

SystemParams at_axis(const SystemParams& params, SweepAxis axis, Real value) {
  SystemParams p = params;
  switch (axis) {
    case SweepAxis::delta_LX: p.delta_LX = value; break;
    case SweepAxis::gamma_phi: p.gamma_phi = value; break;
    case SweepAxis::kappa: p.kappa = value; break;
  }
  return p;
}

SweepTable run_sweep(const SweepSpec& spec) {
  spec.validate();
  SweepTable table{spec, std::vector<SweepRow>(spec.points.size())};
  parallel_for(spec.points.size(), spec.threads, [&](std::size_t i) {
    SweepRow& row = table.rows[i];
    row.axis_value = spec.points[i];
    row.probs = RealVector::Zero(spec.n_report + 1);
    try {
      const SystemParams p = at_axis(spec.base, spec.axis, spec.points[i]);
      const SteadyStateResult res =
          spec.n_max.autotruncate
              ? steady_state_autotruncate(p, spec.n_max.n_max, spec.truncation)
              : steady_state(build_liouvillian(p, HilbertSpace(spec.n_max.n_max)), spec.truncation.steady);
      const PhotonDistribution d = photon_distribution(res.rho_ss);
      row.n_max_used = res.n_max_used;
      row.mean_n = d.mean_n;
      row.r = d.r;
      row.ratio31 = d.ratio31;
      row.residual = res.residual;
      for (int n = 0; n <= spec.n_report; ++n) row.probs(n) = d.at(n);
    } catch (const std::exception& e) {
      row.status = std::string("error: ") + e.what();
    }
  });
  return table;
}

std::vector<Real> linear_points(Real lo, Real hi, int count) {
  if (count < 1) throw InvalidArgument("point count must be >= 1");
  if (count == 1) return {lo};
  std::vector<Real> p(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) p[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
  return p;
}

std::vector<Real> log_points(Real lo, Real hi, int count) {
  if (!(lo > 0 && hi > 0)) throw InvalidArgument("log spacing needs positive bounds");
  std::vector<Real> p = linear_points(std::log(lo), std::log(hi), count);
  for (Real& x : p) x = std::exp(x);
  return p;
}

std::vector<Real> refine_points(std::vector<Real> points, const std::vector<RefineWindow>& windows, int factor) {
  if (factor < 1) throw InvalidArgument("refinement factor must be >= 1");
  std::sort(points.begin(), points.end());
  std::vector<Real> extra;
  for (const RefineWindow& w : windows) {
    if (!(w.hi > w.lo)) throw InvalidArgument("refinement window must have hi > lo");
    Real spacing = w.hi - w.lo;
    for (std::size_t i = 1; i < points.size(); ++i) {
      if (points[i] >= w.lo && points[i - 1] <= w.hi) spacing = std::min(spacing, points[i] - points[i - 1]);
    }
    const Real step = spacing / factor;
    for (Real x = w.lo; x <= w.hi + 0.5 * step; x += step) extra.push_back(std::min(x, w.hi));
  }
  points.insert(points.end(), extra.begin(), extra.end());
  std::sort(points.begin(), points.end());
  // Merge points closer than a tiny fraction of the local spacing.
  std::vector<Real> out;
  const Real span = points.empty() ? 0 : points.back() - points.front();
  for (const Real x : points) {
    if (out.empty() || x - out.back() > 1e-12 * std::max(span, std::abs(x))) out.push_back(x);
  }
  return out;
}

std::string native_axis_unit(const SystemParams& params, SweepAxis axis) {
  if (axis == SweepAxis::delta_LX) return std::string(to_string(params.units.energy));
  return "per_" + std::string(to_string(params.units.time));
}

Real to_native(const SystemParams& params, SweepAxis axis, Real value) {
  return axis == SweepAxis::delta_LX ? params.energy(value) : value;
}

namespace {

void put(std::ostream& out, const std::optional<Real>& v) {
  if (v) out << *v;
  else out << "nan";
}

}  // namespace

void write_sweep_csv(std::ostream& out, const SweepTable& table, const std::string& header_comment) {
  const SweepSpec& s = table.spec;
  if (!header_comment.empty()) out << header_comment;
  out << "# axis: " << to_string(s.axis) << " (axis_native in " << native_axis_unit(s.base, s.axis)
      << ", axis_g in units of g)\n";
  out << "# n_max policy: " << (s.n_max.autotruncate ? "autotruncate from " : "fixed ") << s.n_max.n_max << "\n";
  out << std::setprecision(12);
  out << "axis_native,axis_g,status,n_max_used,mean_n,r,ratio31";
  for (int n = 0; n <= s.n_report; ++n) out << ",P" << n;
  out << ",residual\n";
  for (const SweepRow& row : table.rows) {
    out << to_native(s.base, s.axis, row.axis_value) << ',' << row.axis_value / s.base.g << ',';
    if (row.ok()) {
      out << "ok";
    } else {
      std::string msg = row.status;
      std::replace(msg.begin(), msg.end(), ',', ';');
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      out << '"' << msg << '"';
    }
    out << ',' << row.n_max_used << ',' << row.mean_n << ',';
    put(out, row.r);
    out << ',';
    put(out, row.ratio31);
    for (int n = 0; n <= s.n_report; ++n) out << ',' << row.probs(n);
    out << ',' << row.residual << '\n';
  }
}

}  // namespace nbundle
