#include "nbundle/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "nbundle/bundle_theory.hpp"
#include "nbundle/calibration.hpp"
#include "nbundle/observables.hpp"
#include "nbundle/solver.hpp"
#include "nbundle/sweeps.hpp"
#include "nbundle/trajectories.hpp"

namespace nbundle {

using nlohmann::json;

namespace {

constexpr const char* kVersion = NBUNDLE_VERSION;

json optional_json(const std::optional<Real>& v) { return v ? json(*v) : json(nullptr); }

json params_json(const SystemParams& p) {
  json j;
  j["label"] = p.label;
  j["time_unit"] = std::string(to_string(p.units.time));
  j["energy_unit"] = std::string(to_string(p.units.energy));
  auto entry = [&](const char* name, Real v) {
    j[name] = {{"rate", v}, {"energy", p.energy(v)}, {"in_g", v / p.g}};
  };
  entry("g", p.g);
  entry("f", p.f);
  entry("gamma", p.gamma);
  entry("kappa", p.kappa);
  entry("gamma_phi", p.gamma_phi);
  entry("delta_LX", p.delta_LX);
  entry("delta_CX", p.delta_CX);
  entry("delta_CL", p.delta_CL());
  return j;
}

json envelope(const std::string& command, const SystemParams& p) {
  return json{{"nbundle_version", kVersion}, {"command", command}, {"params", params_json(p)}};
}

std::filesystem::path out_path(const GlobalOptions& o, const std::string& name) {
  std::filesystem::create_directories(o.out_dir);
  return std::filesystem::path(o.out_dir) / name;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write '" + path.string() + "'");
  f << content;
}

const std::set<std::string> kNumericsKeys = {"n_max", "autotruncate", "n_max_ceiling", "replaced_row"};

AutotruncateOptions truncation_options(const RunConfig& c) {
  AutotruncateOptions o;
  o.n_max_ceiling = c.int_or("numerics", "n_max_ceiling", o.n_max_ceiling);
  o.steady.replaced_row = c.int_or("numerics", "replaced_row", 0);
  return o;
}

std::vector<RefineWindow> parse_windows(const RunConfig& c, const SystemParams& p) {
  std::vector<RefineWindow> out;
  const std::string text = c.string_or("sweep", "refine", "");
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) c.fail("sweep", "refine", "windows look like 'lo:hi; lo:hi' with units");
    try {
      out.push_back({parse_rate(item.substr(0, colon), p), parse_rate(item.substr(colon + 1), p)});
    } catch (const ConfigError& e) {
      c.fail("sweep", "refine", e.what());
    }
    if (!(out.back().hi > out.back().lo)) c.fail("sweep", "refine", "window needs hi > lo");
  }
  return out;
}

}  // namespace

std::string csv_header(const std::string& command, const SystemParams& p) {
  std::ostringstream o;
  o << std::setprecision(12);
  o << "# nbundle " << kVersion << "\n# command: " << command << "\n";
  o << "# params: label=" << p.label << " units=" << describe(p.units) << " g=" << p.g << " f=" << p.f
    << " gamma=" << p.gamma << " kappa=" << p.kappa << " gamma_phi=" << p.gamma_phi << " delta_LX=" << p.delta_LX
    << " delta_CX=" << p.delta_CX << "\n";
  o << "# params_in_g: f=" << p.f / p.g << " gamma=" << p.gamma / p.g << " kappa=" << p.kappa / p.g
    << " gamma_phi=" << p.gamma_phi / p.g << " delta_LX=" << p.delta_LX / p.g << " delta_CX=" << p.delta_CX / p.g
    << "\n";
  return o.str();
}

void cmd_steady(const RunConfig& c, const GlobalOptions& o, std::ostream& out) {
  c.require_known("numerics", kNumericsKeys);
  c.require_known("steady", {"wigner", "wigner_points", "output"});
  const SystemParams p = resolve_system(c);
  const bool autotruncate = c.bool_or("numerics", "autotruncate", true);
  const int n_max = c.int_or("numerics", "n_max", autotruncate ? 4 : 12);
  const AutotruncateOptions trunc = truncation_options(c);

  const SteadyStateResult res = autotruncate ? steady_state_autotruncate(p, n_max, trunc)
                                             : steady_state(build_liouvillian(p, HilbertSpace(n_max)), trunc.steady);
  const PhotonDistribution d = photon_distribution(res.rho_ss);

  json j = envelope("steady", p);
  j["P"] = std::vector<Real>(d.probs.data(), d.probs.data() + d.probs.size());
  j["mean_n"] = d.mean_n;
  j["r"] = optional_json(d.r);
  j["ratio31"] = optional_json(d.ratio31);
  j["residual"] = res.residual;
  j["n_max_used"] = res.n_max_used;

  if (c.bool_or("steady", "wigner", false)) {
    const ComplexMatrix cav = reduce_cavity(res.rho_ss);
    WignerGrid grid = WignerGrid::default_for(d.mean_n);
    grid.points = c.int_or("steady", "wigner_points", grid.points);
    const WignerMap w = wigner(cav, grid);
    std::ostringstream csv;
    csv << csv_header("steady/wigner", p) << std::setprecision(10) << "re_alpha,im_alpha,W\n";
    for (std::size_t i = 0; i < w.re_axis.size(); ++i) {
      for (std::size_t k = 0; k < w.im_axis.size(); ++k) {
        csv << w.re_axis[i] << ',' << w.im_axis[k] << ',' << w.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k))
            << '\n';
      }
    }
    write_file(out_path(o, "wigner.csv"), csv.str());
    j["wigner"] = {{"integral", w.integral()}, {"truncation_warning", w.truncation_warning}, {"file", "wigner.csv"}};
    try {
      const CoherentFit cf = coherent_fidelity(cav);
      j["coherent"] = {{"alpha_re", cf.alpha.real()}, {"alpha_im", cf.alpha.imag()}, {"fidelity", cf.fidelity}};
    } catch (const TruncationFailure& e) {
      j["coherent"] = {{"error", e.what()}};
    }
  }

  const std::string text = j.dump(2);
  write_file(out_path(o, c.string_or("steady", "output", "steady.json")), text + "\n");
  out << text << "\n";
}

void cmd_sweep(const RunConfig& c, const GlobalOptions& o, std::ostream& out) {
  c.require_known("numerics", kNumericsKeys);
  c.require_known("sweep", {"axis", "start", "stop", "points", "spacing", "refine", "refine_factor", "n_report",
                            "output"});
  SweepSpec spec;
  spec.base = resolve_system(c);
  try {
    spec.axis = parse_axis(c.string_or("sweep", "axis", "delta_LX"));
  } catch (const InvalidArgument& e) {
    c.fail("sweep", "axis", e.what());
  }
  const SystemParams& p = spec.base;
  std::optional<Real> start = c.rate("sweep", "start", p);
  std::optional<Real> stop = c.rate("sweep", "stop", p);
  if (spec.axis == SweepAxis::delta_LX) {
    if (!start) start = -70.0 * p.g;
    if (!stop) stop = 10.0 * p.g;
  }
  if (!start) c.fail("sweep", "start", "required for this axis");
  if (!stop) c.fail("sweep", "stop", "required for this axis");
  if (!(*stop > *start)) c.fail("sweep", "stop", "must exceed start");
  const int count = c.int_or("sweep", "points", 400);
  const std::string spacing = c.string_or("sweep", "spacing", spec.axis == SweepAxis::delta_LX ? "linear" : "log");
  try {
    if (spacing == "linear") spec.points = linear_points(*start, *stop, count);
    else if (spacing == "log") spec.points = log_points(*start, *stop, count);
    else c.fail("sweep", "spacing", "expected linear or log");
  } catch (const InvalidArgument& e) {
    c.fail("sweep", "points", e.what());
  }
  spec.points = refine_points(spec.points, parse_windows(c, p), c.int_or("sweep", "refine_factor", 5));
  spec.n_report = c.int_or("sweep", "n_report", 6);
  spec.n_max.autotruncate = c.bool_or("numerics", "autotruncate", true);
  spec.n_max.n_max = c.int_or("numerics", "n_max", spec.n_max.autotruncate ? 4 : 12);
  spec.truncation = truncation_options(c);
  spec.threads = o.threads;

  const SweepTable table = run_sweep(spec);
  std::ostringstream csv;
  write_sweep_csv(csv, table, csv_header("sweep", p));
  const auto path = out_path(o, c.string_or("sweep", "output", "sweep.csv"));
  write_file(path, csv.str());
  long failed = 0;
  for (const auto& row : table.rows) failed += row.ok() ? 0 : 1;
  out << "wrote " << table.rows.size() << " rows (" << failed << " failed) to " << path.string() << "\n";
}

void cmd_traj(const RunConfig& c, const GlobalOptions& o, std::ostream& out) {
  c.require_known("numerics", kNumericsKeys);
  c.require_known("traj", {"trajectories", "t_end", "sample_dt", "burn_in", "gap_threshold", "n_max", "seed",
                           "write_records", "initial_photons"});
  const SystemParams p = resolve_system(c);
  const std::optional<Real> t_end = c.time("traj", "t_end", p);
  if (!t_end || !(*t_end > 0)) c.fail("traj", "t_end", "required, > 0");
  const int count = c.int_or("traj", "trajectories", 10);
  if (count < 1) c.fail("traj", "trajectories", "must be >= 1");
  const int n_max = c.int_or("traj", "n_max", c.int_or("numerics", "n_max", 8));
  TrajectoryOptions topt;
  topt.sample_dt = c.time("traj", "sample_dt", p).value_or(*t_end / 1000);
  topt.burn_in = c.time("traj", "burn_in", p).value_or(0.0);
  topt.initial_photons = c.int_or("traj", "initial_photons", 0);
  const Real gap = c.time("traj", "gap_threshold", p).value_or(p.kappa > 0 ? default_gap_threshold(p) : *t_end);
  const std::uint64_t seed =
      o.seed.value_or(static_cast<std::uint64_t>(std::stoull(c.string_or("traj", "seed", "1"))));

  const HilbertSpace space(n_max);
  const std::vector<EmissionRecord> records =
      run_ensemble(p, space, *t_end, seed, static_cast<std::size_t>(count), o.threads, topt);

  if (c.bool_or("traj", "write_records", true)) {
    for (std::size_t i = 0; i < records.size(); ++i) {
      const EmissionRecord& r = records[i];
      std::ostringstream csv;
      csv << csv_header("traj", p) << "# trajectory " << i << " seed " << r.seed << " t_end " << r.t_end << " (times in "
          << to_string(p.units.time) << ")\n";
      csv << std::setprecision(15) << "time,channel\n";
      std::size_t a = 0, b = 0;
      while (a < r.cavity_emissions.size() || b < r.radiative_emissions.size()) {
        const bool cav = b >= r.radiative_emissions.size() ||
                         (a < r.cavity_emissions.size() && r.cavity_emissions[a] <= r.radiative_emissions[b]);
        if (cav) csv << r.cavity_emissions[a++] << ",cavity\n";
        else csv << r.radiative_emissions[b++] << ",radiative\n";
      }
      std::ostringstream name;
      name << "traj_" << std::setw(4) << std::setfill('0') << i << ".csv";
      write_file(out_path(o, name.str()), csv.str());
    }
  }

  const EmpiricalStatistics s = empirical_statistics(records, gap);
  json j = envelope("traj", p);
  j["time_unit"] = std::string(to_string(p.units.time));
  j["trajectories"] = count;
  j["seed"] = seed;
  j["t_end"] = records.front().t_end;
  j["gap_threshold"] = gap;
  j["n_max"] = n_max;
  json hist = json::object();
  for (const auto& [size, n] : s.bundle_size_histogram) hist[std::to_string(size)] = n;
  j["bundle_size_histogram"] = hist;
  json waits = json::object();
  for (const auto& [size, ws] : s.intra_bundle_waiting) {
    json arr = json::array();
    for (const WaitingStats& w : ws) arr.push_back({{"count", w.count}, {"mean", w.mean}, {"stddev", w.stddev}});
    waits[std::to_string(size)] = arr;
  }
  j["intra_bundle_waiting"] = waits;
  j["time_averaged_P"] = std::vector<Real>(s.time_averaged_probs.data(),
                                           s.time_averaged_probs.data() + s.time_averaged_probs.size());
  j["time_averaged_P_stderr"] = std::vector<Real>(
      s.time_averaged_probs_stderr.data(), s.time_averaged_probs_stderr.data() + s.time_averaged_probs_stderr.size());
  j["cavity_photons"] = s.cavity_photons;
  j["radiative_photons"] = s.radiative_photons;
  try {
    const SteadyStateResult ss = steady_state(build_liouvillian(p, space));
    const PhotonDistribution d = photon_distribution(ss.rho_ss);
    j["steady_state_P"] = std::vector<Real>(d.probs.data(), d.probs.data() + d.probs.size());
  } catch (const Error& e) {
    j["steady_state_P"] = nullptr;
  }
  const std::string text = j.dump(2);
  write_file(out_path(o, "traj_stats.json"), text + "\n");
  out << text << "\n";
}

void cmd_calibrate(const RunConfig& c, const GlobalOptions& o, std::ostream& out) {
  c.require_known("calibrate", {"reference", "scenario", "n_max", "lower", "upper", "f_target"});
  const SystemParams p = resolve_system(c);
  const std::string ref_path = c.string_or("calibrate", "reference", "");
  if (ref_path.empty()) c.fail("calibrate", "reference", "required (CSV with time_<unit>,occupation)");
  CalibrationScenario scenario{};
  try {
    scenario = parse_scenario(c.string_or("calibrate", "scenario", "a"));
  } catch (const InvalidArgument& e) {
    c.fail("calibrate", "scenario", e.what());
  }
  ReferenceDynamics ref;
  try {
    ref = load_reference_csv(ref_path, scenario, p.units.time);
  } catch (const InvalidArgument& e) {
    c.fail("calibrate", "reference", e.what());
  }
  CalibrationOptions copt;
  copt.n_max = c.int_or("calibrate", "n_max", copt.n_max);
  copt.lower = c.real_or("calibrate", "lower", copt.lower);
  copt.upper = c.real_or("calibrate", "upper", copt.upper);
  const DephasingFit fit = fit_dephasing_rate(ref, p, copt);

  auto rate_json = [&](Real rate) {
    return json{{"meV", UnitConvention::rate_to_energy(rate, p.units.time, EnergyUnit::meV)},
                {"per_ns", rate * UnitConvention::rate_factor(p.units.time, TimeUnit::ns)},
                {"native", rate},
                {"in_g", rate / p.g}};
  };
  json j = envelope("calibrate", p);
  j["scenario"] = std::string(to_string(scenario));
  j["reference"] = ref_path;
  j["gamma_phi"] = rate_json(fit.gamma_phi);
  j["raw_minimizer"] = rate_json(fit.raw_minimizer);
  j["residual"] = fit.residual;
  j["degenerate"] = fit.degenerate;
  j["evaluations"] = fit.evaluations;
  if (auto ft = c.rate("calibrate", "f_target", p)) {
    const Real f_ref = scenario == CalibrationScenario::driven_jc_from_G0 ? p.f : 0.0;
    if (!(f_ref > 0)) c.fail("calibrate", "f_target", "quadratic scaling needs the driven scenario (a)");
    j["gamma_phi_at_f_target"] = rate_json(scale_dephasing_rate(fit.gamma_phi, f_ref, *ft));
  }
  const std::string text = j.dump(2);
  write_file(out_path(o, "calibrate.json"), text + "\n");
  out << text << "\n";
}

void cmd_theory(const RunConfig& c, const GlobalOptions& o, std::ostream& out) {
  c.require_known("theory", {"n_bundle_max", "ideal_N", "ideal_mean_n"});
  const SystemParams p = resolve_system(c);
  const int n_top = c.int_or("theory", "n_bundle_max", 8);
  if (n_top < 2) c.fail("theory", "n_bundle_max", "must be >= 2");

  std::ostringstream res;
  res << csv_header("theory", p) << std::setprecision(12);
  res << "# delta_native in " << to_string(p.units.energy) << "\n";
  res << "N,kind,delta_LX_native,delta_LX_g,dressed_gap_native,dressed_gap_g,photon_energy_g,identity_residual\n";
  auto row = [&](int n, const char* kind, Real d, Real resid) {
    const DressedStatePair e = dressed_energies(d, p.f);
    res << n << ',' << kind << ',' << p.energy(d) << ',' << d / p.g << ',' << p.energy(e.gap()) << ','
        << e.gap() / p.g << ',' << (p.delta_CX - d) / p.g << ',' << resid << '\n';
  };
  try {
    row(1, "one_photon", one_photon_resonance_detuning(p.f, p.delta_CX), 0.0);
  } catch (const InvalidArgument& e) {
    res << "# one-photon resonance unavailable: " << e.what() << "\n";
  }
  for (int n = 2; n <= n_top; ++n) {
    row(n, "bundle", bundle_resonance_detuning(n, p.f, p.delta_CX), resonance_identity_residual(n, p.f, p.delta_CX));
  }
  row(0, "n_infinity", p.delta_CX, 0.0);
  write_file(out_path(o, "theory_resonances.csv"), res.str());

  const int ideal_n = c.int_or("theory", "ideal_N", 2);
  const Real ideal_mean = c.real_or("theory", "ideal_mean_n", 2.0 / 3.0);
  PhotonDistribution ideal;
  try {
    ideal = ideal_bundle_distribution(ideal_n, ideal_mean);
  } catch (const InvalidArgument& e) {
    c.fail("theory", "ideal_mean_n", e.what());
  }
  std::ostringstream id;
  id << csv_header("theory/ideal", p) << "# ideal N=" << ideal_n << " mean_n=" << ideal_mean << "\n"
     << std::setprecision(15) << "n,P\n";
  for (Eigen::Index n = 0; n < ideal.probs.size(); ++n) id << n << ',' << ideal.probs(n) << '\n';
  write_file(out_path(o, "theory_ideal.csv"), id.str());
  out << res.str() << id.str();
}

int run_command(const std::string& name, const RunConfig& config, const GlobalOptions& options, std::ostream& out,
                std::ostream& err) {
  try {
    if (name == "steady") cmd_steady(config, options, out);
    else if (name == "sweep") cmd_sweep(config, options, out);
    else if (name == "traj") cmd_traj(config, options, out);
    else if (name == "calibrate") cmd_calibrate(config, options, out);
    else if (name == "theory") cmd_theory(config, options, out);
    else {
      err << "unknown command '" << name << "'\n";
      return kExitConfig;
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitOk;
}

}  // namespace nbundle
