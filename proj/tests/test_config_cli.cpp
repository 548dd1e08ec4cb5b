#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nbundle/bundle_theory.hpp"
#include "nbundle/calibration.hpp"
#include "nbundle/commands.hpp"

using namespace nbundle;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int run(const std::string& cmd, const std::string& cfg, const fs::path& out_dir, std::string* err_text = nullptr) {
  GlobalOptions o;
  o.out_dir = out_dir.string();
  o.threads = 1;
  std::ostringstream out, err;
  const int code = run_command(cmd, RunConfig::parse(cfg, "test.ini"), o, out, err);
  if (err_text) *err_text = err.str();
  return code;
}

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig c = RunConfig::parse(
      "# comment\n[system]\npreset = qd   # trailing\n f = 16 g\n\n[numerics]\nn_max=10\nautotruncate = false\n",
      "x.ini");
  CHECK(c.string_or("system", "preset", "") == "qd");
  CHECK(c.int_or("numerics", "n_max", 0) == 10);
  CHECK_FALSE(c.bool_or("numerics", "autotruncate", true));
  CHECK(c.entry("system", "f")->line == 4);
  CHECK(c.sections() == std::vector<std::string>{"numerics", "system"});

  CHECK_THROWS_AS(RunConfig::parse("key = 1\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("[a\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("[a]\nnovalue\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("[a]\nk=1\nk=2\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::load("/nonexistent/file.ini"), ConfigError);

  RunConfig o = RunConfig::parse("[a]\nk=1\n");
  o.set_override("a.k=2");
  o.set_override("b.new = x");
  CHECK(o.int_or("a", "k", 0) == 2);
  CHECK(o.string_or("b", "new", "") == "x");
  CHECK_THROWS_AS(o.set_override("nodot=1"), ConfigError);
}

TEST_CASE("diagnostics carry the line and key") {
  const RunConfig c = RunConfig::parse("[numerics]\n\nn_max = ten\n", "run.ini");
  try {
    c.int_or("numerics", "n_max", 4);
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("run.ini:3") != std::string::npos);
    CHECK(std::string(e.what()).find("numerics.n_max") != std::string::npos);
  }
}

TEST_CASE("quantities need explicit units") {
  const SystemParams p = preset("qd");
  CHECK(parse_rate("0.02 meV", p) == doctest::Approx(p.g));
  CHECK(parse_rate("20 ueV", p) == doctest::Approx(p.g));
  CHECK(parse_rate("8.5 per_ns", p) == doctest::Approx(p.kappa));
  CHECK(parse_rate("8.5e-3 per_ps", p) == doctest::Approx(p.kappa));
  CHECK(parse_rate("-60 g", p) == doctest::Approx(p.delta_CX));
  CHECK(parse_rate("8.5 gamma", p) == doctest::Approx(p.kappa));
  CHECK(parse_rate("1 per_us", p) == doctest::Approx(1e-6));
  CHECK_THROWS_AS(parse_rate("0.02", p), ConfigError);
  CHECK_THROWS_AS(parse_rate("0.02 eV", p), ConfigError);
  CHECK_THROWS_AS(parse_rate("meV", p), ConfigError);
  CHECK(parse_time("2 ns", p) == doctest::Approx(2000));
  CHECK_THROWS_AS(parse_time("2", p), ConfigError);
}

TEST_CASE("system resolution") {
  SystemParams p = resolve_system(RunConfig::parse("[system]\npreset = qd\n"));
  CHECK(p.delta_LX == doctest::Approx(preset("qd").delta_LX));

  p = resolve_system(RunConfig::parse("[system]\npreset = qd\ndelta_LX = one_photon\n"));
  CHECK(p.energy(p.delta_LX) == doctest::Approx(0.08267).epsilon(1e-3));
  p = resolve_system(RunConfig::parse("[system]\npreset = qd\ndelta_LX = bundle(3)\n"));
  CHECK(p.delta_LX / p.g == doctest::Approx(-35.59).epsilon(1e-3));
  p = resolve_system(RunConfig::parse("[system]\npreset = qd\ndelta_LX = -1.2 meV\ngamma_phi = 1e-3 meV\n"));
  CHECK(p.delta_LX == doctest::Approx(p.delta_CX));
  CHECK(p.energy(p.gamma_phi) == doctest::Approx(1e-3));

  // A drive override moves the default detuning with it.
  p = resolve_system(RunConfig::parse("[system]\npreset = qd\nf = 16 g\n"));
  CHECK(p.delta_LX == doctest::Approx(bundle_resonance_detuning(2, 16 * p.g, p.delta_CX)));

  p = resolve_system(RunConfig::parse(
      "[system]\ntime_unit = ns\nenergy_unit = ueV\ng = 0.079 ueV\nf = 2 g\nkappa = 0.1 g\ngamma = 1.54 per_us\n"));
  CHECK(p.units.time == TimeUnit::ns);
  CHECK(p.energy(p.g) == doctest::Approx(0.079));
  CHECK(p.delta_LX == 0.0);

  CHECK_THROWS_AS(resolve_system(RunConfig::parse("[system]\npreset = dot\n")), ConfigError);
  CHECK_THROWS_AS(resolve_system(RunConfig::parse("[system]\nf = 1 meV\n")), ConfigError);
  CHECK_THROWS_AS(resolve_system(RunConfig::parse("[system]\ng = 1 g\n")), ConfigError);
  CHECK_THROWS_AS(resolve_system(RunConfig::parse("[system]\npreset = qd\ntime_unit = ns\n")), ConfigError);
  CHECK_THROWS_AS(resolve_system(RunConfig::parse("[system]\npreset = qd\nkappa = 3\n")), ConfigError);
  CHECK_THROWS_AS(resolve_system(RunConfig::parse("[system]\npreset = qd\nkappa = -3 per_ns\n")), ConfigError);
  CHECK_THROWS_AS(resolve_system(RunConfig::parse("[system]\npreset = qd\ndelta_LX = bundle(1)\n")), ConfigError);
  CHECK_THROWS_AS(resolve_system(RunConfig::parse("[system]\npreset = qd\ncolour = red\n")), ConfigError);
}

TEST_CASE("steady command output") {
  TempDir dir("nbundle_cli_steady");
  REQUIRE(run("steady", "[system]\npreset = qd\n", dir.path) == kExitOk);
  const auto j = nlohmann::json::parse(slurp(dir.path / "steady.json"));
  CHECK(j["r"].get<double>() == doctest::Approx(0.45).epsilon(0.05));
  CHECK(j["nbundle_version"] == NBUNDLE_VERSION);
  CHECK(j["params"]["label"] == "qd");
  CHECK(j["params"]["kappa"]["in_g"].get<double>() == doctest::Approx(0.2797).epsilon(1e-3));
  CHECK(j["params"]["delta_LX"]["energy"].get<double>() == doctest::Approx(-0.5109).epsilon(1e-3));
  CHECK(j["residual"].get<double>() < 1e-9);
  CHECK(j["P"].size() == j["n_max_used"].get<std::size_t>() + 1);
  CHECK(j.contains("mean_n"));
  CHECK(j.contains("ratio31"));

  REQUIRE(run("steady", "[system]\npreset = qd\nf = 0 g\n[steady]\nwigner = true\nwigner_points = 21\n", dir.path) ==
          kExitOk);
  const auto v = nlohmann::json::parse(slurp(dir.path / "steady.json"));
  CHECK(v["P"][0].get<double>() == doctest::Approx(1.0));
  CHECK(v["r"].is_null());
  CHECK(v["coherent"]["fidelity"].get<double>() == doctest::Approx(1.0));
  CHECK(v["wigner"]["integral"].get<double>() == doctest::Approx(1.0).epsilon(1e-3));
  const std::string w = slurp(dir.path / "wigner.csv");
  CHECK(w.find("re_alpha,im_alpha,W\n") != std::string::npos);
  CHECK(w.rfind("# nbundle", 0) == 0);
}

TEST_CASE("exit codes") {
  TempDir dir("nbundle_cli_codes");
  std::string err;
  CHECK(run("steady", "[system]\npreset = qd\nkappa = 3\n", dir.path, &err) == kExitConfig);
  CHECK(err.find("test.ini:3") != std::string::npos);
  CHECK(run("steady", "[system]\npreset = qd\n[numerics]\nbogus = 1\n", dir.path) == kExitConfig);
  CHECK(run("launch", "", dir.path) == kExitConfig);
  // Closed system: singular steady-state problem.
  CHECK(run("steady", "[system]\ng = 0.02 meV\n[numerics]\nautotruncate = false\nn_max = 3\n", dir.path, &err) ==
        kExitSolver);
  CHECK(err.find("error:") != std::string::npos);
}

TEST_CASE("sweep command output") {
  TempDir dir("nbundle_cli_sweep");
  REQUIRE(run("sweep",
              "[system]\npreset = qd\n[sweep]\naxis = kappa\nstart = 1 gamma\nstop = 100 gamma\npoints = 4\n"
              "[numerics]\nautotruncate = false\nn_max = 6\n",
              dir.path) == kExitOk);
  const std::string csv = slurp(dir.path / "sweep.csv");
  CHECK(csv.rfind("# nbundle", 0) == 0);
  CHECK(csv.find("# params:") != std::string::npos);
  CHECK(csv.find("axis_native,axis_g,status,n_max_used,mean_n,r,ratio31,P0,P1,P2,P3,P4,P5,P6,residual") !=
        std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6 + 1 + 4);

  REQUIRE(run("sweep",
              "[system]\npreset = qd\n[sweep]\npoints = 5\nrefine = -0.52 meV:-0.50 meV\nrefine_factor = 2\n"
              "[numerics]\nautotruncate = false\nn_max = 4\n",
              dir.path) == kExitOk);
  CHECK(run("sweep", "[system]\npreset = qd\n[sweep]\naxis = kappa\n", dir.path) == kExitConfig);
  CHECK(run("sweep", "[system]\npreset = qd\n[sweep]\nrefine = 1:2\n", dir.path) == kExitConfig);
  CHECK(run("sweep", "[system]\npreset = qd\n[sweep]\nspacing = cubic\n", dir.path) == kExitConfig);
}

TEST_CASE("traj command output") {
  TempDir dir("nbundle_cli_traj");
  REQUIRE(run("traj",
              "[system]\npreset = superconducting_bad_cavity\n[traj]\ntrajectories = 3\nt_end = 20 us\nn_max = 4\n"
              "seed = 9\n",
              dir.path) == kExitOk);
  const auto j = nlohmann::json::parse(slurp(dir.path / "traj_stats.json"));
  CHECK(j["trajectories"] == 3);
  CHECK(j["seed"] == 9);
  CHECK(j.contains("bundle_size_histogram"));
  CHECK(j["time_averaged_P"].size() == 5);
  CHECK(j["steady_state_P"].size() == 5);
  const std::string rec = slurp(dir.path / "traj_0002.csv");
  CHECK(rec.find("time,channel\n") != std::string::npos);
  CHECK(fs::exists(dir.path / "traj_0000.csv"));
  CHECK_FALSE(fs::exists(dir.path / "traj_0003.csv"));
  CHECK(run("traj", "[system]\npreset = qd\n", dir.path) == kExitConfig);
}

TEST_CASE("calibrate command output") {
  TempDir dir("nbundle_cli_cal");
  const SystemParams p = preset("qd");
  const TimeSeries ts =
      simulate_scenario(p, CalibrationScenario::undriven_jc_from_G1, 0.05 * p.g, linear_grid(0, 60 / p.g, 1200));
  {
    std::ofstream f(dir.path / "ref.csv");
    f << std::setprecision(15) << "time_ps,occupation\n";
    for (std::size_t k = 0; k < ts.times.size(); ++k) f << ts.times[k] << ',' << std::clamp(ts.exciton[k], 0.0, 1.0) << '\n';
  }
  const std::string cfg = "[system]\npreset = qd\n[calibrate]\nscenario = b\nreference = " +
                          (dir.path / "ref.csv").string() + "\n";
  REQUIRE(run("calibrate", cfg, dir.path) == kExitOk);
  const auto j = nlohmann::json::parse(slurp(dir.path / "calibrate.json"));
  CHECK(j["gamma_phi"]["in_g"].get<double>() == doctest::Approx(0.05).epsilon(0.05));
  CHECK(j["gamma_phi"]["meV"].get<double>() == doctest::Approx(0.05 * 0.02).epsilon(0.05));
  CHECK(j["gamma_phi"]["per_ns"].get<double>() == doctest::Approx(0.05 * p.g * 1000).epsilon(0.05));
  CHECK(j["degenerate"] == false);
  CHECK(j["scenario"] == "undriven_jc_from_G1");
  CHECK(run("calibrate", "[system]\npreset = qd\n[calibrate]\nscenario = b\n", dir.path) == kExitConfig);
  CHECK(run("calibrate", cfg + "scenario_x = 1\n", dir.path) == kExitConfig);
}

TEST_CASE("theory command output") {
  TempDir dir("nbundle_cli_theory");
  REQUIRE(run("theory", "[system]\npreset = qd\n", dir.path) == kExitOk);
  const std::string res = slurp(dir.path / "theory_resonances.csv");
  CHECK(res.find("N,kind,delta_LX_native,delta_LX_g,dressed_gap_native,dressed_gap_g,photon_energy_g,"
                 "identity_residual\n") != std::string::npos);
  CHECK(res.find("\n1,one_photon,0.0826666") != std::string::npos);
  CHECK(res.find("\n2,bundle,-0.5109") != std::string::npos);
  CHECK(res.find("\n8,bundle,-0.997") != std::string::npos);
  const std::string ideal = slurp(dir.path / "theory_ideal.csv");
  CHECK(ideal.find("n,P\n0,0.5\n1,0.333333333333333\n2,0.166666666666667\n") != std::string::npos);
  CHECK(run("theory", "[system]\npreset = qd\n[theory]\nideal_mean_n = 5\n", dir.path) == kExitConfig);
}

TEST_CASE("reproducibility header") {
  const std::string h = csv_header("sweep", preset("superconducting"));
  CHECK(h.rfind("# nbundle " NBUNDLE_VERSION "\n", 0) == 0);
  CHECK(h.find("label=superconducting") != std::string::npos);
  CHECK(h.find("params_in_g:") != std::string::npos);
}
