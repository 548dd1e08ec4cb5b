#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "nbundle/calibration.hpp"

using namespace nbundle;

namespace {

ReferenceDynamics self_generated(const SystemParams& p, CalibrationScenario sc, Real gamma_phi, Real t_end, int n) {
  const TimeSeries ts = simulate_scenario(p, sc, gamma_phi, linear_grid(0, t_end, n));
  ReferenceDynamics ref;
  ref.times = ts.times;
  ref.exciton_occupation = ts.exciton;
  for (Real& v : ref.exciton_occupation) v = std::clamp(v, 0.0, 1.0);
  ref.scenario = sc;
  ref.source_label = "self";
  return ref;
}

SystemParams driven_params() {
  // Moderate drive keeps the driven scenario cheap while still oscillating.
  SystemParams p = preset("qd");
  p.f = 2 * p.g;
  return p;
}

}  // namespace

TEST_CASE("scenario names") {
  CHECK(parse_scenario("a") == CalibrationScenario::driven_jc_from_G0);
  CHECK(parse_scenario("b") == CalibrationScenario::undriven_jc_from_G1);
  CHECK(parse_scenario("undriven_jc_from_G2") == CalibrationScenario::undriven_jc_from_G2);
  CHECK_THROWS_AS(parse_scenario("d"), InvalidArgument);
}

TEST_CASE("envelope of analytic oscillations") {
  const Real g = 1.3;
  const auto t = linear_grid(0, 12 * M_PI / g, 3001);
  std::vector<Real> flat, damped;
  const Real lambda = 0.07;
  for (Real x : t) {
    flat.push_back(std::pow(std::cos(g * x), 2));
    damped.push_back(std::exp(-lambda * x) * std::pow(std::cos(g * x), 2));
  }
  const Envelope e = extract_envelope(t, flat);
  CHECK(e.times.size() >= 10);
  for (Real v : e.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(e(5.0) == doctest::Approx(1.0).epsilon(1e-6));

  const Envelope d = extract_envelope(t, damped);
  for (std::size_t i = 0; i < d.times.size(); ++i) {
    CHECK(d.values[i] == doctest::Approx(std::exp(-lambda * d.times[i])).epsilon(2e-3));
  }
  std::vector<Real> mono(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) mono[i] = std::exp(-t[i]);
  CHECK_THROWS_AS(extract_envelope(t, mono), InsufficientOscillation);
}

TEST_CASE("dephasing-free runs have a flat envelope") {
  const SystemParams p = preset("qd");
  const auto grid = linear_grid(0, 30 / p.g, 1500);
  const TimeSeries b = simulate_scenario(p, CalibrationScenario::undriven_jc_from_G1, 0.0, grid);
  for (Real v : extract_envelope(b).values) CHECK(v == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("single-excitation dephasing matches the damped Rabi solution") {
  // Populations of |X,0>, |G,1> obey w'' + Γ₂w' + (2g)²w = 0 with Γ₂ = γ_φ/2.
  const SystemParams p = preset("qd");
  const Real gp = 0.3 * p.g;
  const auto grid = linear_grid(0, 25 / p.g, 400);
  const TimeSeries ts = simulate_scenario(p, CalibrationScenario::undriven_jc_from_G1, gp, grid);
  const Real omega = 2 * p.g, g2 = gp / 2, w = std::sqrt(omega * omega - g2 * g2 / 4);
  Real worst = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Real t = grid[k];
    // Start in |G,1>: w(0) = P_X − P_G1 = −1.
    const Real wt = -std::exp(-g2 * t / 2) * (std::cos(w * t) + g2 / (2 * w) * std::sin(w * t));
    worst = std::max(worst, std::abs(ts.exciton[k] - (1 + wt) / 2));
    // Excitation number is conserved: P(n=1) + P(n=0) = 1 and nothing else is populated.
    CHECK(ts.probs[k](0) + ts.probs[k](1) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(ts.probs[k](2) < 1e-12);
  }
  CHECK(worst < 1e-7);
}

TEST_CASE("planted dephasing rate is recovered") {
  const SystemParams p = preset("qd");
  const Real planted = 0.05 * p.g;
  for (auto sc : {CalibrationScenario::undriven_jc_from_G1, CalibrationScenario::undriven_jc_from_G2}) {
    const ReferenceDynamics ref = self_generated(p, sc, planted, 60 / p.g, 1200);
    const DephasingFit fit = fit_dephasing_rate(ref, p);
    CHECK_FALSE(fit.degenerate);
    CHECK(fit.gamma_phi == doctest::Approx(planted).epsilon(0.05));
    CHECK(fit.residual < 1e-3);
  }
  const SystemParams d = driven_params();
  const ReferenceDynamics ref = self_generated(d, CalibrationScenario::driven_jc_from_G0, planted, 60 / d.g, 1500);
  CalibrationOptions o;
  o.n_max = 6;
  const DephasingFit fit = fit_dephasing_rate(ref, d, o);
  CHECK(fit.gamma_phi == doctest::Approx(planted).epsilon(0.05));
}

TEST_CASE("undamped reference is degenerate") {
  const SystemParams p = preset("qd");
  const ReferenceDynamics ref = self_generated(p, CalibrationScenario::undriven_jc_from_G1, 0.0, 40 / p.g, 800);
  const DephasingFit fit = fit_dephasing_rate(ref, p);
  CHECK(fit.degenerate);
  CHECK(fit.gamma_phi < 1e-4 * p.g);
}

TEST_CASE("fit objective is unimodal") {
  const SystemParams p = preset("qd");
  const ReferenceDynamics ref =
      self_generated(p, CalibrationScenario::undriven_jc_from_G1, 0.05 * p.g, 60 / p.g, 1200);
  std::vector<Real> values;
  for (int k = 0; k <= 60; ++k) {
    const Real rate = p.g * std::pow(10.0, -6 + 7.0 * k / 60);
    values.push_back(envelope_mismatch(ref, p, rate));
  }
  int turns = 0;
  int sign = -1;
  for (std::size_t k = 1; k < values.size(); ++k) {
    const Real diff = values[k] - values[k - 1];
    if (std::abs(diff) < 1e-12) continue;  // flat tail at small rates
    const int s = diff > 0 ? 1 : -1;
    if (s != sign) {
      ++turns;
      sign = s;
    }
  }
  CHECK(turns == 1);
}

TEST_CASE("quadratic drive scaling") {
  CHECK(scale_dephasing_rate(1, 1, 2) == doctest::Approx(4.0));
  CHECK(scale_dephasing_rate(0.3, 5, 5) == doctest::Approx(0.3));
  CHECK(scale_dephasing_rate(0.1, 32, 16) == doctest::Approx(0.025));
  CHECK_THROWS_AS(scale_dephasing_rate(0.1, 0, 16), InvalidArgument);
}

TEST_CASE("reference CSV ingestion") {
  const auto dir = std::filesystem::temp_directory_path() / "nbundle_cal_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "ref.csv").string();
  {
    std::ofstream f(path);
    f << "# produced elsewhere\ntime_ns,occupation\n0,0\n0.5,0.4\n1.0,0.9\n# trailing comment\n1.5,0.3\n";
  }
  const ReferenceDynamics r = load_reference_csv(path, CalibrationScenario::undriven_jc_from_G1, TimeUnit::ps);
  REQUIRE(r.times.size() == 4);
  CHECK(r.times[2] == doctest::Approx(1000.0));
  CHECK(r.exciton_occupation[1] == doctest::Approx(0.4));
  CHECK(r.scenario == CalibrationScenario::undriven_jc_from_G1);

  {
    std::ofstream f(path);
    f << "t,occupation\n0,0\n1,1\n2,0\n";
  }
  CHECK_THROWS_AS(load_reference_csv(path, CalibrationScenario::undriven_jc_from_G1, TimeUnit::ps),
                  InvalidArgument);
  {
    std::ofstream f(path);
    f << "time_ps,occupation\n0,0\n1,1.5\n2,0\n";
  }
  CHECK_THROWS_AS(load_reference_csv(path, CalibrationScenario::undriven_jc_from_G1, TimeUnit::ps),
                  InvalidArgument);
  {
    std::ofstream f(path);
    f << "time_ps,occupation\n0,0\n2,1\n1,0\n";
  }
  CHECK_THROWS_AS(load_reference_csv(path, CalibrationScenario::undriven_jc_from_G1, TimeUnit::ps),
                  InvalidArgument);
  CHECK_THROWS_AS(load_reference_csv((dir / "missing.csv").string(), CalibrationScenario::driven_jc_from_G0,
                                     TimeUnit::ps),
                  InvalidArgument);
  std::filesystem::remove_all(dir);
}
