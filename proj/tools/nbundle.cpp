// Command-line front end: nbundle <steady|sweep|traj|calibrate|theory> [options]

#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "nbundle/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"N-photon bundle emission: steady states, sweeps, trajectories, calibration"};
  app.set_version_flag("--version", std::string(NBUNDLE_VERSION));
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::vector<std::string> overrides;
  nbundle::GlobalOptions options;
  std::uint64_t seed = 0;

  app.add_option("-c,--config", config_path, "INI-style run configuration");
  app.add_option("--set", overrides, "Override a config entry, section.key=value (repeatable)");
  app.add_option("-j,--threads", options.threads, "Worker threads (0 = hardware concurrency)");
  auto* seed_opt = app.add_option("--seed", seed, "Master seed for trajectories");
  app.add_option("-o,--out-dir", options.out_dir, "Directory for output files");

  std::string reference, scenario;
  const std::pair<const char*, const char*> commands[] = {
      {"steady", "Steady state, photon statistics and optional Wigner map"},
      {"sweep", "Steady-state statistics along a detuning, kappa or gamma_phi axis"},
      {"traj", "Quantum-jump trajectories and bundle statistics"},
      {"calibrate", "Fit the phenomenological dephasing rate to reference dynamics"},
      {"theory", "Analytic resonance table and ideal bundle distribution"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    if (std::string(name) == "calibrate") {
      sub->add_option("--reference", reference, "Reference CSV (time_<unit>,occupation)");
      sub->add_option("--scenario", scenario, "a, b or c");
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : nbundle::kExitConfig;
  }
  if (*seed_opt) options.seed = seed;

  std::string command = app.get_subcommands().front()->get_name();
  try {
    nbundle::RunConfig config =
        config_path.empty() ? nbundle::RunConfig::parse("", "<empty>") : nbundle::RunConfig::load(config_path);
    for (const auto& o : overrides) config.set_override(o);
    if (!reference.empty()) config.set("calibrate", "reference", reference);
    if (!scenario.empty()) config.set("calibrate", "scenario", scenario);
    return nbundle::run_command(command, config, options, std::cout, std::cerr);
  } catch (const nbundle::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return nbundle::kExitConfig;
  }
}
