#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "nbundle/model.hpp"

namespace nbundle {

struct ConfigEntry {
  std::string value;
  int line = 0;  // 0 for command-line overrides
};

/// Sectioned key-value configuration:
///
///   # comment
///   [system]
///   preset = qd
///   f = 32 g
///   delta_LX = bundle(2)
///
/// Energy- and rate-valued entries must carry a unit suffix: meV, ueV, neV,
/// per_ps, per_ns, per_us, or the relative units g and gamma. Times use
/// ps, ns or us.
class RunConfig {
 public:
  static RunConfig parse(std::string_view text, std::string source = "<config>");
  static RunConfig load(const std::string& path);

  /// Command-line override "section.key=value".
  void set_override(std::string_view assignment);
  void set(const std::string& section, const std::string& key, std::string value);

  bool has(const std::string& section, const std::string& key) const;
  const ConfigEntry* entry(const std::string& section, const std::string& key) const;
  std::vector<std::string> keys(const std::string& section) const;
  std::vector<std::string> sections() const;

  std::string string_or(const std::string& section, const std::string& key, std::string fallback) const;
  int int_or(const std::string& section, const std::string& key, int fallback) const;
  Real real_or(const std::string& section, const std::string& key, Real fallback) const;
  bool bool_or(const std::string& section, const std::string& key, bool fallback) const;

  /// Rate (angular frequency) in the time unit of `ctx`; relative units use ctx.g / ctx.gamma.
  std::optional<Real> rate(const std::string& section, const std::string& key, const SystemParams& ctx) const;
  /// Time in the time unit of `ctx`.
  std::optional<Real> time(const std::string& section, const std::string& key, const SystemParams& ctx) const;

  /// Rejects keys of `section` outside `allowed`.
  void require_known(const std::string& section, const std::set<std::string>& allowed) const;

  [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& msg) const;

  const std::string& source() const { return source_; }

 private:
  std::string source_;
  std::map<std::string, std::map<std::string, ConfigEntry>> data_;
};

/// Parses "<number> <unit>" for rates/energies, relative to `ctx`. Throws ConfigError.
Real parse_rate(std::string_view text, const SystemParams& ctx);
Real parse_time(std::string_view text, const SystemParams& ctx);

/// The [system] section: a preset (or explicit parameters with time_unit /
/// energy_unit) plus per-parameter overrides. delta_LX additionally accepts
/// `bundle(N)` and `one_photon`.
SystemParams resolve_system(const RunConfig& config);

}  // namespace nbundle
