#include "nbundle/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "nbundle/bundle_theory.hpp"

namespace nbundle {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// Splits "<number> <unit>" (space optional). Returns false if no number leads.
bool split_quantity(std::string_view text, Real& value, std::string& unit) {
  const std::string s = trim(text);
  const char* begin = s.c_str();
  char* end = nullptr;
  value = std::strtod(begin, &end);
  if (end == begin) return false;
  unit = trim(std::string_view(end));
  return true;
}

}  // namespace

RunConfig RunConfig::parse(std::string_view text, std::string source) {
  RunConfig cfg;
  cfg.source_ = std::move(source);
  std::istringstream in{std::string(text)};
  std::string raw;
  std::string section;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(cfg.source_ + ":" + std::to_string(lineno) + ": malformed section header");
      }
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError(cfg.source_ + ":" + std::to_string(lineno) + ": empty section name");
      cfg.data_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(cfg.source_ + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    if (section.empty()) {
      throw ConfigError(cfg.source_ + ":" + std::to_string(lineno) + ": entry outside any [section]");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ConfigError(cfg.source_ + ":" + std::to_string(lineno) + ": empty key");
    auto& sec = cfg.data_[section];
    if (sec.count(key)) {
      throw ConfigError(cfg.source_ + ":" + std::to_string(lineno) + ": duplicate key '" + section + "." + key + "'");
    }
    sec[key] = ConfigEntry{value, lineno};
  }
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

void RunConfig::set_override(std::string_view assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string_view::npos || dot == std::string_view::npos || dot > eq) {
    throw ConfigError("override '" + std::string(assignment) + "' must look like section.key=value");
  }
  set(trim(assignment.substr(0, dot)), trim(assignment.substr(dot + 1, eq - dot - 1)),
      trim(assignment.substr(eq + 1)));
}

void RunConfig::set(const std::string& section, const std::string& key, std::string value) {
  data_[section][key] = ConfigEntry{std::move(value), 0};
}

bool RunConfig::has(const std::string& section, const std::string& key) const { return entry(section, key) != nullptr; }

const ConfigEntry* RunConfig::entry(const std::string& section, const std::string& key) const {
  const auto s = data_.find(section);
  if (s == data_.end()) return nullptr;
  const auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

std::vector<std::string> RunConfig::keys(const std::string& section) const {
  std::vector<std::string> out;
  if (const auto s = data_.find(section); s != data_.end()) {
    for (const auto& [k, v] : s->second) out.push_back(k);
  }
  return out;
}

std::vector<std::string> RunConfig::sections() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : data_) out.push_back(k);
  return out;
}

void RunConfig::fail(const std::string& section, const std::string& key, const std::string& msg) const {
  const ConfigEntry* e = entry(section, key);
  std::string where = e && e->line > 0 ? source_ + ":" + std::to_string(e->line) : std::string("command line");
  throw ConfigError(where + ": " + section + "." + key + ": " + msg);
}

std::string RunConfig::string_or(const std::string& section, const std::string& key, std::string fallback) const {
  const ConfigEntry* e = entry(section, key);
  return e ? e->value : fallback;
}

int RunConfig::int_or(const std::string& section, const std::string& key, int fallback) const {
  const ConfigEntry* e = entry(section, key);
  if (!e) return fallback;
  int v = 0;
  const auto* end = e->value.data() + e->value.size();
  const auto res = std::from_chars(e->value.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) fail(section, key, "expected an integer, got '" + e->value + "'");
  return v;
}

Real RunConfig::real_or(const std::string& section, const std::string& key, Real fallback) const {
  const ConfigEntry* e = entry(section, key);
  if (!e) return fallback;
  char* end = nullptr;
  const Real v = std::strtod(e->value.c_str(), &end);
  if (end == e->value.c_str() || *end != '\0') fail(section, key, "expected a number, got '" + e->value + "'");
  return v;
}

bool RunConfig::bool_or(const std::string& section, const std::string& key, bool fallback) const {
  const ConfigEntry* e = entry(section, key);
  if (!e) return fallback;
  if (e->value == "true" || e->value == "yes" || e->value == "1" || e->value == "on") return true;
  if (e->value == "false" || e->value == "no" || e->value == "0" || e->value == "off") return false;
  fail(section, key, "expected true/false, got '" + e->value + "'");
}

Real parse_rate(std::string_view text, const SystemParams& ctx) {
  Real v = 0;
  std::string unit;
  if (!split_quantity(text, v, unit)) throw ConfigError("'" + std::string(text) + "' is not a number with a unit");
  if (unit.empty()) {
    throw ConfigError("'" + std::string(text) +
                      "' has no unit (use meV, ueV, neV, per_ps, per_ns, per_us, g or gamma)");
  }
  const TimeUnit t = ctx.units.time;
  if (unit == "meV") return UnitConvention::energy_to_rate(v, EnergyUnit::meV, t);
  if (unit == "ueV") return UnitConvention::energy_to_rate(v, EnergyUnit::ueV, t);
  if (unit == "neV") return UnitConvention::energy_to_rate(v, EnergyUnit::neV, t);
  if (unit == "per_ps") return v * UnitConvention::rate_factor(TimeUnit::ps, t);
  if (unit == "per_ns") return v * UnitConvention::rate_factor(TimeUnit::ns, t);
  if (unit == "per_us") return v * UnitConvention::rate_factor(TimeUnit::us, t);
  if (unit == "g") return v * ctx.g;
  if (unit == "gamma") {
    if (!(ctx.gamma > 0)) throw ConfigError("'gamma' unit used while gamma = 0");
    return v * ctx.gamma;
  }
  throw ConfigError("unknown unit '" + unit + "' in '" + std::string(text) + "'");
}

Real parse_time(std::string_view text, const SystemParams& ctx) {
  Real v = 0;
  std::string unit;
  if (!split_quantity(text, v, unit)) throw ConfigError("'" + std::string(text) + "' is not a number with a unit");
  const TimeUnit t = ctx.units.time;
  // A duration in unit u is multiplied by (per-t rate factor of u) inverse.
  if (unit == "ps") return v / UnitConvention::rate_factor(TimeUnit::ps, t);
  if (unit == "ns") return v / UnitConvention::rate_factor(TimeUnit::ns, t);
  if (unit == "us") return v / UnitConvention::rate_factor(TimeUnit::us, t);
  throw ConfigError("'" + std::string(text) + "' needs a time unit (ps, ns or us)");
}

std::optional<Real> RunConfig::rate(const std::string& section, const std::string& key, const SystemParams& ctx) const {
  const ConfigEntry* e = entry(section, key);
  if (!e) return std::nullopt;
  try {
    return parse_rate(e->value, ctx);
  } catch (const ConfigError& err) {
    fail(section, key, err.what());
  }
}

std::optional<Real> RunConfig::time(const std::string& section, const std::string& key, const SystemParams& ctx) const {
  const ConfigEntry* e = entry(section, key);
  if (!e) return std::nullopt;
  try {
    return parse_time(e->value, ctx);
  } catch (const ConfigError& err) {
    fail(section, key, err.what());
  }
}

void RunConfig::require_known(const std::string& section, const std::set<std::string>& allowed) const {
  for (const std::string& k : keys(section)) {
    if (!allowed.count(k)) fail(section, k, "unknown key");
  }
}

namespace {

TimeUnit parse_time_unit(const RunConfig& c, const std::string& v) {
  if (v == "ps") return TimeUnit::ps;
  if (v == "ns") return TimeUnit::ns;
  if (v == "us") return TimeUnit::us;
  c.fail("system", "time_unit", "expected ps, ns or us");
}

EnergyUnit parse_energy_unit(const RunConfig& c, const std::string& v) {
  if (v == "meV") return EnergyUnit::meV;
  if (v == "ueV") return EnergyUnit::ueV;
  if (v == "neV") return EnergyUnit::neV;
  c.fail("system", "energy_unit", "expected meV, ueV or neV");
}

}  // namespace

SystemParams resolve_system(const RunConfig& c) {
  c.require_known("system", {"preset", "time_unit", "energy_unit", "g", "f", "gamma", "kappa", "gamma_phi",
                             "delta_LX", "delta_CX"});
  SystemParams p;
  const std::string preset_name = c.string_or("system", "preset", "");
  const bool explicit_delta_LX = c.has("system", "delta_LX");
  if (!preset_name.empty()) {
    try {
      p = preset(preset_name);
    } catch (const InvalidArgument& e) {
      c.fail("system", "preset", e.what());
    }
  } else {
    if (!c.has("system", "g")) c.fail("system", "g", "required when no preset is given");
    p.label = "custom";
    p.units.time = parse_time_unit(c, c.string_or("system", "time_unit", "ps"));
    p.units.energy = parse_energy_unit(c, c.string_or("system", "energy_unit", "meV"));
    p.f = 0;
  }
  if (!preset_name.empty() && (c.has("system", "time_unit") || c.has("system", "energy_unit"))) {
    c.fail("system", "time_unit", "unit system is fixed by the preset");
  }

  // g first: the relative unit 'g' refers to the resolved coupling.
  if (c.has("system", "g")) {
    Real v = 0;
    std::string unit;
    if (split_quantity(c.string_or("system", "g", ""), v, unit) && (unit == "g" || unit == "gamma")) {
      c.fail("system", "g", "g must be given in absolute units");
    }
    p.g = *c.rate("system", "g", p);
  }
  if (auto v = c.rate("system", "gamma", p)) p.gamma = *v;
  if (auto v = c.rate("system", "kappa", p)) p.kappa = *v;
  if (auto v = c.rate("system", "gamma_phi", p)) p.gamma_phi = *v;
  if (auto v = c.rate("system", "f", p)) p.f = *v;
  if (auto v = c.rate("system", "delta_CX", p)) p.delta_CX = *v;

  if (explicit_delta_LX) {
    const std::string v = c.string_or("system", "delta_LX", "");
    try {
      if (v == "one_photon") {
        p.delta_LX = one_photon_resonance_detuning(p.f, p.delta_CX);
      } else if (v.rfind("bundle(", 0) == 0 && v.back() == ')') {
        const int n = std::stoi(v.substr(7, v.size() - 8));
        p.delta_LX = bundle_resonance_detuning(n, p.f, p.delta_CX);
      } else {
        p.delta_LX = parse_rate(v, p);
      }
    } catch (const ConfigError& e) {
      c.fail("system", "delta_LX", e.what());
    } catch (const std::exception& e) {
      c.fail("system", "delta_LX", e.what());
    }
  } else if (!preset_name.empty() && p.f > 0) {
    // Presets default to the N=2 resonance of the (possibly overridden) drive.
    p.delta_LX = bundle_resonance_detuning(2, p.f, p.delta_CX);
  }
  try {
    p.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(c.source() + ": [system]: " + e.what());
  }
  return p;
}

}  // namespace nbundle
