#include "fluxmech/config.hpp"

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "fluxmech/errors.hpp"

namespace fluxmech {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string where(const std::string& source, int line) {
  if (line > 0) return source + ":" + std::to_string(line);
  return source;
}

[[noreturn]] void parse_fail(const std::string& source, int line, const std::string& msg) {
  throw config_error(where(source, line) + ": " + msg);
}

} // namespace

ParsedConfig ParsedConfig::from_text(const std::string& text, const std::string& source) {
  ParsedConfig cfg;
  cfg.source_ = source;

  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const size_t comment = raw.find_first_of("#;");
    if (comment != std::string::npos) raw.erase(comment);
    const std::string s = trim(raw);
    if (s.empty()) continue;

    if (s.front() == '[') {
      if (s.back() != ']' || s.size() < 3)
        parse_fail(source, line, "malformed section header '" + s + "'");
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty()) parse_fail(source, line, "empty section name");
      cfg.sections_[section]; // a section may legitimately stay empty
      continue;
    }

    const size_t eq = s.find('=');
    if (eq == std::string::npos)
      parse_fail(source, line, "expected 'key = value', got '" + s + "'");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) parse_fail(source, line, "missing key before '='");
    if (section.empty())
      parse_fail(source, line, "key '" + key + "' outside any [section]");

    auto [it, inserted] = cfg.sections_[section].emplace(key, ConfigEntry{value, line});
    if (!inserted)
      parse_fail(source, line,
                 "duplicate key '" + key + "' in [" + section + "] (first at line " +
                     std::to_string(it->second.line) + ")");
  }
  return cfg;
}

ParsedConfig ParsedConfig::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw io_error("error while reading config file '" + path + "'");
  return from_text(buf.str(), path);
}

void ParsedConfig::set_override(const std::string& dotted) {
  const size_t eq = dotted.find('=');
  const size_t dot = dotted.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq)
    throw config_error("override '" + dotted + "': expected section.key=value");
  const std::string section = trim(dotted.substr(0, dot));
  const std::string key = trim(dotted.substr(dot + 1, eq - dot - 1));
  const std::string value = trim(dotted.substr(eq + 1));
  if (section.empty() || key.empty())
    throw config_error("override '" + dotted + "': empty section or key");
  sections_[section][key] = ConfigEntry{value, 0};
}

const ConfigEntry* ParsedConfig::find(const std::string& section,
                                      const std::string& key) const {
  const auto sit = sections_.find(section);
  if (sit == sections_.end()) return nullptr;
  const auto kit = sit->second.find(key);
  if (kit == sit->second.end()) return nullptr;
  return &kit->second;
}

bool ParsedConfig::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

void ParsedConfig::fail(const std::string& section, const std::string& key,
                        const ConfigEntry* entry, const std::string& reason) const {
  const int line = entry != nullptr ? entry->line : 0;
  throw config_error(where(source_, line) + ": [" + section + "] " + key + ": " + reason);
}

std::string ParsedConfig::get_string(const std::string& section, const std::string& key,
                                     const std::string& fallback) const {
  const ConfigEntry* e = find(section, key);
  return e != nullptr ? e->value : fallback;
}

double ParsedConfig::get_double(const std::string& section, const std::string& key,
                                double fallback) const {
  const ConfigEntry* e = find(section, key);
  if (e == nullptr) return fallback;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(e->value.c_str(), &end);
  if (end == e->value.c_str() || *end != '\0')
    fail(section, key, e, "'" + e->value + "' is not a number");
  if (errno == ERANGE) fail(section, key, e, "'" + e->value + "' is out of range");
  return v;
}

double ParsedConfig::require_double(const std::string& section,
                                    const std::string& key) const {
  if (!has(section, key))
    throw config_error(source_ + ": missing required key [" + section + "] " + key);
  return get_double(section, key, 0.0);
}

int ParsedConfig::get_int(const std::string& section, const std::string& key,
                          int fallback) const {
  const ConfigEntry* e = find(section, key);
  if (e == nullptr) return fallback;
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(e->value.c_str(), &end, 10);
  if (end == e->value.c_str() || *end != '\0')
    fail(section, key, e, "'" + e->value + "' is not an integer");
  if (errno == ERANGE || v < std::numeric_limits<int>::min() ||
      v > std::numeric_limits<int>::max())
    fail(section, key, e, "'" + e->value + "' is out of integer range");
  return static_cast<int>(v);
}

std::string ParsedConfig::resolved_text() const {
  std::string out;
  for (const auto& [section, entries] : sections_)
    for (const auto& [key, entry] : entries)
      out += section + "." + key + "=" + entry.value + "\n";
  return out;
}

namespace {

/// Rejects keys in `section` that the model does not know about, so a typo
/// cannot silently fall back to a default value.
void check_known(const ParsedConfig& cfg, const std::string& section,
                 std::initializer_list<const char*> known) {
  const auto sit = cfg.sections().find(section);
  if (sit == cfg.sections().end()) return;
  for (const auto& [key, entry] : sit->second) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok)
      throw config_error(cfg.source() +
                         (entry.line > 0 ? ":" + std::to_string(entry.line) : "") +
                         ": unknown key '" + key + "' in [" + section + "]");
  }
}

} // namespace

ModelConfig model_from_config(const ParsedConfig& cfg) {
  check_known(cfg, "drive",
              {"eps0_phi_e0", "eps0_phi_e1", "omega_drive", "n_photon", "delta_gap"});
  check_known(cfg, "qubit", {"gamma1", "gamma2", "sigma_z_eq"});
  check_known(cfg, "mech", {"omega_m", "gamma_m", "g"});

  ModelConfig m;
  m.drive.eps0_phi_e0 = cfg.get_double("drive", "eps0_phi_e0", m.drive.eps0_phi_e0);
  m.drive.eps0_phi_e1 = cfg.get_double("drive", "eps0_phi_e1", m.drive.eps0_phi_e1);
  m.drive.omega_drive = cfg.get_double("drive", "omega_drive", m.drive.omega_drive);
  m.drive.n_photon = cfg.get_int("drive", "n_photon", m.drive.n_photon);
  m.drive.delta_gap = cfg.get_double("drive", "delta_gap", m.drive.delta_gap);
  m.qubit.gamma1 = cfg.get_double("qubit", "gamma1", m.qubit.gamma1);
  m.qubit.gamma2 = cfg.get_double("qubit", "gamma2", m.qubit.gamma2);
  m.qubit.sigma_z_eq = cfg.get_double("qubit", "sigma_z_eq", m.qubit.sigma_z_eq);
  m.mech.omega_m = cfg.get_double("mech", "omega_m", m.mech.omega_m);
  m.mech.gamma_m = cfg.get_double("mech", "gamma_m", m.mech.gamma_m);
  m.mech.g = cfg.get_double("mech", "g", m.mech.g);
  m.unit_scale = cfg.get_double("run", "unit_scale", m.unit_scale);
  m.validate();
  return m;
}

} // namespace fluxmech
