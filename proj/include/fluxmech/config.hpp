#pragma once

#include <map>
#include <string>

#include "fluxmech/types.hpp"

namespace fluxmech {

/// One parsed key/value with the line it came from (0 for overrides and
/// replayed entries), kept for error diagnostics.
struct ConfigEntry {
  std::string value;
  int line = 0;
};

/// Flat-sectioned key/value configuration. Sections group related keys
/// ([drive], [qubit], [mech], [run]); `#` and `;` start comments; values
/// keep internal spaces but are trimmed at both ends. Keys are unique per
/// section (a duplicate is a parse error), and `--set section.key=value`
/// overrides arrive through set_override().
class ParsedConfig {
 public:
  using Section = std::map<std::string, ConfigEntry>;

  /// Parses configuration text. `source` names the origin (file path or
  /// "<override>") used in diagnostics.
  static ParsedConfig from_text(const std::string& text, const std::string& source);

  /// Reads and parses a file; missing/unreadable file -> io_error.
  static ParsedConfig from_file(const std::string& path);

  /// Applies a dotted override "section.key=value" (malformed -> config_error).
  void set_override(const std::string& dotted);

  [[nodiscard]] bool has(const std::string& section, const std::string& key) const;

  /// Typed readers. The require_ forms throw config_error when the key is
  /// missing; the get_ forms fall back to the supplied default. All throw
  /// config_error with source/line context on malformed numbers.
  [[nodiscard]] std::string get_string(const std::string& section, const std::string& key,
                                       const std::string& fallback) const;
  [[nodiscard]] double get_double(const std::string& section, const std::string& key,
                                  double fallback) const;
  [[nodiscard]] double require_double(const std::string& section,
                                      const std::string& key) const;
  [[nodiscard]] int get_int(const std::string& section, const std::string& key,
                            int fallback) const;

  [[nodiscard]] const std::map<std::string, Section>& sections() const {
    return sections_;
  }
  [[nodiscard]] const std::string& source() const { return source_; }

  /// Canonical dump of every resolved entry as sorted `section.key=value`
  /// lines; the run content hash is computed over this text.
  [[nodiscard]] std::string resolved_text() const;

 private:
  const ConfigEntry* find(const std::string& section, const std::string& key) const;
  [[noreturn]] void fail(const std::string& section, const std::string& key,
                         const ConfigEntry* entry, const std::string& reason) const;

  std::map<std::string, Section> sections_;
  std::string source_ = "<empty>";
};

/// Builds the physical model from the [drive], [qubit] and [mech] sections,
/// with [run] unit_scale applied. Unknown keys in the three physics
/// sections are rejected so typos cannot silently fall back to defaults.
[[nodiscard]] ModelConfig model_from_config(const ParsedConfig& cfg);

} // namespace fluxmech
