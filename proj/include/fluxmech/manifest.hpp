#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace fluxmech {

/// Library/tool version recorded in run manifests.
inline constexpr const char* kVersion = "0.1.0";

/// FNV-1a 64-bit hash of a byte string. Stable across platforms and runs;
/// used to fingerprint configurations and output files.
[[nodiscard]] std::uint64_t fnv1a64(std::string_view bytes);

/// 16-digit lowercase hex rendering of a 64-bit hash.
[[nodiscard]] std::string hex64(std::uint64_t h);

/// Marker line prepended to every CSV output: "# run <config-hash>". Ties a
/// data file back to the manifest of the run that produced it.
[[nodiscard]] std::string run_marker(std::uint64_t config_hash);

/// Hash and size of one file written by a run.
struct OutputRecord {
  std::string file;  ///< path as given to the writer
  std::string hash;  ///< hex64 FNV-1a of the file content
  std::uint64_t bytes = 0;
};

/// Reproducibility record of a single tool invocation: the resolved
/// configuration, its content hash, and every artifact written. Byte-equal
/// configurations hash equally, so reruns are checkable output-by-output.
struct RunManifest {
  std::string command;          ///< subcommand that ran
  std::string version;          ///< tool version
  std::string config_text;      ///< canonical resolved configuration
  std::string config_hash;      ///< hex64 FNV-1a of config_text
  std::vector<OutputRecord> outputs;
  double wall_ms = 0.0;         ///< wall-clock duration of the run

  /// Records `content` as the payload written to `path`.
  void add_output(const std::string& path, std::string_view content);

  /// Numeric form of config_hash for run_marker().
  [[nodiscard]] std::uint64_t config_hash_value() const;
};

/// Starts a manifest for `command` over the canonical configuration text.
[[nodiscard]] RunManifest make_manifest(const std::string& command,
                                        const std::string& config_text);

/// JSON rendering (stable key order) and its inverse.
[[nodiscard]] std::string manifest_to_json(const RunManifest& m);
[[nodiscard]] RunManifest manifest_from_json(const std::string& text);

/// Whole-file text IO; failures throw io_error.
[[nodiscard]] std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

} // namespace fluxmech
