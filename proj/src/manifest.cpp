#include "fluxmech/manifest.hpp"

#include <fstream>

#include <json.hpp>

#include "fluxmech/errors.hpp"

namespace fluxmech {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[h & 0xF];
    h >>= 4;
  }
  return out;
}

std::string run_marker(std::uint64_t config_hash) {
  return "# run " + hex64(config_hash) + "\n";
}

void RunManifest::add_output(const std::string& path, std::string_view content) {
  outputs.push_back({path, hex64(fnv1a64(content)), content.size()});
}

std::uint64_t RunManifest::config_hash_value() const {
  return std::stoull(config_hash, nullptr, 16);
}

RunManifest make_manifest(const std::string& command, const std::string& config_text) {
  RunManifest m;
  m.command = command;
  m.version = kVersion;
  m.config_text = config_text;
  m.config_hash = hex64(fnv1a64(config_text));
  return m;
}

std::string manifest_to_json(const RunManifest& m) {
  nlohmann::json j;
  j["command"] = m.command;
  j["version"] = m.version;
  j["config_text"] = m.config_text;
  j["config_hash"] = m.config_hash;
  j["outputs"] = nlohmann::json::array();
  for (const OutputRecord& o : m.outputs)
    j["outputs"].push_back({{"file", o.file}, {"hash", o.hash}, {"bytes", o.bytes}});
  j["wall_ms"] = m.wall_ms;
  return j.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw io_error(std::string("manifest parse failure: ") + e.what());
  }
  try {
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.version = j.at("version").get<std::string>();
    m.config_text = j.at("config_text").get<std::string>();
    m.config_hash = j.at("config_hash").get<std::string>();
    for (const auto& o : j.at("outputs"))
      m.outputs.push_back({o.at("file").get<std::string>(), o.at("hash").get<std::string>(),
                           o.at("bytes").get<std::uint64_t>()});
    m.wall_ms = j.at("wall_ms").get<double>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw io_error(std::string("manifest missing or mistyped field: ") + e.what());
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open '" + path + "' for reading");
  std::string out((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw io_error("error while reading '" + path + "'");
  return out;
}

void write_text_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw io_error("error while writing '" + path + "'");
}

} // namespace fluxmech
