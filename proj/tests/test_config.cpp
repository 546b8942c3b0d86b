#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <string>

#include "fluxmech/config.hpp"
#include "fluxmech/errors.hpp"
#include "fluxmech/manifest.hpp"

using namespace fluxmech;

namespace {

const char* kSample = R"(# reference configuration
[drive]
eps0_phi_e0 = -1.0   ; detuning below resonance
eps0_phi_e1 = 0.0
delta_gap   = 1.0

[qubit]
gamma1 = 0.002
gamma2 = 0.002

[mech]
omega_m = 1.4142135623730951
gamma_m = 2.8e-3
g       = 0.004

[run]
unit_scale = 1.0
t_end      = 500
)";

} // namespace

TEST_CASE("config parsing") {
  const ParsedConfig cfg = ParsedConfig::from_text(kSample, "sample.cfg");

  SUBCASE("values survive comments and alignment whitespace") {
    CHECK(cfg.get_double("drive", "eps0_phi_e0", 0.0) == -1.0);
    CHECK(cfg.get_double("mech", "gamma_m", 0.0) == 2.8e-3);
    CHECK(cfg.get_string("run", "t_end", "") == "500");
    CHECK(cfg.has("qubit", "gamma1"));
    CHECK_FALSE(cfg.has("qubit", "gamma_1"));
  }

  SUBCASE("fallbacks fill missing keys, require_double does not") {
    CHECK(cfg.get_double("qubit", "sigma_z_eq", -1.0) == -1.0);
    CHECK(cfg.get_int("drive", "n_photon", 7) == 7);
    CHECK(cfg.require_double("mech", "g") == 0.004);
    CHECK_THROWS_AS((void)cfg.require_double("mech", "missing"), config_error);
  }

  SUBCASE("malformed numbers report file and line") {
    const ParsedConfig bad = ParsedConfig::from_text("[mech]\ng = fast\n", "bad.cfg");
    CHECK_THROWS_WITH_AS((void)bad.get_double("mech", "g", 0.0),
                         "bad.cfg:2: [mech] g: 'fast' is not a number", config_error);
    const ParsedConfig frac = ParsedConfig::from_text("[drive]\nn_photon = 1.5\n", "f.cfg");
    CHECK_THROWS_AS((void)frac.get_int("drive", "n_photon", 0), config_error);
  }
}

TEST_CASE("config parse diagnostics carry line numbers") {
  CHECK_THROWS_WITH_AS((void)ParsedConfig::from_text("[drive]\nomega_drive\n", "x.cfg"),
                       "x.cfg:2: expected 'key = value', got 'omega_drive'", config_error);
  CHECK_THROWS_WITH_AS((void)ParsedConfig::from_text("g = 1\n", "x.cfg"),
                       "x.cfg:1: key 'g' outside any [section]", config_error);
  CHECK_THROWS_AS((void)ParsedConfig::from_text("[mech\ng = 1\n", "x.cfg"), config_error);
  CHECK_THROWS_AS((void)ParsedConfig::from_text("[]\n", "x.cfg"), config_error);
  CHECK_THROWS_WITH_AS(
      (void)ParsedConfig::from_text("[mech]\ng = 1\ng = 2\n", "x.cfg"),
      "x.cfg:3: duplicate key 'g' in [mech] (first at line 2)", config_error);
  CHECK_THROWS_AS((void)ParsedConfig::from_file("/nonexistent/path.cfg"), io_error);
}

TEST_CASE("config overrides") {
  ParsedConfig cfg = ParsedConfig::from_text(kSample, "sample.cfg");

  SUBCASE("override replaces and inserts") {
    cfg.set_override("mech.g=0.008");
    cfg.set_override("qubit.sigma_z_eq = -0.5");
    CHECK(cfg.get_double("mech", "g", 0.0) == 0.008);
    CHECK(cfg.get_double("qubit", "sigma_z_eq", -1.0) == -0.5);
  }

  SUBCASE("malformed overrides are rejected") {
    CHECK_THROWS_AS(cfg.set_override("mech.g"), config_error);
    CHECK_THROWS_AS(cfg.set_override("g=1"), config_error);
    CHECK_THROWS_AS(cfg.set_override(".g=1"), config_error);
    CHECK_THROWS_AS(cfg.set_override("mech.=1"), config_error);
  }
}

TEST_CASE("model construction from config") {
  SUBCASE("all sections map onto the model") {
    const ParsedConfig cfg = ParsedConfig::from_text(kSample, "sample.cfg");
    const ModelConfig m = model_from_config(cfg);
    CHECK(m.drive.eps0_phi_e0 == -1.0);
    CHECK(m.drive.delta_gap == 1.0);
    CHECK(m.qubit.gamma1 == 0.002);
    CHECK(m.qubit.sigma_z_eq == -1.0);
    CHECK(m.mech.omega_m == doctest::Approx(1.4142135623730951));
    CHECK(m.mech.g == 0.004);
    CHECK(m.unit_scale == 1.0);
  }

  SUBCASE("unknown physics keys are rejected, run keys are free-form") {
    ParsedConfig cfg = ParsedConfig::from_text(kSample, "sample.cfg");
    cfg.set_override("run.output=traj.csv");
    CHECK_NOTHROW((void)model_from_config(cfg));
    cfg.set_override("mech.quality_factor=1e5");
    CHECK_THROWS_WITH_AS((void)model_from_config(cfg),
                         "sample.cfg: unknown key 'quality_factor' in [mech]",
                         config_error);
  }

  SUBCASE("invalid physics still fails model validation") {
    ParsedConfig cfg = ParsedConfig::from_text(kSample, "sample.cfg");
    cfg.set_override("qubit.gamma1=-1");
    CHECK_THROWS_AS((void)model_from_config(cfg), config_error);
  }
}

TEST_CASE("canonical resolved text and hashing") {
  const ParsedConfig a = ParsedConfig::from_text(kSample, "sample.cfg");
  // same content, different order / comments / spacing
  ParsedConfig b = ParsedConfig::from_text(
      "[run]\nt_end=500\nunit_scale=1.0\n[mech]\ng=0.004\ngamma_m=2.8e-3\n"
      "omega_m=1.4142135623730951\n[qubit]\ngamma2=0.002\ngamma1=0.002\n"
      "[drive]\ndelta_gap=1.0\neps0_phi_e1=0.0\neps0_phi_e0=-1.0\n",
      "other.cfg");
  CHECK(a.resolved_text() == b.resolved_text());
  CHECK(fnv1a64(a.resolved_text()) == fnv1a64(b.resolved_text()));

  b.set_override("mech.g=0.005");
  CHECK(fnv1a64(a.resolved_text()) != fnv1a64(b.resolved_text()));

  // resolved lines are sorted section.key=value, one per line
  const std::string text = a.resolved_text();
  CHECK(text.substr(0, text.find('\n')) == "drive.delta_gap=1.0");
  CHECK(text.find("mech.g=0.004\n") != std::string::npos);
}

TEST_CASE("hash primitives") {
  // FNV-1a 64 reference vectors
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
  CHECK(hex64(0x0) == "0000000000000000");
  CHECK(hex64(0x85944171f73967e8ULL) == "85944171f73967e8");
  CHECK(run_marker(0xdeadbeefULL) == "# run 00000000deadbeef\n");
}

TEST_CASE("run manifest") {
  RunManifest m = make_manifest("simulate", "mech.g=0.004\n");
  CHECK(m.version == kVersion);
  CHECK(m.config_hash == hex64(fnv1a64("mech.g=0.004\n")));
  CHECK(m.config_hash_value() == fnv1a64("mech.g=0.004\n"));
  m.add_output("traj.csv", "# run abc\n1,2,3\n");
  m.wall_ms = 12.5;

  SUBCASE("JSON round trip preserves every field") {
    const std::string json = manifest_to_json(m);
    const RunManifest r = manifest_from_json(json);
    CHECK(r.command == m.command);
    CHECK(r.version == m.version);
    CHECK(r.config_text == m.config_text);
    CHECK(r.config_hash == m.config_hash);
    REQUIRE(r.outputs.size() == 1);
    CHECK(r.outputs[0].file == "traj.csv");
    CHECK(r.outputs[0].hash == m.outputs[0].hash);
    CHECK(r.outputs[0].bytes == 16);
    CHECK(r.wall_ms == 12.5);
    // rendering is deterministic
    CHECK(manifest_to_json(r) == json);
  }

  SUBCASE("corrupt JSON raises io_error") {
    CHECK_THROWS_AS((void)manifest_from_json("{not json"), io_error);
    CHECK_THROWS_AS((void)manifest_from_json("{\"command\":\"x\"}"), io_error);
  }
}

TEST_CASE("text file round trip") {
  const std::string path = "config_io_probe.tmp";
  write_text_file(path, "line one\nline two\n");
  CHECK(read_text_file(path) == "line one\nline two\n");
  CHECK(std::remove(path.c_str()) == 0);
  CHECK_THROWS_AS((void)read_text_file(path), io_error);
  CHECK_THROWS_AS(write_text_file("/nonexistent/dir/file.txt", "x"), io_error);
}
