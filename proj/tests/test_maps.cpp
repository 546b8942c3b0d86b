#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <vector>

#include "fluxmech/maps.hpp"
#include "fluxmech/threads.hpp"

using namespace fluxmech;

namespace {

// reference map parameters: strongly dephased qubit, slow high-Q oscillator
ModelConfig map_config() {
  ModelConfig cfg;
  cfg.drive = {0.0, 0.0, 1.0, 0, 0.1};
  cfg.qubit = {0.014, 0.714, -1.0};
  cfg.mech = {0.128, 0.128 / 1e5, 0.0018};
  return cfg;
}

} // namespace

TEST_CASE("flux grid validation") {
  FluxGridSpec spec{-0.5, 3.5, 41, 0.0, 12.5, 51, 3};
  CHECK_NOTHROW(spec.validate());

  FluxGridSpec bad = spec;
  bad.phi_e0_count = 1;
  CHECK_THROWS_AS(bad.validate(), config_error);
  bad = spec;
  bad.phi_e1_max = bad.phi_e1_min;
  CHECK_THROWS_AS(bad.validate(), config_error);
  bad = spec;
  bad.n_max = -1;
  CHECK_THROWS_AS(bad.validate(), config_error);
  bad = spec;
  bad.phi_e0_max = std::nan("");
  CHECK_THROWS_AS(bad.validate(), config_error);
}

TEST_CASE("damping map structure") {
  ModelConfig cfg = map_config();

  SUBCASE("zero drive amplitude keeps only the static resonance") {
    FluxGridSpec spec{-0.4, 1.4, 10, 0.0, 4.0, 3, 2};
    MapTile tile = damping_map(spec, cfg);
    REQUIRE(tile.x.size() == 10);
    REQUIRE(tile.y.size() == 3);
    REQUIRE(tile.y[0] == 0.0);
    for (std::size_t ix = 0; ix < tile.x.size(); ++ix) {
      double phi0 = tile.x[ix];
      double v = tile.at(ix, 0);
      if (phi0 > 0.5) {
        CHECK(v == 0.0); // higher resonances see J_n(0) = 0
      } else if (std::abs(phi0) > 0.05) {
        CHECK(std::abs(v) > 0.0);
      }
    }
  }

  SUBCASE("correction is antisymmetric across each resonance") {
    // binary-exact symmetric axis so mirrored detunings match bitwise
    FluxGridSpec spec{-0.4375, 0.4375, 15, 1.8, 1.9, 2, 0};
    MapTile tile = damping_map(spec, cfg);
    for (std::size_t ix = 0; ix < 7; ++ix) {
      double a = tile.at(ix, 0);
      double b = tile.at(14 - ix, 0);
      CHECK(b == doctest::Approx(-a).epsilon(1e-12));
    }
    CHECK(tile.at(7, 0) == 0.0); // exact resonance carries no correction
    CHECK(tile.min_value < 0.0);
    CHECK(tile.max_value > 0.0);
  }

  SUBCASE("lobes vanish at the zeros of the drive-amplitude Bessel factor") {
    // phi_e1/omega_d at the first J_1 maximum vs the first J_1 zero
    FluxGridSpec spec{0.84, 0.86, 2, 1.8412, 3.8317059702075125, 2, 1};
    MapTile tile = damping_map(spec, cfg);
    double lobe = std::abs(tile.at(0, 0));
    double null = std::abs(tile.at(0, 1));
    CHECK(lobe > 1e-8);
    CHECK(null < 1e-12 * lobe);
  }

  SUBCASE("negative detuning reduces damping on the static resonance") {
    FluxGridSpec spec{-0.15, 0.15, 3, 0.0, 0.1, 2, 0};
    MapTile tile = damping_map(spec, cfg);
    CHECK(tile.at(0, 0) < 0.0);
    CHECK(tile.at(2, 0) > 0.0);
  }
}

TEST_CASE("damping map purity and determinism") {
  ModelConfig cfg = map_config();

  SUBCASE("doubling resolution preserves shared points") {
    FluxGridSpec coarse{-0.4, 0.4, 3, 1.0, 3.0, 3, 1};
    FluxGridSpec fine{-0.4, 0.4, 5, 1.0, 3.0, 5, 1};
    MapTile a = damping_map(coarse, cfg);
    MapTile b = damping_map(fine, cfg);
    for (std::size_t iy = 0; iy < 3; ++iy)
      for (std::size_t ix = 0; ix < 3; ++ix) {
        CHECK(a.x[ix] == b.x[2 * ix]);
        CHECK(a.y[iy] == b.y[2 * iy]);
        CHECK(a.at(ix, iy) == b.at(2 * ix, 2 * iy));
      }
  }

  SUBCASE("result is independent of the worker count") {
    FluxGridSpec spec{-0.4, 1.4, 7, 0.0, 5.0, 9, 2};
    setenv("FLUXMECH_THREADS", "1", 1);
    MapTile serial = damping_map(spec, cfg);
    setenv("FLUXMECH_THREADS", "3", 1);
    CHECK(worker_count() == 3);
    MapTile threaded = damping_map(spec, cfg);
    unsetenv("FLUXMECH_THREADS");
    REQUIRE(serial.values.size() == threaded.values.size());
    for (std::size_t i = 0; i < serial.values.size(); ++i)
      CHECK(serial.values[i] == threaded.values[i]);
  }
}

TEST_CASE("response surface layers") {
  QubitParams qubit{0.002, 0.002, -1.0};
  MechanicalParams mech{std::sqrt(2.0), std::sqrt(2.0) / 500.0, 0.01};
  std::vector<double> deltas{-1.6, -1.3, -1.0, -0.7};
  std::vector<double> omegas{0.0005, 0.001, 0.002, 0.004, 0.008, 0.5, 1.0, 1.5};

  SUBCASE("phase is positive everywhere at negative detuning") {
    ResponseSurface surf = response_surface(deltas, omegas, 1.0, qubit, mech);
    REQUIRE(surf.arg_chi.values.size() == deltas.size() * omegas.size());
    for (double v : surf.arg_chi.values) CHECK(v > 0.0);
    for (double v : surf.im_chi.values) CHECK(v > 0.0);
    for (std::size_t i = 0; i < surf.abs_chi.values.size(); ++i)
      CHECK(surf.abs_chi.values[i] >= std::abs(surf.im_chi.values[i]));
  }

  SUBCASE("secondary ridge at the dressed relaxation rate") {
    // equal rates make gamma1n = 0.002 independent of delta
    ResponseSurface surf = response_surface(deltas, omegas, 1.0, qubit, mech);
    for (std::size_t ix = 0; ix < deltas.size(); ++ix) {
      double at_ridge = std::abs(surf.im_chi.at(ix, 2));  // omega = 0.002
      CHECK(at_ridge > std::abs(surf.im_chi.at(ix, 0)));
      CHECK(at_ridge > std::abs(surf.im_chi.at(ix, 4)));
    }
  }

  SUBCASE("no coupling produces identically zero layers") {
    MechanicalParams free = mech;
    free.g = 0.0;
    ResponseSurface surf = response_surface(deltas, omegas, 1.0, qubit, free);
    for (double v : surf.abs_chi.values) CHECK(v == 0.0);
    for (double v : surf.arg_chi.values) CHECK(v == 0.0);
    for (double v : surf.im_chi.values) CHECK(v == 0.0);
  }

  SUBCASE("grid validation") {
    CHECK_THROWS_AS((void)response_surface({}, omegas, 1.0, qubit, mech),
                    config_error);
    CHECK_THROWS_AS((void)response_surface(deltas, {1.0, 1.0}, 1.0, qubit, mech),
                    config_error);
  }
}

TEST_CASE("map export layout") {
  ModelConfig cfg = map_config();
  FluxGridSpec spec{-0.4, 0.4, 3, 1.0, 2.0, 2, 0};
  MapTile tile = damping_map(spec, cfg);
  std::ostringstream os;
  write_map_csv(os, tile);
  std::string text = os.str();
  CHECK(text.rfind("phi_e0,phi_e1,delta_gamma_m\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 7);
}

TEST_CASE("parallel_for covers the range and propagates errors") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);

  setenv("FLUXMECH_THREADS", "4", 1);
  CHECK_THROWS_AS(
      parallel_for(100,
                   [](std::size_t i) {
                     if (i == 57) throw numeric_error("worker failure");
                   }),
      numeric_error);
  unsetenv("FLUXMECH_THREADS");
}
