#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fluxmech/bessel.hpp"
#include "fluxmech/errors.hpp"
#include "oracles.hpp"

using fluxmech::bessel_jn;

TEST_CASE("defining values at x = 0") {
  CHECK(bessel_jn(0, 0.0) == 1.0);
  CHECK(bessel_jn(1, 0.0) == 0.0);
  CHECK(bessel_jn(7, 0.0) == 0.0);
}

TEST_CASE("first zero of J_0") {
  CHECK(std::abs(bessel_jn(0, 2.4048255577)) < 1e-9);
  // the zero to full precision
  CHECK(std::abs(bessel_jn(0, 2.4048255576957728)) < 1e-15);
}

TEST_CASE("spot values from a 40-digit reference") {
  struct Row {
    int n;
    double x;
    double jn;
  };
  // mpmath besselj, 17 significant digits
  const Row rows[] = {
      {0, 0.5, 0.9384698072408129},
      {1, 2.0, 0.57672480775687339},
      {2, 5.136, -0.00012828753895467751},
      {3, 7.5, -0.25806091319346031},
      {5, 1.0, 0.00024975773021123443},
      {10, 20.0, 0.18648255802394508},
      {0, 50.0, 0.055812327669251815},
      {7, 0.001, 1.5500991579086068e-27},
      {4, 12.0, 0.18249896464415114},
      {12, 37.5, 0.078051738098978109},
      {25, 50.0, -0.098426751299835828},
  };
  for (const Row& r : rows) {
    CAPTURE(r.n);
    CAPTURE(r.x);
    CHECK(bessel_jn(r.n, r.x) == doctest::Approx(r.jn).epsilon(1e-13));
    CHECK(std::abs(bessel_jn(r.n, r.x) - r.jn) < 1e-12); // contract: abs < 1e-12
  }
}

TEST_CASE("agrees with the long-double series for |x| <= 15") {
  for (int n = 0; n <= 12; ++n) {
    for (double x = -15.0; x <= 15.0; x += 0.375) {
      double ref = static_cast<double>(testutil::bessel_series_ref(n, x));
      CAPTURE(n);
      CAPTURE(x);
      CHECK(std::abs(bessel_jn(n, x) - ref) < 1e-13);
    }
  }
}

TEST_CASE("agrees with std::cyl_bessel_j up to x = 50") {
  for (int n = 0; n <= 8; ++n) {
    for (double x = 0.25; x <= 50.0; x += 0.83) {
      CAPTURE(n);
      CAPTURE(x);
      CHECK(std::abs(bessel_jn(n, x) - std::cyl_bessel_j(n, x)) < 1e-12);
    }
  }
}

TEST_CASE("three-term recurrence holds") {
  for (int n = 1; n <= 20; ++n) {
    for (double x : {0.7, 3.3, 9.1, 21.0, 44.5}) {
      double lhs = bessel_jn(n - 1, x) + bessel_jn(n + 1, x);
      double rhs = (2.0 * n / x) * bessel_jn(n, x);
      CAPTURE(n);
      CAPTURE(x);
      CHECK(std::abs(lhs - rhs) < 1e-11);
    }
  }
}

TEST_CASE("parity: J_n(-x) = (-1)^n J_n(x)") {
  for (int n = 0; n <= 6; ++n) {
    for (double x : {0.4, 2.9, 14.0, 33.0}) {
      double sgn = (n % 2 == 0) ? 1.0 : -1.0;
      CHECK(bessel_jn(n, -x) == doctest::Approx(sgn * bessel_jn(n, x)).epsilon(1e-14));
    }
  }
}

TEST_CASE("known zeros bracketed by sign changes") {
  const double j0z[] = {2.4048255576957728, 5.5200781102863106, 8.6537279129110122,
                        11.791534439014282};
  const double j1z[] = {3.8317059702075123, 7.0155866698156188, 10.173468135062722};
  const double j2z[] = {5.1356223018406826, 8.4172441403998649, 11.619841172149059};
  const double j3z[] = {6.3801618959239835, 9.7610231299816697};
  auto check_zero = [](int n, double z) {
    CAPTURE(n);
    CAPTURE(z);
    CHECK(std::abs(bessel_jn(n, z)) < 1e-12);
    CHECK(bessel_jn(n, z - 1e-4) * bessel_jn(n, z + 1e-4) < 0.0);
  };
  for (double z : j0z) check_zero(0, z);
  for (double z : j1z) check_zero(1, z);
  for (double z : j2z) check_zero(2, z);
  for (double z : j3z) check_zero(3, z);
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS((void)bessel_jn(0, std::nan("")), fluxmech::config_error);
  CHECK_THROWS_AS((void)bessel_jn(2, std::numeric_limits<double>::infinity()),
                  fluxmech::config_error);
  CHECK_THROWS_AS((void)bessel_jn(-1, 1.0), fluxmech::config_error);
}
