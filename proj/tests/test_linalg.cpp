#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "fluxmech/linalg.hpp"
#include "fluxmech/model.hpp"
#include "oracles.hpp"

using namespace fluxmech;
using complexd = std::complex<double>;

namespace {

std::vector<complexd> sorted_eigs(std::vector<complexd> w) {
  std::sort(w.begin(), w.end(), [](complexd a, complexd b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return w;
}

// reference determinant by plain elimination, for cross-checking spectra
double ref_det(SquareMatrix a) {
  const std::size_t n = a.size();
  double det = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (a(piv, k) == 0.0) return 0.0;
    if (piv != k) {
      det = -det;
      for (std::size_t j = 0; j < n; ++j) std::swap(a(piv, j), a(k, j));
    }
    det *= a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      double f = a(i, k) / a(k, k);
      for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return det;
}

} // namespace

TEST_CASE("lu_solve recovers known solutions") {
  testutil::Lcg rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 7.0);
    SquareMatrix a(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) a(i, j) = rng.range(-1.0, 1.0);
      a(i, i) += static_cast<double>(n); // diagonally dominant, well conditioned
    }
    std::vector<double> x_true(n);
    for (auto& v : x_true) v = rng.range(-5.0, 5.0);
    std::vector<double> b(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) b[i] += a(i, j) * x_true[j];

    std::vector<double> x = lu_solve(a, b);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(x[i] == doctest::Approx(x_true[i]).epsilon(1e-12));
  }
}

TEST_CASE("lu_solve rejects singular and mismatched input") {
  SquareMatrix a(3);
  a(0, 0) = 1.0;
  a(0, 1) = 2.0;
  a(0, 2) = 3.0;
  for (std::size_t j = 0; j < 3; ++j) a(1, j) = 2.0 * a(0, j); // dependent row
  a(2, 0) = -1.0;
  a(2, 1) = 0.5;
  a(2, 2) = 4.0;
  CHECK_THROWS_AS((void)lu_solve(a, {1.0, 2.0, 3.0}), numeric_error);
  CHECK_THROWS_AS((void)lu_solve(a, {1.0, 2.0}), config_error);
}

TEST_CASE("eigenvalues of a diagonal matrix are its entries") {
  SquareMatrix a(4);
  a(0, 0) = -3.5;
  a(1, 1) = 0.25;
  a(2, 2) = 7.0;
  a(3, 3) = -0.125;
  auto w = sorted_eigs(eigenvalues(a));
  std::vector<double> expect{-3.5, -0.125, 0.25, 7.0};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(w[i].real() == doctest::Approx(expect[i]).epsilon(1e-13));
    CHECK(w[i].imag() == 0.0);
  }
}

TEST_CASE("companion matrices reproduce polynomial roots") {
  SUBCASE("real roots 1, 2, 3, 4") {
    // x^4 - 10 x^3 + 35 x^2 - 50 x + 24
    SquareMatrix c(4);
    c(1, 0) = c(2, 1) = c(3, 2) = 1.0;
    c(0, 3) = -24.0;
    c(1, 3) = 50.0;
    c(2, 3) = -35.0;
    c(3, 3) = 10.0;
    auto w = sorted_eigs(eigenvalues(c));
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(w[i].real() == doctest::Approx(static_cast<double>(i + 1)).epsilon(1e-10));
      CHECK(std::abs(w[i].imag()) < 1e-10);
    }
  }
  SUBCASE("complex pair: roots 2, +/- i") {
    // x^3 - 2 x^2 + x - 2
    SquareMatrix c(3);
    c(1, 0) = c(2, 1) = 1.0;
    c(0, 2) = 2.0;
    c(1, 2) = -1.0;
    c(2, 2) = 2.0;
    auto w = sorted_eigs(eigenvalues(c));
    CHECK(std::abs(w[0].real()) < 1e-12);
    CHECK(w[0].imag() == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(std::abs(w[1].real()) < 1e-12);
    CHECK(w[1].imag() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(w[2].real() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(std::abs(w[2].imag()) < 1e-12);
  }
}

TEST_CASE("rotation-scaling block gives the expected complex pair") {
  SquareMatrix a(2);
  a(0, 0) = -0.03;
  a(0, 1) = 1.37;
  a(1, 0) = -1.37;
  a(1, 1) = -0.03;
  auto w = sorted_eigs(eigenvalues(a));
  CHECK(w[0].real() == doctest::Approx(-0.03).epsilon(1e-13));
  CHECK(w[0].imag() == doctest::Approx(-1.37).epsilon(1e-13));
  CHECK(w[1].imag() == doctest::Approx(1.37).epsilon(1e-13));
}

TEST_CASE("random spectra satisfy trace, determinant, and conjugate pairing") {
  testutil::Lcg rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t n = 3 + static_cast<std::size_t>(rng.uniform() * 5.0);
    SquareMatrix a(n);
    double tr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) a(i, j) = rng.range(-2.0, 2.0);
      tr += a(i, i);
    }
    double det = ref_det(a);
    auto w = eigenvalues(a);

    complexd sum{0.0, 0.0}, prod{1.0, 0.0};
    for (auto v : w) {
      sum += v;
      prod *= v;
    }
    CHECK(sum.real() == doctest::Approx(tr).epsilon(1e-9));
    CHECK(std::abs(sum.imag()) < 1e-9);
    CHECK(prod.real() == doctest::Approx(det).epsilon(1e-8));
    CHECK(std::abs(prod.imag()) < 1e-8 * (1.0 + std::abs(det)));

    for (auto v : w) {
      if (v.imag() == 0.0) continue;
      bool paired = false;
      for (auto u : w)
        if (std::abs(u - std::conj(v)) < 1e-9 * (1.0 + std::abs(v))) paired = true;
      CHECK(paired);
    }
  }
}

TEST_CASE("eigenvalues survive violent diagonal scaling") {
  // D A D^-1 has the same spectrum; balancing must undo the scaling
  SquareMatrix a(3);
  a(0, 0) = 1.0;
  a(0, 1) = 2.0;
  a(0, 2) = -1.0;
  a(1, 0) = 0.5;
  a(1, 1) = -3.0;
  a(1, 2) = 1.5;
  a(2, 0) = -2.0;
  a(2, 1) = 1.0;
  a(2, 2) = 4.0;
  double d[3] = {1e-7, 1.0, 1e7};
  SquareMatrix s(3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) s(i, j) = d[i] * a(i, j) / d[j];
  auto w0 = sorted_eigs(eigenvalues(a));
  auto w1 = sorted_eigs(eigenvalues(s));
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(std::abs(w1[i] - w0[i]) < 1e-9 * (1.0 + std::abs(w0[i])));
}

TEST_CASE("defective block is resolved to the eigenvalue cluster") {
  SquareMatrix a(2);
  a(0, 1) = 1.0; // Jordan block at 0: expect both roots within sqrt(eps)
  auto w = eigenvalues(a);
  CHECK(std::abs(w[0]) < 1e-7);
  CHECK(std::abs(w[1]) < 1e-7);
}

TEST_CASE("equal-decay model Jacobian has the closed-form spectrum") {
  // with gamma1 = gamma2 = gamma and g = 0 the Bloch block contributes
  // -gamma and -gamma +/- i*Omega_R, the oscillator -gamma_m/2 +/- i*omega_m
  EomParams p;
  p.delta = -0.7;
  p.delta_n = 0.4;
  p.gamma1 = 0.013;
  p.gamma2 = 0.013;
  p.sigma_z_eq = -1.0;
  p.omega_m = 1.21;
  p.gamma_m = 0.002;
  p.g = 0.0;

  std::array<double, 5> y{0.1, -0.2, 0.5, 0.3, 0.4};
  std::array<std::array<double, 5>, 5> j{};
  eom_jacobian(y, j, p);
  SquareMatrix a(5);
  for (std::size_t r = 0; r < 5; ++r)
    for (std::size_t c = 0; c < 5; ++c) a(r, c) = j[r][c];

  double omega_r = std::hypot(p.delta, p.delta_n);
  auto w = sorted_eigs(eigenvalues(a));
  // sorted by real part: mech pair (-0.001) is rightmost, Bloch trio at -0.013
  CHECK(w[0].real() == doctest::Approx(-0.013).epsilon(1e-10));
  CHECK(w[0].imag() == doctest::Approx(-omega_r).epsilon(1e-10));
  CHECK(w[1].real() == doctest::Approx(-0.013).epsilon(1e-10));
  CHECK(std::abs(w[1].imag()) < 1e-10);
  CHECK(w[2].imag() == doctest::Approx(omega_r).epsilon(1e-10));
  CHECK(w[3].real() == doctest::Approx(-0.001).epsilon(1e-10));
  CHECK(w[3].imag() == doctest::Approx(-1.21).epsilon(1e-10));
  CHECK(w[4].imag() == doctest::Approx(1.21).epsilon(1e-10));
}
