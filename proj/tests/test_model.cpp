#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "fluxmech/model.hpp"
#include "oracles.hpp"

using namespace fluxmech;

namespace {

// Fig-4-style base parameters used for the frozen derive oracle.
ModelConfig fig4_config() {
  ModelConfig cfg;
  cfg.drive = {0.92, 2.0, 1.0, 1, 0.1};
  cfg.qubit = {0.014, 0.714, -1.0};
  cfg.mech = {0.128, 1.28e-6, 0.0018};
  return cfg;
}

EomParams random_params(testutil::Lcg& rng) {
  EomParams p;
  p.delta = rng.range(-2.0, 2.0);
  p.delta_n = rng.range(-1.5, 1.5);
  p.gamma1 = rng.range(0.0, 0.1);
  p.gamma2 = 0.5 * p.gamma1 + rng.range(0.0, 0.5);
  p.sigma_z_eq = rng.range(-1.0, 1.0);
  p.omega_m = rng.range(0.05, 2.0);
  p.gamma_m = rng.range(0.0, 0.01);
  p.g = rng.range(-0.5, 0.5);
  return p;
}

} // namespace

TEST_CASE("validation rejects out-of-range parameters") {
  auto bad_drive = [](double e0, double e1, double wd, int n, double gap) {
    DriveParams d{e0, e1, wd, n, gap};
    d.validate();
  };
  auto bad_qubit = [](double g1, double g2, double sz) {
    QubitParams q{g1, g2, sz};
    q.validate();
  };
  auto bad_mech = [](double wm, double gm, double g) {
    MechanicalParams m{wm, gm, g};
    m.validate();
  };
  CHECK_THROWS_AS(bad_drive(0.0, 0.0, 0.0, 0, 0.1), config_error);
  CHECK_THROWS_AS(bad_drive(0.0, 0.0, 1.0, -1, 0.1), config_error);
  CHECK_THROWS_AS(bad_drive(0.0, 0.0, 1.0, 0, -0.1), config_error);
  CHECK_THROWS_AS(bad_qubit(-0.1, 0.5, 0.0), config_error);
  CHECK_THROWS_AS(bad_qubit(0.2, 0.05, 0.0), config_error); // gamma2 < gamma1/2
  CHECK_THROWS_AS(bad_qubit(0.0, 0.0, 1.5), config_error);
  CHECK_THROWS_AS(bad_mech(0.0, 0.0, 0.0), config_error);
  CHECK_THROWS_AS(bad_mech(1.0, -1e-9, 0.0), config_error);
  CHECK_NOTHROW(fig4_config().validate());
}

TEST_CASE("rotating frame: dressed gap and detuning") {
  SUBCASE("J_0(0) = 1 passes the bare gap through") {
    DriveParams d{0.3, 0.0, 1.0, 0, 0.25};
    auto [delta, delta_n] = derive_rotating_frame(d);
    CHECK(delta == doctest::Approx(0.3));
    CHECK(delta_n == doctest::Approx(0.25));
  }
  SUBCASE("J_2(0) = 0 closes the gap") {
    DriveParams d{0.3, 0.0, 1.0, 2, 0.25};
    auto [delta, delta_n] = derive_rotating_frame(d);
    CHECK(delta == doctest::Approx(0.3 - 2.0));
    CHECK(delta_n == 0.0);
  }
  SUBCASE("exact n-photon resonance gives zero detuning") {
    DriveParams d{3.0, 1.0, 1.0, 3, 0.1};
    auto [delta, delta_n] = derive_rotating_frame(d);
    CHECK(delta == 0.0);
    (void)delta_n;
  }
}

TEST_CASE("secondary quantities: frozen 40-digit reference point") {
  ModelConfig cfg = fig4_config();
  DerivedParams d = derive(cfg);
  CHECK(d.delta == doctest::Approx(-0.08).epsilon(1e-15));
  CHECK(d.delta_n == doctest::Approx(0.057672480775687339).epsilon(1e-14));
  CHECK(d.omega_rabi == doctest::Approx(-0.098621067925783615).epsilon(1e-14));
  CHECK(d.gamma1n == doctest::Approx(0.25338443231259649).epsilon(1e-14));
  CHECK(d.gamma2n == doctest::Approx(0.59430778384370176).epsilon(1e-14));
  CHECK(d.g_interaction == doctest::Approx(1.3794589022388423e-5).epsilon(1e-14));
  CHECK(d.s_z_eq_bar == doctest::Approx(0.044819642996586063).epsilon(1e-14));
  CHECK(d.sigma_detune == doctest::Approx(0.029378932074216385).epsilon(1e-13));
}

TEST_CASE("secondary quantities: analytic limits") {
  QubitParams q{0.01, 0.3, -1.0};
  MechanicalParams m{1.0, 1e-4, 0.05};
  SUBCASE("Delta_n = 0") {
    DerivedParams d = derive_secondary(-0.4, 0.0, q, m);
    CHECK(d.omega_rabi == doctest::Approx(-0.4));
    CHECK(d.gamma1n == doctest::Approx(q.gamma1));
    CHECK(d.gamma2n == doctest::Approx(q.gamma2));
    CHECK(d.g_interaction == 0.0);
  }
  SUBCASE("delta = 0") {
    DerivedParams d = derive_secondary(0.0, 0.7, q, m);
    CHECK(d.omega_rabi == doctest::Approx(0.7)); // sign(0) := +1
    CHECK(d.gamma1n == doctest::Approx(q.gamma2));
    CHECK(d.gamma2n == doctest::Approx(0.5 * (q.gamma1 + q.gamma2)));
    CHECK(d.g_interaction == 0.0);
    CHECK(d.s_z_eq_bar == 0.0);
  }
  SUBCASE("degenerate point rejected") {
    CHECK_THROWS_AS(derive_secondary(0.0, 0.0, q, m), config_error);
  }
}

TEST_CASE("secondary quantities: sign and symmetry properties") {
  testutil::Lcg rng(11);
  QubitParams q{0.02, 0.15, -1.0};
  MechanicalParams m{1.3, 1e-4, 0.07};
  for (int i = 0; i < 50; ++i) {
    double delta = rng.range(-2.0, 2.0);
    double dn = rng.range(-1.0, 1.0);
    if (delta == 0.0 && dn == 0.0) continue;
    DerivedParams d = derive_secondary(delta, dn, q, m);
    if (delta != 0.0) CHECK(d.omega_rabi * delta > 0.0);
    CHECK(d.omega_rabi * d.omega_rabi ==
          doctest::Approx(delta * delta + dn * dn).epsilon(1e-14));
    CHECK(d.gamma1n >= 0.0);
    CHECK(d.gamma2n >= 0.0);
    if (delta < 0.0 && m.g > 0.0 && dn != 0.0) CHECK(d.g_interaction > 0.0);

    DerivedParams dm = derive_secondary(-delta, dn, q, m);
    CHECK(dm.gamma1n == doctest::Approx(d.gamma1n).epsilon(1e-14));
    CHECK(dm.gamma2n == doctest::Approx(d.gamma2n).epsilon(1e-14));
    CHECK(dm.g_interaction == doctest::Approx(d.g_interaction).epsilon(1e-13));
    CHECK(dm.omega_rabi == doctest::Approx(-d.omega_rabi).epsilon(1e-14));
  }
}

TEST_CASE("coupling from device geometry") {
  PhysicalCouplingParams p{0.05, 5e-6, 5e-7, 1e-16, 2.0 * M_PI * 1e6};
  double g = coupling_from_physical(p);
  CHECK(g == doctest::Approx(343373678.16532773).epsilon(1e-13)); // mpmath, SI
  SUBCASE("linear in B") {
    PhysicalCouplingParams p2 = p;
    p2.b_field *= 2.0;
    CHECK(coupling_from_physical(p2) == doctest::Approx(2.0 * g).epsilon(1e-14));
  }
  SUBCASE("inverse square root in m") {
    PhysicalCouplingParams p2 = p;
    p2.mass_eff *= 4.0;
    CHECK(coupling_from_physical(p2) == doctest::Approx(0.5 * g).epsilon(1e-14));
  }
  SUBCASE("nonpositive inputs rejected") {
    PhysicalCouplingParams p2 = p;
    p2.i_cc = 0.0;
    CHECK_THROWS_AS(coupling_from_physical(p2), config_error);
  }
}

TEST_CASE("equations of motion: closed-form checkpoints") {
  SUBCASE("decoupled equilibrium has zero derivative") {
    EomParams p{0.3, 0.0, 0.01, 0.05, -1.0, 1.0, 1e-4, 0.0};
    SystemState s{{0.0, 0.0}, -1.0, {0.0, 0.0}};
    SystemState ds = eom_rhs(s, p);
    CHECK(std::abs(ds.s_minus) == 0.0);
    CHECK(ds.s_z == 0.0);
    CHECK(std::abs(ds.alpha) == 0.0);
  }
  SUBCASE("free damped oscillator") {
    EomParams p{0.3, 0.0, 0.01, 0.05, -1.0, 1.3, 2e-3, 0.0};
    complexd a{0.4, -0.9};
    SystemState s{{0.0, 0.0}, -1.0, a};
    SystemState ds = eom_rhs(s, p);
    complexd expect = -(complexd{0.5 * p.gamma_m, p.omega_m}) * a;
    CHECK(std::abs(ds.alpha - expect) < 1e-15);
  }
  SUBCASE("gap-closed fixed point with coupling") {
    EomParams p{-0.4, 0.0, 0.02, 0.08, -0.9, 1.1, 3e-4, 0.25};
    complexd alpha_fp = -p.g * p.sigma_z_eq / complexd{2.0 * p.omega_m, -p.gamma_m};
    SystemState s{{0.0, 0.0}, p.sigma_z_eq, alpha_fp};
    SystemState ds = eom_rhs(s, p);
    CHECK(std::abs(ds.s_minus) < 1e-16);
    CHECK(std::abs(ds.s_z) < 1e-16);
    CHECK(std::abs(ds.alpha) < 1e-16);
  }
}

TEST_CASE("Bloch norm derivative vanishes without qubit decay") {
  testutil::Lcg rng(29);
  for (int i = 0; i < 40; ++i) {
    EomParams p = random_params(rng);
    p.gamma1 = 0.0;
    p.gamma2 = 0.0;
    SystemState s{{rng.range(-0.5, 0.5), rng.range(-0.5, 0.5)}, rng.range(-1.0, 1.0),
                  {rng.range(-2.0, 2.0), rng.range(-2.0, 2.0)}};
    SystemState ds = eom_rhs(s, p);
    // d/dt (4|s_-|^2 + s_z^2) = 8 Re(conj(s_-) ds_-) + 2 s_z ds_z
    double deriv = 8.0 * (std::conj(s.s_minus) * ds.s_minus).real() + 2.0 * s.s_z * ds.s_z;
    CHECK(std::abs(deriv) < 1e-14);
  }
}

TEST_CASE("analytic Jacobian matches central finite differences") {
  testutil::Lcg rng(101);
  for (int ip = 0; ip < 20; ++ip) {
    EomParams p = random_params(rng);
    for (int is = 0; is < 5; ++is) {
      std::array<double, 5> y{rng.range(-0.5, 0.5), rng.range(-0.5, 0.5),
                              rng.range(-1.0, 1.0), rng.range(-2.0, 2.0),
                              rng.range(-2.0, 2.0)};
      std::array<std::array<double, 5>, 5> ja{}, jf = testutil::fd_jacobian(y, p);
      eom_jacobian(y, ja, p);
      double scale = 0.0;
      for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) scale = std::max(scale, std::abs(jf[i][j]));
      for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
          CAPTURE(i);
          CAPTURE(j);
          CHECK(std::abs(ja[i][j] - jf[i][j]) < 1e-6 * std::max(scale, 1.0));
        }
    }
  }
}

TEST_CASE("Jacobian block structure at g = 0") {
  EomParams p{0.5, 0.4, 0.01, 0.05, -1.0, 1.2, 1e-3, 0.0};
  std::array<double, 5> y{0.1, -0.2, 0.3, 0.7, -0.4};
  std::array<std::array<double, 5>, 5> j{};
  eom_jacobian(y, j, p);
  // qubit (0..2) and oscillator (3..4) blocks decouple
  for (int i = 0; i < 3; ++i)
    for (int jj = 3; jj < 5; ++jj) CHECK(j[i][jj] == 0.0);
  for (int i = 3; i < 5; ++i)
    for (int jj = 0; jj < 3; ++jj) CHECK(j[i][jj] == 0.0);
  // oscillator block is the rotation-with-decay matrix, eigenvalues -gamma_m/2 +- i omega_m
  CHECK(j[3][3] == doctest::Approx(-0.5 * p.gamma_m));
  CHECK(j[4][4] == doctest::Approx(-0.5 * p.gamma_m));
  CHECK(j[3][4] == doctest::Approx(p.omega_m));
  CHECK(j[4][3] == doctest::Approx(-p.omega_m));
}

TEST_CASE("complex and real forms of the right-hand side agree") {
  testutil::Lcg rng(7);
  for (int i = 0; i < 25; ++i) {
    EomParams p = random_params(rng);
    SystemState s{{rng.range(-0.5, 0.5), rng.range(-0.5, 0.5)}, rng.range(-1.0, 1.0),
                  {rng.range(-2.0, 2.0), rng.range(-2.0, 2.0)}};
    SystemState dc = eom_rhs(s, p);
    std::array<double, 5> dr{};
    eom_rhs(s.to_array(), dr, p);
    auto da = dc.to_array();
    for (int k = 0; k < 5; ++k) CHECK(da[k] == dr[k]);
  }
}
