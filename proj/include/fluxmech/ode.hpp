#pragma once

// Adaptive embedded Runge-Kutta integration with dense output.
//
// Two explicit schemes are provided:
//   rk45  : Dormand-Prince 5(4), 7 stages, FSAL, 4th-order dense output.
//   rk853 : Dormand-Prince 8(5,3), 12 stages, combined 5th/3rd order error
//           estimate, 7th-order dense output (3 extra stages per sampled step).
// Step-size selection uses the standard PI (Lund-stabilized) controller.
// All arithmetic is straight-line with a fixed evaluation order, so results
// are bit-identical for identical inputs.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <type_traits>

#include "fluxmech/errors.hpp"

namespace fluxmech {

/// Scheme selector for the adaptive integrator.
enum class OdeScheme {
  rk45,   ///< Dormand-Prince 5(4)
  rk853,  ///< Dormand-Prince 8(5,3)
};

/// Step-count and tolerance record attached to integration output.
struct StepStats {
  std::uint64_t n_accepted = 0;  ///< accepted steps
  std::uint64_t n_rejected = 0;  ///< rejected step attempts
  std::uint64_t n_rhs_evals = 0; ///< right-hand-side evaluations
  double rel_tol = 0.0;          ///< relative tolerance used
  double abs_tol = 0.0;          ///< absolute tolerance used
};

/// Tuning knobs for integrate_dense().
struct OdeOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double init_step = 0.0;               ///< 0 selects the automatic estimate
  double max_step = 0.0;                ///< 0 caps steps at the full span
  std::uint64_t max_steps = 50'000'000; ///< accepted-step budget
  OdeScheme scheme = OdeScheme::rk853;
};

/// Raised when the step size collapses below machine resolution (stiff
/// blowup) or the step budget runs out; carries how far integration got.
class ode_failure : public numeric_error {
public:
  ode_failure(const std::string& what, double t_reached, StepStats stats)
      : numeric_error(what), t_reached_(t_reached), stats_(stats) {}
  /// Last time reached before failure.
  double t_reached() const noexcept { return t_reached_; }
  /// Step counts accumulated up to the failure.
  const StepStats& stats() const noexcept { return stats_; }

private:
  double t_reached_;
  StepStats stats_;
};

namespace detail {

// Dormand-Prince 5(4): classic tableau with 4th-order dense output.
template <std::size_t N>
struct Dopri5Stepper {
  static constexpr int order = 5;
  static constexpr double step_expo = 0.2 - 0.04 * 0.75; // PI exponent
  static constexpr double step_beta = 0.04;
  static constexpr double fac_min = 0.2; // hnew/h lower clamp
  static constexpr double fac_max = 10.0;

  using A = std::array<double, N>;

  A k1{}, k2{}, k3{}, k4{}, k5{}, k6{}, k7{};
  std::array<A, 5> rcont{};

  static constexpr double c2 = 0.2, c3 = 0.3, c4 = 0.8, c5 = 8.0 / 9.0;
  static constexpr double a21 = 0.2;
  static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0,
                          a43 = 32.0 / 9.0;
  static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                          a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
  static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                          a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                          a65 = -5103.0 / 18656.0;
  static constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0,
                          a74 = 125.0 / 192.0, a75 = -2187.0 / 6784.0,
                          a76 = 11.0 / 84.0;
  static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0,
                          e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                          e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
  static constexpr double d1 = -12715105075.0 / 11282082432.0,
                          d3 = 87487479700.0 / 32700410799.0,
                          d4 = -10690763975.0 / 1880347072.0,
                          d5 = 701980252875.0 / 199316789632.0,
                          d6 = -1453857185.0 / 822651844.0,
                          d7 = 69997945.0 / 29380423.0;

  // Attempts one step of size h from (t, y); k1 must hold f(t, y).
  // Fills ynew and returns the scaled error norm. 6 rhs evaluations.
  template <class Rhs>
  double step(Rhs& rhs, double t, const A& y, double h, A& ynew,
              double rel_tol, double abs_tol, std::uint64_t& nfcn) {
    A yt;
    for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * (a21 * k1[i]);
    rhs(t + c2 * h, yt, k2);
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    rhs(t + c3 * h, yt, k3);
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(t + c4 * h, yt, k4);
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs(t + c5 * h, yt, k5);
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                          a64 * k4[i] + a65 * k5[i]);
    rhs(t + h, yt, k6);
    for (std::size_t i = 0; i < N; ++i)
      ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] +
                            a75 * k5[i] + a76 * k6[i]);
    rhs(t + h, ynew, k7); // FSAL: becomes k1 of the next step on acceptance
    nfcn += 6;

    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      double sk = abs_tol + rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                       e6 * k6[i] + e7 * k7[i]);
      err += (ei / sk) * (ei / sk);
    }
    return std::sqrt(err / static_cast<double>(N));
  }

  // Builds the dense-output polynomial for the accepted step [t, t+h].
  template <class Rhs>
  void prepare_dense(Rhs&, double, const A& y, const A& ynew, double h,
                     std::uint64_t&) {
    for (std::size_t i = 0; i < N; ++i) {
      double ydiff = ynew[i] - y[i];
      double bspl = h * k1[i] - ydiff;
      rcont[0][i] = y[i];
      rcont[1][i] = ydiff;
      rcont[2][i] = bspl;
      rcont[3][i] = ydiff - h * k7[i] - bspl;
      rcont[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                         d6 * k6[i] + d7 * k7[i]);
    }
  }

  // Evaluates the dense polynomial at fraction s in [0, 1] of the step.
  void dense_eval(double s, A& out) const {
    double s1 = 1.0 - s;
    for (std::size_t i = 0; i < N; ++i)
      out[i] = rcont[0][i] +
               s * (rcont[1][i] +
                    s1 * (rcont[2][i] + s * (rcont[3][i] + s1 * rcont[4][i])));
  }

  void advance() { k1 = k7; } // FSAL hand-off

  static constexpr bool needs_fresh_k1 = false;
};

// Dormand-Prince 8(5,3) with 7th-order dense output.
template <std::size_t N>
struct Dop853Stepper {
  static constexpr int order = 8;
  static constexpr double step_expo = 1.0 / 8.0;
  static constexpr double step_beta = 0.0;
  static constexpr double fac_min = 1.0 / 3.0;
  static constexpr double fac_max = 6.0;

  using A = std::array<double, N>;

  A k1{}, k2{}, k3{}, k4{}, k5{}, k6{}, k7{}, k8{}, k9{}, k10{}, k11{}, k12{};
  A ksum{};  // 8th-order weighted increment of the last attempted step
  A fnew{};  // rhs at the accepted endpoint
  std::array<A, 8> rcont{};

  static constexpr double c2 = 0.526001519587677318785587544488e-01;
  static constexpr double c3 = 0.789002279381515978178381316732e-01;
  static constexpr double c4 = 0.118350341907227396726757197510e+00;
  static constexpr double c5 = 0.281649658092772603273242802490e+00;
  static constexpr double c6 = 0.333333333333333333333333333333e+00;
  static constexpr double c7 = 0.25e+00;
  static constexpr double c8 = 0.307692307692307692307692307692e+00;
  static constexpr double c9 = 0.651282051282051282051282051282e+00;
  static constexpr double c10 = 0.6e+00;
  static constexpr double c11 = 0.857142857142857142857142857142e+00;
  static constexpr double c14 = 0.1e+00;
  static constexpr double c15 = 0.2e+00;
  static constexpr double c16 = 0.777777777777777777777777777778e+00;

  static constexpr double a21 = 5.26001519587677318785587544488e-2;
  static constexpr double a31 = 1.97250569845378994544595329183e-2;
  static constexpr double a32 = 5.91751709536136983633785987549e-2;
  static constexpr double a41 = 2.95875854768068491816892993775e-2;
  static constexpr double a43 = 8.87627564304205475450678981324e-2;
  static constexpr double a51 = 2.41365134159266685502369798665e-1;
  static constexpr double a53 = -8.84549479328286085344864962717e-1;
  static constexpr double a54 = 9.24834003261792003115737966543e-1;
  static constexpr double a61 = 3.7037037037037037037037037037e-2;
  static constexpr double a64 = 1.70828608729473871279604482173e-1;
  static constexpr double a65 = 1.25467687566822425016691814123e-1;
  static constexpr double a71 = 3.7109375e-2;
  static constexpr double a74 = 1.70252211019544039314978060272e-1;
  static constexpr double a75 = 6.02165389804559606850219397283e-2;
  static constexpr double a76 = -1.7578125e-2;
  static constexpr double a81 = 3.70920001185047927108779319836e-2;
  static constexpr double a84 = 1.70383925712239993810214054705e-1;
  static constexpr double a85 = 1.07262030446373284651809199168e-1;
  static constexpr double a86 = -1.53194377486244017527936158236e-2;
  static constexpr double a87 = 8.27378916381402288758473766002e-3;
  static constexpr double a91 = 6.24110958716075717114429577812e-1;
  static constexpr double a94 = -3.36089262944694129406857109825e0;
  static constexpr double a95 = -8.68219346841726006818189891453e-1;
  static constexpr double a96 = 2.75920996994467083049415600797e1;
  static constexpr double a97 = 2.01540675504778934086186788979e1;
  static constexpr double a98 = -4.34898841810699588477366255144e1;
  static constexpr double a101 = 4.77662536438264365890433908527e-1;
  static constexpr double a104 = -2.48811461997166764192642586468e0;
  static constexpr double a105 = -5.90290826836842996371446475743e-1;
  static constexpr double a106 = 2.12300514481811942347288949897e1;
  static constexpr double a107 = 1.52792336328824235832596922938e1;
  static constexpr double a108 = -3.32882109689848629194453265587e1;
  static constexpr double a109 = -2.03312017085086261358222928593e-2;
  static constexpr double a111 = -9.3714243008598732571704021658e-1;
  static constexpr double a114 = 5.18637242884406370830023853209e0;
  static constexpr double a115 = 1.09143734899672957818500254654e0;
  static constexpr double a116 = -8.14978701074692612513997267357e0;
  static constexpr double a117 = -1.85200656599969598641566180701e1;
  static constexpr double a118 = 2.27394870993505042818970056734e1;
  static constexpr double a119 = 2.49360555267965238987089396762e0;
  static constexpr double a1110 = -3.0467644718982195003823669022e0;
  static constexpr double a121 = 2.27331014751653820792359768449e0;
  static constexpr double a124 = -1.05344954667372501984066689879e1;
  static constexpr double a125 = -2.00087205822486249909675718444e0;
  static constexpr double a126 = -1.79589318631187989172765950534e1;
  static constexpr double a127 = 2.79488845294199600508499808837e1;
  static constexpr double a128 = -2.85899827713502369474065508674e0;
  static constexpr double a129 = -8.87285693353062954433549289258e0;
  static constexpr double a1210 = 1.23605671757943030647266201528e1;
  static constexpr double a1211 = 6.43392746015763530355970484046e-1;

  static constexpr double a141 = 5.61675022830479523392909219681e-2;
  static constexpr double a147 = 2.53500210216624811088794765333e-1;
  static constexpr double a148 = -2.46239037470802489917441475441e-1;
  static constexpr double a149 = -1.24191423263816360469010140626e-1;
  static constexpr double a1410 = 1.5329179827876569731206322685e-1;
  static constexpr double a1411 = 8.20105229563468988491666602057e-3;
  static constexpr double a1412 = 7.56789766054569976138603589584e-3;
  static constexpr double a1413 = -8.298e-3;
  static constexpr double a151 = 3.18346481635021405060768473261e-2;
  static constexpr double a156 = 2.83009096723667755288322961402e-2;
  static constexpr double a157 = 5.35419883074385676223797384372e-2;
  static constexpr double a158 = -5.49237485713909884646569340306e-2;
  static constexpr double a1511 = -1.08347328697249322858509316994e-4;
  static constexpr double a1512 = 3.82571090835658412954920192323e-4;
  static constexpr double a1513 = -3.40465008687404560802977114492e-4;
  static constexpr double a1514 = 1.41312443674632500278074618366e-1;
  static constexpr double a161 = -4.28896301583791923408573538692e-1;
  static constexpr double a166 = -4.69762141536116384314449447206e0;
  static constexpr double a167 = 7.68342119606259904184240953878e0;
  static constexpr double a168 = 4.06898981839711007970213554331e0;
  static constexpr double a169 = 3.56727187455281109270669543021e-1;
  static constexpr double a1613 = -1.39902416515901462129418009734e-3;
  static constexpr double a1614 = 2.9475147891527723389556272149e0;
  static constexpr double a1615 = -9.15095847217987001081870187138e0;

  static constexpr double b1 = 5.42937341165687622380535766363e-2;
  static constexpr double b6 = 4.45031289275240888144113950566e0;
  static constexpr double b7 = 1.89151789931450038304281599044e0;
  static constexpr double b8 = -5.8012039600105847814672114227e0;
  static constexpr double b9 = 3.1116436695781989440891606237e-1;
  static constexpr double b10 = -1.52160949662516078556178806805e-1;
  static constexpr double b11 = 2.01365400804030348374776537501e-1;
  static constexpr double b12 = 4.47106157277725905176885569043e-2;

  static constexpr double e31 = 0.244094488188976377952755905512e+00;
  static constexpr double e32 = 0.733846688281611857341361741547e+00;
  static constexpr double e33 = 0.220588235294117647058823529412e-01;

  static constexpr double e51 = 0.1312004499419488073250102996e-01;
  static constexpr double e56 = -0.1225156446376204440720569753e+01;
  static constexpr double e57 = -0.4957589496572501915214079952e+00;
  static constexpr double e58 = 0.1664377182454986536961530415e+01;
  static constexpr double e59 = -0.3503288487499736816886487290e+00;
  static constexpr double e510 = 0.3341791187130174790297318841e+00;
  static constexpr double e511 = 0.8192320648511571246570742613e-01;
  static constexpr double e512 = -0.2235530786388629525884427845e-01;

  static constexpr double d41 = -0.84289382761090128651353491142e+01;
  static constexpr double d46 = 0.56671495351937776962531783590e+00;
  static constexpr double d47 = -0.30689499459498916912797304727e+01;
  static constexpr double d48 = 0.23846676565120698287728149680e+01;
  static constexpr double d49 = 0.21170345824450282767155149946e+01;
  static constexpr double d410 = -0.87139158377797299206789907490e+00;
  static constexpr double d411 = 0.22404374302607882758541771650e+01;
  static constexpr double d412 = 0.63157877876946881815570249290e+00;
  static constexpr double d413 = -0.88990336451333310820698117400e-01;
  static constexpr double d414 = 0.18148505520854727256656404962e+02;
  static constexpr double d415 = -0.91946323924783554000451984436e+01;
  static constexpr double d416 = -0.44360363875948939664310572000e+01;
  static constexpr double d51 = 0.10427508642579134603413151009e+02;
  static constexpr double d56 = 0.24228349177525818288430175319e+03;
  static constexpr double d57 = 0.16520045171727028198505394887e+03;
  static constexpr double d58 = -0.37454675472269020279518312152e+03;
  static constexpr double d59 = -0.22113666853125306036270938578e+02;
  static constexpr double d510 = 0.77334326684722638389603898808e+01;
  static constexpr double d511 = -0.30674084731089398182061213626e+02;
  static constexpr double d512 = -0.93321305264302278729567221706e+01;
  static constexpr double d513 = 0.15697238121770843886131091075e+02;
  static constexpr double d514 = -0.31139403219565177677282850411e+02;
  static constexpr double d515 = -0.93529243588444783865713862664e+01;
  static constexpr double d516 = 0.35816841486394083752465898540e+02;
  static constexpr double d61 = 0.19985053242002433820987653617e+02;
  static constexpr double d66 = -0.38703730874935176555105901742e+03;
  static constexpr double d67 = -0.18917813819516756882830838328e+03;
  static constexpr double d68 = 0.52780815920542364900561016686e+03;
  static constexpr double d69 = -0.11573902539959630126141871134e+02;
  static constexpr double d610 = 0.68812326946963000169666922661e+01;
  static constexpr double d611 = -0.10006050966910838403183860980e+01;
  static constexpr double d612 = 0.77771377980534432092869265740e+00;
  static constexpr double d613 = -0.27782057523535084065932004339e+01;
  static constexpr double d614 = -0.60196695231264120758267380846e+02;
  static constexpr double d615 = 0.84320405506677161018159903784e+02;
  static constexpr double d616 = 0.11992291136182789328035130030e+02;
  static constexpr double d71 = -0.25693933462703749003312586129e+02;
  static constexpr double d76 = -0.15418974869023643374053993627e+03;
  static constexpr double d77 = -0.23152937917604549567536039109e+03;
  static constexpr double d78 = 0.35763911791061412378285349910e+03;
  static constexpr double d79 = 0.93405324183624310003907691704e+02;
  static constexpr double d710 = -0.37458323136451633156875139351e+02;
  static constexpr double d711 = 0.10409964950896230045147246184e+03;
  static constexpr double d712 = 0.29840293426660503123344363579e+02;
  static constexpr double d713 = -0.43533456590011143754432175058e+02;
  static constexpr double d714 = 0.96324553959188282948394950600e+02;
  static constexpr double d715 = -0.39177261675615439165231486172e+02;
  static constexpr double d716 = -0.14972683625798562581422125276e+03;

  // Attempts one step of size h; k1 must hold f(t, y). 11 rhs evaluations.
  template <class Rhs>
  double step(Rhs& rhs, double t, const A& y, double h, A& ynew,
              double rel_tol, double abs_tol, std::uint64_t& nfcn) {
    A yt;
    for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * (a21 * k1[i]);
    rhs(t + c2 * h, yt, k2);
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    rhs(t + c3 * h, yt, k3);
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + h * (a41 * k1[i] + a43 * k3[i]);
    rhs(t + c4 * h, yt, k4);
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + h * (a51 * k1[i] + a53 * k3[i] + a54 * k4[i]);
    rhs(t + c5 * h, yt, k5);
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + h * (a61 * k1[i] + a64 * k4[i] + a65 * k5[i]);
    rhs(t + c6 * h, yt, k6);
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + h * (a71 * k1[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    rhs(t + c7 * h, yt, k7);
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + h * (a81 * k1[i] + a84 * k4[i] + a85 * k5[i] +
                          a86 * k6[i] + a87 * k7[i]);
    rhs(t + c8 * h, yt, k8);
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + h * (a91 * k1[i] + a94 * k4[i] + a95 * k5[i] +
                          a96 * k6[i] + a97 * k7[i] + a98 * k8[i]);
    rhs(t + c9 * h, yt, k9);
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + h * (a101 * k1[i] + a104 * k4[i] + a105 * k5[i] +
                          a106 * k6[i] + a107 * k7[i] + a108 * k8[i] +
                          a109 * k9[i]);
    rhs(t + c10 * h, yt, k10);
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + h * (a111 * k1[i] + a114 * k4[i] + a115 * k5[i] +
                          a116 * k6[i] + a117 * k7[i] + a118 * k8[i] +
                          a119 * k9[i] + a1110 * k10[i]);
    rhs(t + c11 * h, yt, k11);
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + h * (a121 * k1[i] + a124 * k4[i] + a125 * k5[i] +
                          a126 * k6[i] + a127 * k7[i] + a128 * k8[i] +
                          a129 * k9[i] + a1210 * k10[i] + a1211 * k11[i]);
    rhs(t + h, yt, k12);
    nfcn += 11;

    for (std::size_t i = 0; i < N; ++i) {
      ksum[i] = b1 * k1[i] + b6 * k6[i] + b7 * k7[i] + b8 * k8[i] +
                b9 * k9[i] + b10 * k10[i] + b11 * k11[i] + b12 * k12[i];
      ynew[i] = y[i] + h * ksum[i];
    }

    // Combined 5th/3rd-order estimate: err5 damped by the 3rd-order check.
    double err3 = 0.0, err5 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      double sk = abs_tol + rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      double e3 = ksum[i] - e31 * k1[i] - e32 * k9[i] - e33 * k12[i];
      double e5 = e51 * k1[i] + e56 * k6[i] + e57 * k7[i] + e58 * k8[i] +
                  e59 * k9[i] + e510 * k10[i] + e511 * k11[i] + e512 * k12[i];
      err3 += (e3 / sk) * (e3 / sk);
      err5 += (e5 / sk) * (e5 / sk);
    }
    double deno = err5 + 0.01 * err3;
    if (deno <= 0.0) deno = 1.0;
    return std::abs(h) * err5 * std::sqrt(1.0 / (static_cast<double>(N) * deno));
  }

  // Builds the dense polynomial; needs fnew = f(t+h, ynew) plus 3 extra stages.
  template <class Rhs>
  void prepare_dense(Rhs& rhs, double t, const A& y, const A& ynew, double h,
                     std::uint64_t& nfcn) {
    for (std::size_t i = 0; i < N; ++i) {
      double ydiff = ynew[i] - y[i];
      double bspl = h * k1[i] - ydiff;
      rcont[0][i] = y[i];
      rcont[1][i] = ydiff;
      rcont[2][i] = bspl;
      rcont[3][i] = ydiff - h * fnew[i] - bspl;
      rcont[4][i] = d41 * k1[i] + d46 * k6[i] + d47 * k7[i] + d48 * k8[i] +
                    d49 * k9[i] + d410 * k10[i] + d411 * k11[i] + d412 * k12[i];
      rcont[5][i] = d51 * k1[i] + d56 * k6[i] + d57 * k7[i] + d58 * k8[i] +
                    d59 * k9[i] + d510 * k10[i] + d511 * k11[i] + d512 * k12[i];
      rcont[6][i] = d61 * k1[i] + d66 * k6[i] + d67 * k7[i] + d68 * k8[i] +
                    d69 * k9[i] + d610 * k10[i] + d611 * k11[i] + d612 * k12[i];
      rcont[7][i] = d71 * k1[i] + d76 * k6[i] + d77 * k7[i] + d78 * k8[i] +
                    d79 * k9[i] + d710 * k10[i] + d711 * k11[i] + d712 * k12[i];
    }
    A yt;
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + h * (a141 * k1[i] + a147 * k7[i] + a148 * k8[i] +
                          a149 * k9[i] + a1410 * k10[i] + a1411 * k11[i] +
                          a1412 * k12[i] + a1413 * fnew[i]);
    rhs(t + c14 * h, yt, k14_);
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + h * (a151 * k1[i] + a156 * k6[i] + a157 * k7[i] +
                          a158 * k8[i] + a1511 * k11[i] + a1512 * k12[i] +
                          a1513 * fnew[i] + a1514 * k14_[i]);
    rhs(t + c15 * h, yt, k15_);
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + h * (a161 * k1[i] + a166 * k6[i] + a167 * k7[i] +
                          a168 * k8[i] + a169 * k9[i] + a1613 * fnew[i] +
                          a1614 * k14_[i] + a1615 * k15_[i]);
    rhs(t + c16 * h, yt, k16_);
    nfcn += 3;
    for (std::size_t i = 0; i < N; ++i) {
      rcont[4][i] = h * (rcont[4][i] + d413 * fnew[i] + d414 * k14_[i] +
                         d415 * k15_[i] + d416 * k16_[i]);
      rcont[5][i] = h * (rcont[5][i] + d513 * fnew[i] + d514 * k14_[i] +
                         d515 * k15_[i] + d516 * k16_[i]);
      rcont[6][i] = h * (rcont[6][i] + d613 * fnew[i] + d614 * k14_[i] +
                         d615 * k15_[i] + d616 * k16_[i]);
      rcont[7][i] = h * (rcont[7][i] + d713 * fnew[i] + d714 * k14_[i] +
                         d715 * k15_[i] + d716 * k16_[i]);
    }
  }

  void dense_eval(double s, A& out) const {
    double s1 = 1.0 - s;
    for (std::size_t i = 0; i < N; ++i) {
      double a = rcont[6][i] + s * rcont[7][i];
      a = rcont[5][i] + s1 * a;
      a = rcont[4][i] + s * a;
      a = rcont[3][i] + s1 * a;
      a = rcont[2][i] + s * a;
      a = rcont[1][i] + s1 * a;
      out[i] = rcont[0][i] + s * a;
    }
  }

  void advance() { k1 = fnew; }

  static constexpr bool needs_fresh_k1 = true; // fnew computed on acceptance

private:
  A k14_{}, k15_{}, k16_{};
};

// Automatic initial step: matches h^order * max(|f0|, |y''|) to 0.01.
template <std::size_t N, class Rhs>
double initial_step(Rhs& rhs, double t0, const std::array<double, N>& y0,
                    const std::array<double, N>& f0, double dir, double h_max,
                    int order, double rel_tol, double abs_tol,
                    std::uint64_t& nfcn) {
  double dnf = 0.0, dny = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    double sk = abs_tol + rel_tol * std::abs(y0[i]);
    dnf += (f0[i] / sk) * (f0[i] / sk);
    dny += (y0[i] / sk) * (y0[i] / sk);
  }
  double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
  h = std::min(h, h_max);

  std::array<double, N> y1, f1;
  for (std::size_t i = 0; i < N; ++i) y1[i] = y0[i] + dir * h * f0[i];
  rhs(t0 + dir * h, y1, f1);
  ++nfcn;

  double der2 = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    double sk = abs_tol + rel_tol * std::abs(y0[i]);
    der2 += ((f1[i] - f0[i]) / sk) * ((f1[i] - f0[i]) / sk);
  }
  der2 = std::sqrt(der2) / h;

  double der12 = std::max(std::abs(der2), std::sqrt(dnf));
  double h1 = (der12 <= 1e-15) ? std::max(1e-6, h * 1e-3)
                               : std::pow(0.01 / der12, 1.0 / order);
  return std::min({100.0 * h, h1, h_max});
}

// Sentinel for integrations with no invariant projection.
struct NoProjection {};

template <std::size_t N, class Stepper, class Rhs, class Observer,
          class Projector>
StepStats run_integration(Rhs& rhs, std::array<double, N>& y, double t0,
                          double t1, double sample_dt, Observer& observe,
                          Projector& project, const OdeOptions& opt) {
  constexpr bool projecting = !std::is_same_v<Projector, NoProjection>;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double span = t1 - t0;
  const double dir = 1.0; // pre t1 > t0 is validated by callers

  StepStats stats;
  stats.rel_tol = opt.rel_tol;
  stats.abs_tol = opt.abs_tol;

  Stepper st;
  rhs(t0, y, st.k1);
  ++stats.n_rhs_evals;

  const double h_max = opt.max_step > 0.0 ? std::min(opt.max_step, span) : span;
  double h = opt.init_step > 0.0
                 ? std::min(opt.init_step, h_max)
                 : initial_step<N>(rhs, t0, y, st.k1, dir, h_max,
                                   Stepper::order, opt.rel_tol, opt.abs_tol,
                                   stats.n_rhs_evals);

  observe(t0, y);
  std::uint64_t next_sample = 1; // samples at t0 + k * sample_dt, k >= 1
  const double sample_cut = t1 - 1e-9 * sample_dt; // final point emitted once

  double t = t0;
  std::array<double, N> ynew;
  double errold = 1e-4;
  bool rejected = false;
  bool done = false;

  while (!done) {
    if (stats.n_accepted + stats.n_rejected >= opt.max_steps)
      throw ode_failure("step budget exhausted at t=" + std::to_string(t), t,
                        stats);
    if (!(h > 4.0 * eps * std::max(std::abs(t), std::abs(span))) ||
        !std::isfinite(h))
      throw ode_failure("step size underflow at t=" + std::to_string(t)
                            + " (stiff blowup or tolerance too tight)",
                        t, stats);

    if (t + h >= t1) {
      h = t1 - t;
      done = true;
    }

    double err = st.step(rhs, t, y, h, ynew, opt.rel_tol, opt.abs_tol,
                         stats.n_rhs_evals);
    if (!std::isfinite(err)) err = 1e10; // force rejection and shrink

    double fac11 = std::pow(err, Stepper::step_expo);
    if (err <= 1.0) {
      // accept
      double fac = fac11 / std::pow(errold, Stepper::step_beta);
      fac = std::max(1.0 / Stepper::fac_max,
                     std::min(1.0 / Stepper::fac_min, fac / 0.9));
      double hnew = std::min(h / fac, h_max);
      errold = std::max(err, 1e-4);

      double tnew = done ? t1 : t + h;
      if constexpr (Stepper::needs_fresh_k1) {
        rhs(tnew, ynew, st.fnew);
        ++stats.n_rhs_evals;
      }

      // emit dense samples that fall inside this step
      double ts = t0 + static_cast<double>(next_sample) * sample_dt;
      if (ts <= tnew && ts < sample_cut) {
        st.prepare_dense(rhs, t, y, ynew, h, stats.n_rhs_evals);
        while (ts <= tnew && ts < sample_cut) {
          std::array<double, N> ys;
          st.dense_eval((ts - t) / h, ys);
          if constexpr (projecting) project(ys);
          observe(ts, ys);
          ++next_sample;
          ts = t0 + static_cast<double>(next_sample) * sample_dt;
        }
      }

      if constexpr (projecting) {
        // project onto the invariant manifold, then refresh the endpoint
        // derivative the next step starts from
        project(ynew);
        if constexpr (Stepper::needs_fresh_k1) rhs(tnew, ynew, st.fnew);
        else rhs(tnew, ynew, st.k1);
        ++stats.n_rhs_evals;
      }
      t = tnew;
      y = ynew;
      if constexpr (!(projecting && !Stepper::needs_fresh_k1)) st.advance();
      ++stats.n_accepted;
      if (rejected) hnew = std::min(hnew, h);
      h = hnew;
      rejected = false;
    } else {
      h = h / std::min(1.0 / Stepper::fac_min, fac11 / 0.9);
      rejected = true;
      done = false;
      ++stats.n_rejected;
    }
  }

  observe(t1, y);
  return stats;
}

} // namespace detail

/// Integrates dy/dt = rhs(t, y) from t0 to t1 with adaptive error control,
/// invoking observe(t, y) at t0, at every t0 + k*sample_dt inside the span
/// (via dense interpolation), and at t1 exactly. The state y is advanced in
/// place to the solution at t1. When a projector is supplied it is applied
/// to every accepted state and emitted sample, pulling the solution back
/// onto a known invariant manifold. Deterministic: identical inputs produce
/// bit-identical results. Throws ode_failure on step underflow or an
/// exhausted step budget; samples emitted before the failure remain valid.
template <std::size_t N, class Rhs, class Observer,
          class Projector = detail::NoProjection>
StepStats integrate_dense(Rhs&& rhs, std::array<double, N>& y, double t0,
                          double t1, double sample_dt, Observer&& observe,
                          const OdeOptions& opt = {}, Projector&& project = {}) {
  if (!(t1 > t0)) throw config_error("integrate: t1 must exceed t0");
  if (!(sample_dt > 0.0)) throw config_error("integrate: sample_dt must be > 0");
  if (!(opt.rel_tol > 0.0) || !(opt.abs_tol > 0.0))
    throw config_error("integrate: tolerances must be positive");
  if (opt.scheme == OdeScheme::rk45)
    return detail::run_integration<N, detail::Dopri5Stepper<N>>(
        rhs, y, t0, t1, sample_dt, observe, project, opt);
  return detail::run_integration<N, detail::Dop853Stepper<N>>(
      rhs, y, t0, t1, sample_dt, observe, project, opt);
}

} // namespace fluxmech
