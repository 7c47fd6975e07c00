#include <doctest.h>

#include <array>
#include <cmath>
#include <complex>

#include <boost/numeric/odeint.hpp>

#include "eitsim/spectra.hpp"

// Brute-force oracle for the steady-state absorption: integrate the
// single-direction Bloch equations for the coherences of the five-level
// scheme (|6> only through its light shift) until they stop changing, then
// read off alpha from the polarization.
namespace {

using eitsim::Complex;
using State = std::array<double, 8>;

struct Bloch {
  eitsim::LevelScheme s;
  double dp, dc, gamma21, shift;
  Complex oc, op;

  void operator()(const State& x, State& dx, double) const {
    const Complex i{0.0, 1.0};
    const Complex r21{x[0], x[1]}, r31{x[2], x[3]}, r41{x[4], x[5]}, r51{x[6], x[7]};
    const double h = 0.5 * s.gamma;
    const Complex d21 = -(0.5 * gamma21 - i * (dp - dc - shift)) * r21 +
                        0.5 * i * std::conj(oc) * r31 +
                        0.5 * i * s.s_tilde_25 * std::conj(oc) * r51;
    const Complex d31 = -(h - i * dp) * r31 + 0.5 * i * op + 0.5 * i * oc * r21;
    const Complex d41 = -(h - i * (dp - s.delta_34)) * r41 + 0.5 * i * s.s_tilde_14 * op;
    const Complex d51 = -(h - i * (dp - s.delta_35)) * r51 + 0.5 * i * s.s_tilde_15 * op +
                        0.5 * i * s.s_tilde_25 * oc * r21;
    dx = {d21.real(), d21.imag(), d31.real(), d31.imag(),
          d41.real(), d41.imag(), d51.real(), d51.imag()};
  }
};

Complex ode_alpha(double delta_p, Complex omega_c, double delta_c, const eitsim::LevelScheme& s,
                  double gamma21, double doppler) {
  namespace ode = boost::numeric::odeint;
  Bloch b;
  b.s = s;
  b.dp = delta_p - doppler;
  b.dc = delta_c - doppler;
  b.gamma21 = gamma21;
  b.shift = -std::norm(s.s_tilde_26 * omega_c) / (4.0 * (s.delta_36 - b.dc));
  b.oc = omega_c;
  b.op = 1e-3;
  State x{};
  ode::integrate_adaptive(ode::make_controlled<ode::runge_kutta_dopri5<State>>(1e-14, 1e-14),
                          b, x, 0.0, 6000.0, 0.01);
  State dx{};
  b(x, dx, 0.0);
  double rate = 0.0;
  for (double v : dx) rate = std::max(rate, std::abs(v));
  REQUIRE(rate < 1e-8 * std::abs(b.op));
  const Complex p = Complex{x[2], x[3]} + s.s_tilde_14 * Complex{x[4], x[5]} +
                    s.s_tilde_15 * Complex{x[6], x[7]};
  // Field growth i (OD Gamma / 2) p / Omega_p matches exp(-(Gamma/2) OD alpha / 2)
  // in amplitude, so alpha = -2 i p / Omega_p.
  return Complex{0.0, -2.0} * p / b.op;
}

}  // namespace

TEST_CASE("closed-form absorption equals the integrated Bloch steady state") {
  const auto rb = eitsim::default_rb87_d2();
  struct Case {
    double dp;
    Complex oc;
    double dc, gamma21, doppler;
  };
  const Case cases[] = {
      {1.0, 4.5, 0.0, 0.01, 0.0},           // reference point
      {-0.7, Complex(1.2, 2.0), 0.8, 0.05, 0.0},
      {0.3, 3.0, -1.0, 0.02, 0.35},        // moving atom
      {-12.0, 2.0, 0.5, 0.01, 0.0},        // near |4>
      {25.0, 1.0, 0.0, 0.01, 0.0},         // near |5>
  };
  for (const auto& c : cases) {
    CAPTURE(c.dp);
    CAPTURE(c.doppler);
    const Complex want = ode_alpha(c.dp, c.oc, c.dc, rb, c.gamma21, c.doppler);
    const Complex got =
        eitsim::absorption_coefficient(c.dp, c.oc, c.dc, rb, c.gamma21, c.doppler).alpha;
    CHECK(std::abs(got - want) <= 1e-6 * std::abs(want));
  }
}
