#include <doctest.h>

#include <cmath>
#include <numbers>

#include "eitsim/drive.hpp"
#include "eitsim/quadrature.hpp"

using namespace eitsim;

TEST_CASE("control envelope ramps with a raised cosine") {
  ControlEnvelope c(3.0);
  c.switch_to(10.0, 0.0, 4.0).switch_to(30.0, 2.0, 0.0);
  CHECK(std::abs(c(0.0) - Complex(3.0)) == 0.0);
  CHECK(std::abs(c(10.0) - Complex(3.0)) == 0.0);
  CHECK(c(12.0).real() == doctest::Approx(1.5));
  CHECK(std::abs(c(14.0)) == doctest::Approx(0.0));
  CHECK(std::abs(c(29.9)) == 0.0);
  CHECK(c(30.1).real() == 2.0);
  CHECK(c.peak_magnitude() == 3.0);
  CHECK(c.min_active_magnitude() == 2.0);
  CHECK_FALSE(c.is_zero());
  CHECK(c.scaled(0.5)(0.0).real() == 1.5);
  CHECK_THROWS_AS(c.switch_to(29.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ControlEnvelope().switch_to(0.0, 1.0, -1.0), std::invalid_argument);
  CHECK(ControlEnvelope().is_zero());
}

TEST_CASE("gaussian probe has the requested intensity FWHM") {
  const auto p = ProbeEnvelope::gaussian(0.02, 8.0, 16.0);
  CHECK(std::abs(p(16.0)) == doctest::Approx(0.02));
  CHECK(std::norm(p(20.0)) == doctest::Approx(0.5 * std::norm(0.02)));
  CHECK(std::norm(p(12.0)) == doctest::Approx(0.5 * std::norm(0.02)));
  CHECK_THROWS_AS(ProbeEnvelope::gaussian(1.0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("probe envelopes superpose") {
  const auto a = ProbeEnvelope::gaussian(Complex(0.01, 0.02), 5.0, 10.0);
  const auto b = ProbeEnvelope::cw(0.03, 2.0, 4.0);
  const auto sum = a + b.scaled(Complex(0.0, 2.0));
  for (double t : {0.0, 3.0, 7.5, 10.0, 25.0}) {
    CHECK(std::abs(sum(t) - (a(t) + Complex(0.0, 2.0) * b(t))) < 1e-15);
  }
  CHECK(b(2.0) == Complex(0.0));
  CHECK(b(4.0).real() == doctest::Approx(0.015));
  CHECK(b(100.0).real() == 0.03);
  CHECK(sum.magnitude_bound() == doctest::Approx(std::abs(Complex(0.01, 0.02)) + 0.06));
}

TEST_CASE("weak-probe warning") {
  DriveConfig d;
  d.omega_c_plus = ControlEnvelope(3.0);
  d.probe = ProbeEnvelope::gaussian(0.01, 8.0, 16.0);
  CHECK(drive_warnings(d).empty());
  d.probe = ProbeEnvelope::gaussian(0.5, 8.0, 16.0);
  CHECK(drive_warnings(d).size() == 1);
  d.omega_c_plus = ControlEnvelope();
  CHECK(d.weak_probe_ratio() == 0.0);
}

TEST_CASE("detuning bookkeeping") {
  DriveConfig d;
  d.delta_c_plus = 1.0;
  d.delta_c_minus = -2.5;
  d.delta_p_plus = 0.45;
  CHECK(d.zeta() == -3.5);
  CHECK(d.delta_p_minus() == doctest::Approx(-3.05));
  CHECK(d.delta_two_photon() == doctest::Approx(-0.55));
}

TEST_CASE("gauss-legendre integrates polynomials exactly") {
  const auto q = gauss_legendre(6, 0.0, 2.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) sum += q.weights[i] * std::pow(q.nodes[i], 11);
  CHECK(sum == doctest::Approx(std::pow(2.0, 12) / 12.0).epsilon(1e-13));
}

TEST_CASE("gauss-hermite moments") {
  const auto q = gauss_hermite(12);
  double m0 = 0.0, m2 = 0.0, m4 = 0.0;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    const double x = q.nodes[i];
    m0 += q.weights[i];
    m2 += q.weights[i] * x * x;
    m4 += q.weights[i] * x * x * x * x;
  }
  const double sp = std::sqrt(std::numbers::pi);
  CHECK(m0 == doctest::Approx(sp).epsilon(1e-13));
  CHECK(m2 == doctest::Approx(sp / 2.0).epsilon(1e-13));
  CHECK(m4 == doctest::Approx(3.0 * sp / 4.0).epsilon(1e-13));
}
