#include <doctest.h>

#include <cmath>

#include "eitsim/atomic_model.hpp"
#include "eitsim/units.hpp"

using namespace eitsim;

TEST_CASE("rb87 constants in units of Gamma") {
  const auto s = default_rb87_d2();
  CHECK(s.gamma == 1.0);
  CHECK(s.delta_omega_21 == doctest::Approx(1126.0).epsilon(0.5 / 1126.0));
  CHECK(s.delta_34 < 0.0);
  CHECK(s.delta_35 > 0.0);
  CHECK(s.delta_36 > s.delta_35);
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("hyperfine strengths obey the sum rules") {
  const auto s = default_rb87_d2();
  CHECK(s.strength_1(0) + s.strength_1(1) + s.strength_1(2) == doctest::Approx(1.0));
  CHECK(s.strength_2(1) + s.strength_2(2) + s.strength_2(3) == doctest::Approx(1.0));
  CHECK(s.strength_1(3) == 0.0);
  CHECK(s.strength_2(0) == 0.0);
}

TEST_CASE("three-level scheme decouples the auxiliary levels") {
  const auto s = three_level_scheme();
  CHECK(s.s_tilde_14 == 0.0);
  CHECK(s.s_tilde_15 == 0.0);
  CHECK(s.s_tilde_25 == 0.0);
  CHECK(s.s_tilde_26 == 0.0);
  CHECK(stark_shift(5.0, 5.0, s, 0.0, 0.0) == 0.0);
}

TEST_CASE("scheme validation rejects bad constants") {
  auto s = default_rb87_d2();
  s.gamma = 0.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = default_rb87_d2();
  s.s_tilde_25 = -1.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("light shift of the eliminated level") {
  auto s = default_rb87_d2();
  // Unit S_26 so that the Rabi argument is the |2>-|6> coupling itself.
  s.s_tilde_26 = 1.0;
  CHECK(stark_shift(0.0, 0.0, s, 0.0, 0.0) == 0.0);
  const double dc = s.delta_36 - 4.0;
  CHECK(stark_shift_component(2.0, dc, s) == doctest::Approx(-0.25));
  CHECK(stark_shift(2.0, 2.0, s, s.delta_36 - 4.0, s.delta_36 + 4.0) ==
        doctest::Approx(0.0).epsilon(1e-15));
  // Only |Omega| matters.
  CHECK(stark_shift_component(Complex(0.0, 2.0), dc, s) == doctest::Approx(-0.25));
}

TEST_CASE("elimination fails on resonance with the eliminated level") {
  const auto s = default_rb87_d2();
  CHECK_THROWS_AS(stark_shift_component(1.0, s.delta_36, s), EliminationError);
  CHECK_NOTHROW(stark_shift_component(0.0, s.delta_36, s));
}

TEST_CASE("unit conversions") {
  CHECK(units::from_microseconds(1.0) == doctest::Approx(38.139).epsilon(1e-4));
  CHECK(units::to_microseconds(units::from_microseconds(0.6)) == doctest::Approx(0.6));
  CHECK(units::doppler_scale(0.0) == 0.0);
  CHECK(units::doppler_scale(450e-6) == doctest::Approx(0.0438).epsilon(2e-3));
  CHECK(units::phase_mismatch_for_length(0.1) == doctest::Approx(14.325).epsilon(1e-4));
}
