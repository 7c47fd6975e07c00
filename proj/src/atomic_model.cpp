#include "eitsim/atomic_model.hpp"

#include <cmath>
#include <fmt/format.h>

namespace eitsim {

namespace units {

double doppler_scale(double theta_kelvin) {
  if (theta_kelvin <= 0.0) return 0.0;
  const double k = 2.0 * std::numbers::pi / kD2Wavelength;
  const double v_thermal = std::sqrt(kBoltzmann * theta_kelvin / kRb87Mass);
  return k * v_thermal / kLinewidth;
}

double phase_mismatch_for_length(double length_m) {
  return 2.0 * std::numbers::pi * kGroundSplittingHz * length_m / kSpeedOfLight;
}

}  // namespace units

void LevelScheme::validate() const {
  if (!(gamma > 0.0)) throw std::invalid_argument("scheme.gamma must be positive");
  for (double s : {s_tilde_14, s_tilde_15, s_tilde_25, s_tilde_26}) {
    if (!(s >= 0.0)) throw std::invalid_argument("scheme strength factors must be non-negative");
  }
  if (!(s_13 > 0.0) || !(s_23 > 0.0)) {
    throw std::invalid_argument("scheme reference strengths must be positive");
  }
}

double LevelScheme::strength_1(int f_prime) const {
  switch (f_prime) {
    case 0: return s_tilde_14 * s_tilde_14 * s_13;
    case 1: return s_13;
    case 2: return s_tilde_15 * s_tilde_15 * s_13;
    default: return 0.0;
  }
}

double LevelScheme::strength_2(int f_prime) const {
  switch (f_prime) {
    case 1: return s_23;
    case 2: return s_tilde_25 * s_tilde_25 * s_23;
    case 3: return s_tilde_26 * s_tilde_26 * s_23;
    default: return 0.0;
  }
}

LevelScheme default_rb87_d2() {
  // Excited hyperfine intervals of 5P3/2 (MHz): F'=0..1: 72.218,
  // F'=1..2: 156.947, F'=2..3: 266.650.
  LevelScheme s;
  s.gamma = 1.0;
  s.delta_34 = -units::from_megahertz(72.218);
  s.delta_35 = units::from_megahertz(156.947);
  s.delta_36 = units::from_megahertz(156.947 + 266.650);
  s.delta_omega_21 = units::from_megahertz(6835.0);

  // Hyperfine strengths S_{FF'}: F=1 -> (1/6, 5/12, 5/12) for F'=0,1,2;
  // F=2 -> (1/20, 1/4, 7/10) for F'=1,2,3.
  s.s_13 = 5.0 / 12.0;
  s.s_23 = 1.0 / 20.0;
  s.s_tilde_14 = std::sqrt(2.0 / 5.0);
  s.s_tilde_15 = 1.0;
  s.s_tilde_25 = std::sqrt(5.0);
  s.s_tilde_26 = std::sqrt(14.0);
  return s;
}

LevelScheme three_level_scheme(double delta_omega_21) {
  LevelScheme s = default_rb87_d2();
  s.delta_omega_21 = delta_omega_21;
  s.s_tilde_14 = 0.0;
  s.s_tilde_15 = 0.0;
  s.s_tilde_25 = 0.0;
  s.s_tilde_26 = 0.0;
  s.s_13 = 1.0;
  s.s_23 = 1.0;
  return s;
}

double stark_shift_component(Complex omega_c, double delta_c, const LevelScheme& scheme,
                             double epsilon) {
  const double coupling2 = std::norm(scheme.s_tilde_26 * omega_c);
  if (coupling2 == 0.0) return 0.0;
  const double detuning = scheme.delta_36 - delta_c;
  if (std::abs(detuning) < epsilon) {
    throw EliminationError(fmt::format(
        "control detuning {} is within {} of the eliminated level (delta_36 = {})", delta_c,
        epsilon, scheme.delta_36));
  }
  return -coupling2 / (4.0 * detuning);
}

double stark_shift(Complex omega_c_plus, Complex omega_c_minus, const LevelScheme& scheme,
                   double delta_c_plus, double delta_c_minus, double epsilon) {
  return stark_shift_component(omega_c_plus, delta_c_plus, scheme, epsilon) +
         stark_shift_component(omega_c_minus, delta_c_minus, scheme, epsilon);
}

}  // namespace eitsim
