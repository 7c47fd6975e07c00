#pragma once

namespace eitsim {

/// Properties of the atomic medium. Rates are in units of Gamma; the two
/// radii share an arbitrary length unit since only their ratio matters.
struct MediumConfig {
  double od = 0.0;      // resonant optical depth on |1>-|3>
  double length = 1.0;  // positions are measured in units of this length
  double theta = 0.0;   // temperature in kelvin
  double gamma_trd = 0.0;
  double gamma_inh = 0.0;
  double sigma_pc = 1.0;  // probe/control mode radius (flat beam if infinite)
  double sigma_a = 0.1;   // atomic density radius
  double k_thermal = 0.0;  // Doppler scale k*v_thermal/Gamma
  /// Accumulated phase Delta_omega_21 * L / c across the medium.
  double phase_mismatch = 0.0;
  /// When true the gamma_inh contribution scales with the instantaneous
  /// control intensity relative to its peak (vanishing while stored).
  bool gamma_inh_tracks_control = true;

  [[nodiscard]] double gamma_21() const { return gamma_trd + gamma_inh; }

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

}  // namespace eitsim
