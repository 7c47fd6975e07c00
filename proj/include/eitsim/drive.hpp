#pragma once

#include <span>
#include <string>
#include <vector>

#include "eitsim/units.hpp"

namespace eitsim {

/// Piecewise-constant control Rabi envelope with raised-cosine transitions.
///
/// The envelope starts at `initial` and each switch moves it to a new level,
/// beginning at `start` and completing after `ramp` (ramp = 0 switches
/// instantaneously). Switches must be ordered and non-overlapping.
class ControlEnvelope {
 public:
  struct Switch {
    double start = 0.0;
    Complex level;
    double ramp = 0.0;
  };

  ControlEnvelope() = default;
  explicit ControlEnvelope(Complex initial) : initial_(initial) {}

  static ControlEnvelope constant(Complex level) { return ControlEnvelope(level); }

  ControlEnvelope& switch_to(double start, Complex level, double ramp);

  Complex operator()(double t) const;

  [[nodiscard]] Complex initial() const { return initial_; }
  [[nodiscard]] std::span<const Switch> switches() const { return switches_; }

  [[nodiscard]] double peak_magnitude() const;
  /// Smallest nonzero plateau magnitude (0 when the envelope is identically off).
  [[nodiscard]] double min_active_magnitude() const;
  [[nodiscard]] bool is_zero() const;

  ControlEnvelope scaled(double factor) const;

 private:
  Complex initial_{0.0, 0.0};
  std::vector<Switch> switches_;
};

/// Probe input at z = 0: a sum of Gaussian pulses and smoothly ramped CW
/// components. Gaussian components are parameterized by their intensity FWHM.
class ProbeEnvelope {
 public:
  enum class Kind { gaussian, cw };

  struct Component {
    Kind kind = Kind::gaussian;
    Complex amplitude;
    double center = 0.0;  // gaussian: peak time; cw: ramp start
    double width = 1.0;   // gaussian: intensity FWHM; cw: ramp duration
  };

  ProbeEnvelope() = default;

  static ProbeEnvelope gaussian(Complex peak, double fwhm, double center);
  static ProbeEnvelope cw(Complex amplitude, double ramp_start, double ramp);

  Complex operator()(double t) const;

  [[nodiscard]] std::span<const Component> components() const { return components_; }
  [[nodiscard]] bool is_zero() const { return components_.empty(); }

  /// Upper bound on |Omega_p(t)| (sum of component magnitudes).
  [[nodiscard]] double magnitude_bound() const;

  ProbeEnvelope operator+(const ProbeEnvelope& other) const;
  ProbeEnvelope scaled(Complex factor) const;

 private:
  std::vector<Component> components_;
};

/// Drive configuration: control envelopes, probe input and one-photon
/// detunings (units of Gamma).
struct DriveConfig {
  ControlEnvelope omega_c_plus;
  ControlEnvelope omega_c_minus;
  ProbeEnvelope probe;
  double delta_c_plus = 0.0;
  double delta_c_minus = 0.0;
  double delta_p_plus = 0.0;

  /// zeta = Delta_c^- - Delta_c^+ = Delta_p^- - Delta_p^+.
  [[nodiscard]] double zeta() const { return delta_c_minus - delta_c_plus; }
  [[nodiscard]] double delta_p_minus() const { return delta_p_plus + zeta(); }
  /// delta = Delta_p^+ - Delta_c^+ (before light-shift correction).
  [[nodiscard]] double delta_two_photon() const { return delta_p_plus - delta_c_plus; }

  /// Ratio of the probe bound to the weakest active control plateau.
  [[nodiscard]] double weak_probe_ratio() const;
};

inline constexpr double kWeakProbeWarningRatio = 0.1;

/// Warnings about the drive (currently the weak-probe condition).
std::vector<std::string> drive_warnings(const DriveConfig& drive);

}  // namespace eitsim
