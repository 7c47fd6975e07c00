#pragma once

#include <complex>
#include <numbers>

namespace eitsim {

using Complex = std::complex<double>;

inline constexpr Complex kI{0.0, 1.0};

namespace units {

// All rates are expressed in units of the excited-state linewidth, all times
// in 1/Gamma and positions in units of the medium length.
inline constexpr double kLinewidthHz = 6.07e6;
inline constexpr double kLinewidth = 2.0 * std::numbers::pi * kLinewidthHz;  // rad/s

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kBoltzmann = 1.380649e-23;
inline constexpr double kRb87Mass = 1.443160648e-25;       // kg
inline constexpr double kD2Wavelength = 780.241209686e-9;  // m
inline constexpr double kGroundSplittingHz = 6.835e9;

/// Converts a duration in microseconds into units of 1/Gamma.
constexpr double from_microseconds(double us) { return us * 1e-6 * kLinewidth; }
constexpr double to_microseconds(double t) { return t / kLinewidth * 1e6; }

/// Converts a frequency given in MHz (cyclic) into units of Gamma.
constexpr double from_megahertz(double mhz) { return mhz * 1e6 / kLinewidthHz; }

/// One-dimensional thermal Doppler scale k*sqrt(kB*T/m)/Gamma for Rb-87 on D2.
double doppler_scale(double theta_kelvin);

/// Accumulated phase Delta_omega_21 * L / c of the ground-state splitting over
/// a medium of the given length in metres.
double phase_mismatch_for_length(double length_m);

}  // namespace units
}  // namespace eitsim
