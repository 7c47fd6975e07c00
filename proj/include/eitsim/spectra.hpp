#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "eitsim/atomic_model.hpp"
#include "eitsim/drive.hpp"
#include "eitsim/medium.hpp"

namespace eitsim {

struct ComplexAbsorption {
  Complex alpha;
  double detuning = 0.0;
};

/// Effective 1D parameters that stand in for the radial inhomogeneity.
struct EffectiveParams {
  double beta = 1.0;
  double gamma_inh = 0.0;
  double residual = 0.0;
};

/// Steady-state absorption coefficient of the five-level system for a single
/// forward control. `doppler` is the one-photon Doppler shift k*v/Gamma,
/// applied identically to probe and control (co-propagating). The light shift
/// of the eliminated level is folded into the two-photon denominator.
ComplexAbsorption absorption_coefficient(double delta_p, Complex omega_c, double delta_c,
                                         const LevelScheme& scheme, double gamma_21,
                                         double doppler = 0.0);

/// Control amplitude used for steady-state spectra: the strongest plateau of
/// the forward envelope.
Complex cw_control(const DriveConfig& drive);

/// exp[-(Gamma/2) OD Re alpha] for the homogeneous 1D medium. With `effective`
/// the control is scaled by beta and gamma_21 = gamma_trd + effective.gamma_inh.
double transmission_homogeneous(double delta_p, const MediumConfig& medium,
                                const DriveConfig& drive, const LevelScheme& scheme,
                                const std::optional<EffectiveParams>& effective = std::nullopt);

struct QuadratureSpec {
  int radial_nodes = 48;
  int velocity_nodes = 16;
  bool check_convergence = false;
};

inline constexpr double kQuadratureTolerance = 1e-4;

struct InhomogeneousTransmission {
  double transmission = 1.0;
  /// |T(2n) - T(n)| when the convergence check ran, otherwise NaN.
  double doubled_difference = 0.0;
  bool converged = true;
};

/// Transmission through the radially inhomogeneous, thermally averaged medium.
/// Absorption is averaged over n(r) * Omega_p(r) * p(v) with the same OD
/// normalization as the homogeneous case, so a point-like cold ensemble on
/// axis reproduces transmission_homogeneous. Uses gamma_21 = gamma_trd.
InhomogeneousTransmission transmission_inhomogeneous(double delta_p, const MediumConfig& medium,
                                                     const DriveConfig& drive,
                                                     const LevelScheme& scheme,
                                                     const QuadratureSpec& quad = {});

struct SpectrumPoint {
  double delta_p = 0.0;
  double transmission = 0.0;
};

std::vector<double> linear_grid(double start, double stop, int points);

/// Evaluates `transmission` on every detuning (parallel over detunings).
std::vector<SpectrumPoint> sweep_spectrum(std::span<const double> detunings,
                                          const std::function<double(double)>& transmission);

/// CSV: header `delta_p_over_gamma, transmission`.
void write_spectrum_csv(std::ostream& os, std::span<const SpectrumPoint> points);

struct PeakLocation {
  double delta_p = 0.0;
  double value = 0.0;
};

/// Maximum of f on [lo, hi]: coarse scan followed by golden-section refinement.
PeakLocation find_maximum(const std::function<double(double)>& f, double lo, double hi,
                          int coarse_points = 401, double tolerance = 1e-9);

/// Probe detuning of the EIT transmission maximum for a single forward control.
double eit_resonance_detuning(const LevelScheme& scheme, Complex omega_c, double delta_c,
                              double gamma_21);

}  // namespace eitsim
