#pragma once

#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eitsim/atomic_model.hpp"
#include "eitsim/drive.hpp"
#include "eitsim/mb_solver.hpp"
#include "eitsim/medium.hpp"

namespace eitsim {

/// Gaussian probe pulse, FWHM of the intensity profile.
struct PulseSpec {
  double fwhm = 8.0;
  Complex peak{0.01, 0.0};
  double center = 16.0;

  [[nodiscard]] ProbeEnvelope envelope() const;
  /// Intensity-spectrum FWHM 4 ln2 / fwhm (angular, units of Gamma).
  [[nodiscard]] double bandwidth() const;
};

/// Named analysis interval [start, end) with its integrated output energies.
struct TimeWindow {
  std::string name;
  double start = 0.0;
  double end = 0.0;
  double energy_forward = 0.0;
  double energy_backward = 0.0;
};

/// Energies are time integrals of |Omega_p|^2 (Gamma^2 x 1/Gamma).
struct ScenarioResult {
  std::string kind;
  double input_energy = 0.0;
  double output_energy_forward = 0.0;
  double output_energy_backward = 0.0;
  double delay = std::numeric_limits<double>::quiet_NaN();
  double transmission = std::numeric_limits<double>::quiet_NaN();
  double efficiency = std::numeric_limits<double>::quiet_NaN();
  double storage_time = std::numeric_limits<double>::quiet_NaN();
  bool slp_signature = false;
  std::vector<TimeWindow> windows;
  std::vector<std::string> warnings;
  TimeSeriesRecord record;

  [[nodiscard]] const TimeWindow& window(const std::string& name) const;
};

/// (Omega_c^eff)^2 / (Gamma sqrt(OD)).
double eit_window_width(double od, double omega_c_eff, const LevelScheme& scheme);

/// -Delta_omega_21 * v_g / c for a group velocity given as a fraction of c.
double phase_matching_detuning(double v_g_over_c, const LevelScheme& scheme);

/// Exact integral of the piecewise-linear interpolant of (t, y) over [a, b].
double integrate_window(const std::vector<double>& t, const std::vector<double>& y, double a,
                        double b);

/// Constant forward control with the probe pulse.
DriveConfig slow_light_drive(Complex omega_c, const PulseSpec& pulse, double delta_c,
                             double delta_p);

struct StorageProtocol {
  double switch_off = 20.0;    // start of the switch-off ramp
  double storage_time = 22.9;  // switch-off ramp start to switch-on ramp start
  double ramp = 3.81;
};

DriveConfig storage_drive(Complex omega_c, const PulseSpec& pulse, const StorageProtocol& protocol,
                          double delta_c, double delta_p);

struct SlpProtocol {
  double backward_on = 16.0;   // start of the backward switch-on ramp
  double backward_off = 36.0;  // start of the backward switch-off ramp
  double ramp = 3.81;
};

DriveConfig slp_drive(Complex omega_c_plus, Complex omega_c_minus, const PulseSpec& pulse,
                      const SlpProtocol& protocol, double delta_c_plus, double delta_c_minus,
                      double delta_p);

/// Slow light: delay (intensity-centroid shift against a vacuum reference) and
/// energy transmission.
ScenarioResult run_slow_light(const DriveConfig& drive, const MediumConfig& medium,
                              const LevelScheme& scheme, const SimulationGrid& grid);

/// Storage and retrieval: windows `transmitted`, `storage`, `retrieval`; the
/// efficiency is the forward retrieval energy over the input energy. The
/// control must switch off once and back on once.
ScenarioResult run_storage(const DriveConfig& drive, const MediumConfig& medium,
                           const LevelScheme& scheme, const SimulationGrid& grid);

/// Stationary light: windows `slow_light`, `leakage` (dual drive) and
/// `retrieval` (from the backward switch-off). Without a backward control the
/// result coincides with run_slow_light.
ScenarioResult run_slp(const DriveConfig& drive, const MediumConfig& medium,
                       const LevelScheme& scheme, const SimulationGrid& grid);

/// Fraction of the input energy the retrieval window must exceed for the SLP
/// signature flag.
inline constexpr double kSlpSignatureFraction = 1e-3;

nlohmann::json to_json(const ScenarioResult& result);

}  // namespace eitsim
