#pragma once

#include <array>
#include <functional>
#include <map>
#include <mutex>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "eitsim/spectra.hpp"

namespace eitsim {

struct NelderMeadResult {
  std::array<double, 2> x{};
  double value = 0.0;
  int evaluations = 0;
  /// Best objective value after every accepted simplex update.
  std::vector<double> history;
};

/// Downhill simplex minimization in two dimensions. Stops when the spread of
/// the simplex values falls below `ftol` or the evaluation budget is spent.
NelderMeadResult nelder_mead(const std::function<double(const std::array<double, 2>&)>& f,
                             std::array<double, 2> start, std::array<double, 2> step,
                             int max_evaluations, double ftol = 1e-10);

struct CalibrationOptions {
  double beta_start = 0.8;
  double gamma_start = 0.01;
  double half_span = 3.0;  // detuning half-width around two-photon resonance
  int points = 61;
  int max_evaluations = 400;
  double tolerance = 0.01;  // maximum accepted transmission mismatch
  QuadratureSpec quadrature{};
};

class CalibrationError : public std::runtime_error {
 public:
  CalibrationError(const std::string& what, EffectiveParams best)
      : std::runtime_error(what), best_(best) {}
  [[nodiscard]] const EffectiveParams& best() const { return best_; }

 private:
  EffectiveParams best_;
};

/// Detuning grid centred on the EIT resonance of the forward control.
std::vector<double> calibration_grid(const MediumConfig& medium, const DriveConfig& drive,
                                     const LevelScheme& scheme,
                                     const CalibrationOptions& options = {});

/// L-infinity mismatch between the homogeneous spectrum with (beta, gamma_inh)
/// and `target` on `detunings`.
double spectrum_mismatch(std::span<const double> detunings, std::span<const double> target,
                         const MediumConfig& medium, const DriveConfig& drive,
                         const LevelScheme& scheme, double beta, double gamma_inh);

/// Fits (beta, gamma_inh) of the homogeneous model to an arbitrary target
/// spectrum. Throws CalibrationError when the residual stays >= tolerance.
EffectiveParams calibrate_to_target(std::span<const double> detunings,
                                    std::span<const double> target, const MediumConfig& medium,
                                    const DriveConfig& drive, const LevelScheme& scheme,
                                    const CalibrationOptions& options = {});

/// Matches the homogeneous spectrum to the inhomogeneous one on `detunings`.
EffectiveParams calibrate(const MediumConfig& medium, const DriveConfig& drive,
                          const LevelScheme& scheme, std::span<const double> detunings,
                          const CalibrationOptions& options = {});

/// Same, on calibration_grid().
EffectiveParams calibrate(const MediumConfig& medium, const DriveConfig& drive,
                          const LevelScheme& scheme, const CalibrationOptions& options = {});

/// Thread-safe memo of calibrations keyed by the full parameter tuple.
class CalibrationCache {
 public:
  EffectiveParams get(const MediumConfig& medium, const DriveConfig& drive,
                      const LevelScheme& scheme, const CalibrationOptions& options = {});
  [[nodiscard]] std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, EffectiveParams> entries_;
};

struct CalibrationRow {
  double theta = 0.0;
  double omega_c = 0.0;
  EffectiveParams params;
};

/// CSV: `theta_K, omega_c_over_gamma, beta, gamma_inh_over_gamma, residual`.
void write_calibration_csv(std::ostream& os, std::span<const CalibrationRow> rows);

}  // namespace eitsim
