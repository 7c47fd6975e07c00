#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "eitsim/calibration.hpp"
#include "eitsim/mb_solver.hpp"
#include "eitsim/scenarios.hpp"

namespace eitsim {

inline constexpr int kConfigFormatVersion = 1;

/// Invalid configuration: carries the dotted key path and, when known, the
/// 1-based source line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& message, int line = 0);
  [[nodiscard]] const std::string& path() const { return path_; }
  [[nodiscard]] int line() const { return line_; }

 private:
  std::string path_;
  int line_;
};

enum class SpectrumModel { inhomogeneous, homogeneous };

struct SpectrumSettings {
  double start = -8.0;
  double stop = 8.0;
  int points = 161;
  SpectrumModel model = SpectrumModel::inhomogeneous;
  QuadratureSpec quadrature{};
};

/// How the effective 1D parameters (beta, gamma_inh) are obtained.
struct EffectiveSettings {
  bool calibrate = false;
  double beta = 1.0;
  double gamma_inh = 0.0;
};

struct CalibrationSettings {
  CalibrationOptions options{};
  std::vector<double> temperatures_uK;  // empty: medium temperature only
  std::vector<double> omega_c;          // empty: drive.omega_c_plus only
};

struct SweepAxis {
  std::string parameter;  // dotted key path, e.g. drive.omega_c_minus
  std::vector<YAML::Node> values;
};

struct SweepSettings {
  std::string command;
  std::vector<SweepAxis> axes;
};

/// Fully validated run configuration. Quantities marked `auto` in the document
/// are resolved later by resolve_run().
struct RunConfig {
  std::string scheme_name = "rb87_d2";
  LevelScheme scheme;

  MediumConfig medium;  // k_thermal, sigma_a, phase_mismatch resolved later
  double temperature_uK = 0.0;
  double trap_depth_mK = 2.25;
  double length_m = 0.1;
  bool sigma_a_auto = true;
  bool phase_mismatch_auto = true;

  double omega_c_plus = 3.0;
  double omega_c_minus = 0.0;
  double delta_c_plus = 0.0;
  double delta_c_minus = 0.0;
  std::optional<double> delta_p;  // empty: EIT resonance

  PulseSpec pulse;
  bool pulse_center_auto = true;
  StorageProtocol storage;
  SlpProtocol slp;

  SimulationGrid grid;
  int velocity_nodes = 11;
  bool t_end_auto = true;
  double tail = 60.0;

  EffectiveSettings effective;
  SpectrumSettings spectrum;
  CalibrationSettings calibration;
  SweepSettings sweep;

  std::string output_directory = "out";

  /// Echo of every key with the value actually used.
  YAML::Node resolved;
  /// Dotted paths whose value came from a built-in default.
  std::vector<std::string> defaults_applied;
};

RunConfig parse_config(const YAML::Node& document);
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

/// Sets `value` at dotted `path` inside a copy of `document`, creating maps as
/// needed.
YAML::Node with_override(const YAML::Node& document, const std::string& path,
                         const YAML::Node& value);

/// Physical inputs of one run after resolving `auto` values and calibration.
struct ResolvedRun {
  LevelScheme scheme;
  MediumConfig medium;
  EffectiveParams effective;
  bool calibrated = false;
  DriveConfig drive;
  SimulationGrid grid;
  double delta_p = 0.0;
};

enum class Scenario { spectrum, slowlight, storage, slp };

/// Builds the drive and grid for `scenario`. Runs the calibration when the
/// configuration requests it (memoized in `cache` when given).
ResolvedRun resolve_run(const RunConfig& config, Scenario scenario,
                        CalibrationCache* cache = nullptr);

/// sigma_pc * sqrt(kB Theta / (2 U)) for a harmonic trap of depth U.
double thermal_cloud_radius(double sigma_pc, double temperature_uK, double trap_depth_mK);

}  // namespace eitsim
