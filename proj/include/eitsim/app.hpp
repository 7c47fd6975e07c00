#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "eitsim/calibration.hpp"
#include "eitsim/config.hpp"

namespace eitsim {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNumericalFailure = 3;

inline constexpr int kOutputFormatVersion = 1;

/// Failure inside the numerics, tagged with the sweep tuple when there is one.
class RunError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommandOptions {
  /// Overrides grid.snapshot_stride when >= 0.
  int snapshot_stride = -1;
  /// Calibration memo shared between runs (may be null).
  CalibrationCache* cache = nullptr;
};

bool is_command(const std::string& name);

/// Executes one non-sweep command and writes its result files into `out`.
/// Returns the name of the primary result file.
std::string run_command(const std::string& command, const RunConfig& config,
                        const std::filesystem::path& out, const CommandOptions& options = {});

struct SweepEntry {
  std::vector<std::pair<std::string, YAML::Node>> parameters;
  std::string directory;
  std::string result;
  std::string error;  // empty on success
};

/// Cross product of the sweep axes. Each tuple runs sweep.command in its own
/// subdirectory; `index.json` and `index.csv` map tuples to result files.
/// Returns the entries in enumeration order (first axis slowest).
std::vector<SweepEntry> run_sweep(const YAML::Node& document, const RunConfig& config,
                                  const std::filesystem::path& out,
                                  const CommandOptions& options = {});

/// Document describing the run: the resolved configuration, derived values and
/// the list of defaulted keys.
YAML::Node resolved_document(const RunConfig& config, const ResolvedRun* run);

void write_resolved_config(const std::filesystem::path& file, const RunConfig& config,
                           const ResolvedRun* run);

}  // namespace eitsim
