#pragma once

#include <limits>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "eitsim/atomic_model.hpp"
#include "eitsim/drive.hpp"
#include "eitsim/medium.hpp"

namespace eitsim {

/// Where the ground-state phase mismatch Delta_omega_21 L / c is applied.
///
/// backward_only re-gauges the forward field so that only the backward
/// four-wave-mixing pathway carries a mismatch (2 Phi); both_fields applies
/// Phi to each direction as in the raw propagation equation. The two are
/// related by a z-dependent phase and give identical intensities.
enum class PhaseGauge { backward_only, both_fields };

enum class KernelMode { serial, parallel };

/// Doppler class: one-photon shift k v / Gamma and its probability weight.
struct VelocityClass {
  double doppler = 0.0;
  double weight = 1.0;
};

inline constexpr double kColdMediumThreshold = 0.05;

/// Gauss-Hermite discretization of the Maxwell-Boltzmann distribution. Returns
/// a single v = 0 class when k_thermal < cold_threshold.
std::vector<VelocityClass> make_velocity_classes(double k_thermal, int nodes = 11,
                                                 double cold_threshold = kColdMediumThreshold);

struct SimulationGrid {
  int nz = 200;
  double dt = 0.002;
  double t_end = 100.0;
  int n_max = 3;
  std::vector<VelocityClass> velocity_classes{{0.0, 1.0}};
  PhaseGauge phase_gauge = PhaseGauge::backward_only;
  KernelMode kernel = KernelMode::parallel;
  int record_stride = 1;
  int snapshot_stride = 0;  // 0 disables z-resolved snapshots
  int stability_check_interval = 16;

  [[nodiscard]] int steps() const;
  [[nodiscard]] double z(int j) const { return static_cast<double>(j) / (nz - 1); }
  void validate() const;
};

/// Index map of the truncated Fourier components inside one (z, v) block.
///
/// rho21(m), m in [-n_max, n_max]: component exp(i m zeta t + i 2m kz).
/// rho31(k), rho51(k), k in [-n_max-1, n_max]: component with spatial order
/// 2k+1, so k = n is the "+(2n+1)" branch and k = -n-1 the "-(2n+1)" branch.
/// rho41(k), k in {-1, 0}. Forward sources live at k = 0, backward at k = -1.
class CoherenceLayout {
 public:
  explicit CoherenceLayout(int n_max);

  [[nodiscard]] int n_max() const { return n_max_; }
  [[nodiscard]] int block_size() const { return n21_ + 2 * n31_ + 2; }

  [[nodiscard]] int rho21(int m) const { return m + n_max_; }
  [[nodiscard]] int rho31(int k) const { return n21_ + k + n_max_ + 1; }
  [[nodiscard]] int rho51(int k) const { return n21_ + n31_ + k + n_max_ + 1; }
  [[nodiscard]] int rho41(int k) const { return n21_ + 2 * n31_ + k + 1; }

  [[nodiscard]] int rho21_plus(int n) const { return rho21(n); }
  [[nodiscard]] int rho21_minus(int n) const { return rho21(-n); }
  [[nodiscard]] int rho31_plus(int n) const { return rho31(n); }
  [[nodiscard]] int rho31_minus(int n) const { return rho31(-n - 1); }
  [[nodiscard]] int rho51_plus(int n) const { return rho51(n); }
  [[nodiscard]] int rho51_minus(int n) const { return rho51(-n - 1); }

 private:
  int n_max_;
  int n21_;
  int n31_;
};

/// Fourier components of all coherences on the (velocity class, z) grid.
/// Zero-initialized: all population in |1>, no coherence.
class CoherenceState {
 public:
  CoherenceState(int n_max, int nz, int n_velocity);

  [[nodiscard]] const CoherenceLayout& layout() const { return layout_; }
  [[nodiscard]] int nz() const { return nz_; }
  [[nodiscard]] int n_velocity() const { return nv_; }

  [[nodiscard]] Complex* block(int v, int j) { return data_.data() + offset(v, j); }
  [[nodiscard]] const Complex* block(int v, int j) const { return data_.data() + offset(v, j); }
  [[nodiscard]] Complex& at(int v, int j, int component) { return block(v, j)[component]; }
  [[nodiscard]] Complex at(int v, int j, int component) const { return block(v, j)[component]; }

  [[nodiscard]] std::span<Complex> data() { return data_; }
  [[nodiscard]] std::span<const Complex> data() const { return data_; }

  [[nodiscard]] double max_abs() const;

  double time = 0.0;

 private:
  [[nodiscard]] std::size_t offset(int v, int j) const {
    return (static_cast<std::size_t>(v) * nz_ + j) * layout_.block_size();
  }

  CoherenceLayout layout_;
  int nz_;
  int nv_;
  std::vector<Complex> data_;
};

/// Probe envelopes on the spatial grid.
struct FieldState {
  std::vector<Complex> omega_p_plus;
  std::vector<Complex> omega_p_minus;
  double time = 0.0;
};

class InstabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kInstabilityFactor = 1e3;

/// Advances the coherences by one explicit RK4 step with the probe fields
/// held fixed (single FieldState) over the step.
void bloch_step(CoherenceState& state, const FieldState& fields, const DriveConfig& drive,
                const LevelScheme& scheme, const SimulationGrid& grid, double gamma_21);

/// Same, with fields linearly interpolated between the step boundaries.
void bloch_step(CoherenceState& state, const FieldState& fields_begin,
                const FieldState& fields_end, const DriveConfig& drive,
                const LevelScheme& scheme, const SimulationGrid& grid, double gamma_21);

/// Quasi-static field solution for the current coherences: the forward field is
/// marched from z = 0 with the drive input, the backward field from z = L with
/// zero input.
FieldState field_sweep(const CoherenceState& state, const DriveConfig& drive,
                       const MediumConfig& medium, const LevelScheme& scheme,
                       const SimulationGrid& grid);

struct Snapshot {
  double time = 0.0;
  std::vector<Complex> omega_p_plus;
  std::vector<Complex> omega_p_minus;
};

/// Output traces. Probe intensities are normalized to the peak input intensity
/// (`input_peak_intensity`, in Gamma^2); control columns are |Omega_c| in Gamma.
struct TimeSeriesRecord {
  std::vector<double> time;
  std::vector<double> probe_in;
  std::vector<double> probe_out_forward;
  std::vector<double> probe_out_backward;
  std::vector<double> omega_c_plus;
  std::vector<double> omega_c_minus;
  double input_peak_intensity = 1.0;
  double truncation_ratio = std::numeric_limits<double>::infinity();
  std::vector<Snapshot> snapshots;
  std::vector<std::string> warnings;
};

inline constexpr double kTruncationWarningRatio = 3.0;

/// (n_max + 1) * max(|zeta|, 2 k v_rms) / Delta_omega_EIT; infinite when no
/// backward control is applied (higher orders are then never excited).
double truncation_ratio(const DriveConfig& drive, const MediumConfig& medium,
                        const SimulationGrid& grid);

/// gamma_21 at time t, including the control-tracking gamma_inh term.
double decoherence_rate(double t, const DriveConfig& drive, const MediumConfig& medium);

/// Integrates the truncated Maxwell-Bloch system over [0, grid.t_end].
TimeSeriesRecord propagate(const DriveConfig& drive, const MediumConfig& medium,
                           const LevelScheme& scheme, const SimulationGrid& grid);

void write_time_series_csv(std::ostream& os, const TimeSeriesRecord& record);
void write_snapshot_csv(std::ostream& os, const Snapshot& snapshot);

}  // namespace eitsim
