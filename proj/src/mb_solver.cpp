#include "eitsim/mb_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "eitsim/kernels.hpp"
#include "eitsim/quadrature.hpp"

namespace eitsim {

std::vector<VelocityClass> make_velocity_classes(double k_thermal, int nodes,
                                                 double cold_threshold) {
  if (k_thermal < 0.0) throw std::invalid_argument("k_thermal must be non-negative");
  if (k_thermal < cold_threshold) return {{0.0, 1.0}};
  if (nodes < 1) throw std::invalid_argument("velocity_nodes must be positive");
  const QuadratureRule rule = gauss_hermite(nodes);
  std::vector<VelocityClass> out(nodes);
  for (int i = 0; i < nodes; ++i) {
    out[i].doppler = std::sqrt(2.0) * k_thermal * rule.nodes[i];
    out[i].weight = rule.weights[i] / std::sqrt(std::numbers::pi);
  }
  return out;
}

int SimulationGrid::steps() const {
  return std::max(1, static_cast<int>(std::ceil(t_end / dt - 1e-9)));
}

void SimulationGrid::validate() const {
  auto require = [](bool ok, const char* field, const char* what) {
    if (!ok) throw std::invalid_argument(fmt::format("grid.{} {}", field, what));
  };
  require(nz >= 32, "nz", "must be at least 32");
  require(dt > 0.0 && std::isfinite(dt), "dt", "must be positive");
  require(t_end > 0.0 && std::isfinite(t_end), "t_end", "must be positive");
  require(n_max >= 0, "n_max", "must be non-negative");
  require(!velocity_classes.empty(), "velocity_nodes", "must give at least one class");
  require(record_stride >= 1, "record_stride", "must be at least 1");
  require(snapshot_stride >= 0, "snapshot_stride", "must be non-negative");
  require(stability_check_interval >= 1, "stability_check_interval", "must be at least 1");
  double total = 0.0;
  for (const auto& c : velocity_classes) total += c.weight;
  require(std::abs(total - 1.0) < 1e-12, "velocity_nodes", "weights must sum to 1");
}

CoherenceLayout::CoherenceLayout(int n_max)
    : n_max_(n_max), n21_(2 * n_max + 1), n31_(2 * n_max + 2) {
  if (n_max < 0) throw std::invalid_argument("n_max must be non-negative");
}

CoherenceState::CoherenceState(int n_max, int nz, int n_velocity)
    : layout_(n_max), nz_(nz), nv_(n_velocity),
      data_(static_cast<std::size_t>(nz) * n_velocity * layout_.block_size()) {}

double CoherenceState::max_abs() const {
  double m = 0.0;
  for (const auto& x : data_) {
    const double a = std::abs(x);
    if (!(a <= m)) m = a;  // propagates NaN
  }
  return m;
}

namespace {

struct Phases {
  double forward = 0.0;
  double backward = 0.0;
};

Phases field_phases(const MediumConfig& medium, PhaseGauge gauge) {
  if (gauge == PhaseGauge::both_fields) return {medium.phase_mismatch, medium.phase_mismatch};
  return {0.0, 2.0 * medium.phase_mismatch};
}

void sweep_into(const kernels::StageCoefficients& c, const std::vector<VelocityClass>& classes,
                const Complex* y, Complex input, double od_gamma, Phases phases, bool parallel,
                std::vector<Complex>& src_p, std::vector<Complex>& src_m,
                std::vector<Complex>& scratch, FieldState& out) {
  const auto nz = static_cast<std::size_t>(c.nz);
  src_p.resize(nz);
  src_m.resize(nz);
  scratch.resize(nz);
  out.omega_p_plus.resize(nz);
  out.omega_p_minus.resize(nz);
  if (parallel) {
    kernels::sources_parallel(c, classes, y, src_p.data(), src_m.data());
  } else {
    kernels::sources_serial(c, classes, y, src_p.data(), src_m.data());
  }
  const Complex coupling = 0.5 * kI * od_gamma;
  const double h = 1.0 / static_cast<double>(nz - 1);
  for (auto& s : src_p) s *= coupling;
  kernels::march(nz, h, phases.forward, input, src_p.data(), out.omega_p_plus.data());
  // Backward field: march in s = 1 - z from zero input at the far end.
  for (std::size_t j = 0; j < nz; ++j) scratch[j] = coupling * src_m[nz - 1 - j];
  kernels::march(nz, h, phases.backward, Complex{}, scratch.data(), src_m.data());
  for (std::size_t j = 0; j < nz; ++j) out.omega_p_minus[j] = src_m[nz - 1 - j];
}

double instability_threshold(const DriveConfig& drive, double field_bound) {
  return kInstabilityFactor * std::max({drive.probe.magnitude_bound(), field_bound, 1e-300});
}

void check_stability(const CoherenceState& state, double threshold, double t) {
  const double m = state.max_abs();
  if (!(m <= threshold)) {
    throw InstabilityError(fmt::format(
        "coherence magnitude {:.3g} exceeds {:.3g} at t = {:.4g}; reduce grid.dt", m, threshold,
        t));
  }
}

double max_field(const FieldState& f) {
  double m = 0.0;
  for (const auto& x : f.omega_p_plus) m = std::max(m, std::abs(x));
  for (const auto& x : f.omega_p_minus) m = std::max(m, std::abs(x));
  return m;
}

void check_shape(const CoherenceState& state, const SimulationGrid& grid) {
  if (state.nz() != grid.nz || state.n_velocity() != static_cast<int>(grid.velocity_classes.size()) ||
      state.layout().n_max() != grid.n_max) {
    throw std::invalid_argument("coherence state does not match the simulation grid");
  }
}

}  // namespace

FieldState field_sweep(const CoherenceState& state, const DriveConfig& drive,
                       const MediumConfig& medium, const LevelScheme& scheme,
                       const SimulationGrid& grid) {
  check_shape(state, grid);
  auto c = kernels::stage_coefficients(scheme, drive, grid, state.time, medium.gamma_21());
  std::vector<Complex> sp, sm, scratch;
  FieldState out;
  out.time = state.time;
  sweep_into(c, grid.velocity_classes, state.data().data(), drive.probe(state.time),
             medium.od * scheme.gamma, field_phases(medium, grid.phase_gauge),
             grid.kernel == KernelMode::parallel, sp, sm, scratch, out);
  return out;
}

void bloch_step(CoherenceState& state, const FieldState& fields, const DriveConfig& drive,
                const LevelScheme& scheme, const SimulationGrid& grid, double gamma_21) {
  bloch_step(state, fields, fields, drive, scheme, grid, gamma_21);
}

void bloch_step(CoherenceState& state, const FieldState& fields_begin,
                const FieldState& fields_end, const DriveConfig& drive,
                const LevelScheme& scheme, const SimulationGrid& grid, double gamma_21) {
  check_shape(state, grid);
  const auto nz = static_cast<std::size_t>(grid.nz);
  for (const FieldState* f : {&fields_begin, &fields_end}) {
    if (f->omega_p_plus.size() != nz || f->omega_p_minus.size() != nz) {
      throw std::invalid_argument("field arrays do not match grid.nz");
    }
  }
  const bool par = grid.kernel == KernelMode::parallel;
  const double t = state.time, h = grid.dt;
  const std::size_t n = state.data().size();
  std::vector<Complex> k1(n), k2(n), k3(n), k4(n), tmp(n);
  std::vector<Complex> mid_p(nz), mid_m(nz);
  for (std::size_t j = 0; j < nz; ++j) {
    mid_p[j] = 0.5 * (fields_begin.omega_p_plus[j] + fields_end.omega_p_plus[j]);
    mid_m[j] = 0.5 * (fields_begin.omega_p_minus[j] + fields_end.omega_p_minus[j]);
  }

  auto rhs = [&](double time, const Complex* y, const std::vector<Complex>& fp,
                 const std::vector<Complex>& fm, Complex* dy) {
    const auto c = kernels::stage_coefficients(scheme, drive, grid, time, gamma_21);
    if (par) {
      kernels::rhs_parallel(c, y, fp.data(), fm.data(), dy);
    } else {
      kernels::rhs_serial(c, y, fp.data(), fm.data(), dy);
    }
  };
  auto axpy = par ? kernels::axpy_parallel : kernels::axpy_serial;

  Complex* y = state.data().data();
  rhs(t, y, fields_begin.omega_p_plus, fields_begin.omega_p_minus, k1.data());
  axpy(n, 0.5 * h, k1.data(), y, tmp.data());
  rhs(t + 0.5 * h, tmp.data(), mid_p, mid_m, k2.data());
  axpy(n, 0.5 * h, k2.data(), y, tmp.data());
  rhs(t + 0.5 * h, tmp.data(), mid_p, mid_m, k3.data());
  axpy(n, h, k3.data(), y, tmp.data());
  rhs(t + h, tmp.data(), fields_end.omega_p_plus, fields_end.omega_p_minus, k4.data());
  if (par) {
    kernels::rk4_combine_parallel(n, h, k1.data(), k2.data(), k3.data(), k4.data(), y);
  } else {
    kernels::rk4_combine_serial(n, h, k1.data(), k2.data(), k3.data(), k4.data(), y);
  }
  state.time = t + h;
  check_stability(state,
                  instability_threshold(drive, std::max(max_field(fields_begin),
                                                        max_field(fields_end))),
                  state.time);
}

double decoherence_rate(double t, const DriveConfig& drive, const MediumConfig& medium) {
  if (!medium.gamma_inh_tracks_control) return medium.gamma_21();
  const double pp = drive.omega_c_plus.peak_magnitude();
  const double pm = drive.omega_c_minus.peak_magnitude();
  const double reference = pp * pp + pm * pm;
  if (reference == 0.0) return medium.gamma_trd;
  const double now = std::norm(drive.omega_c_plus(t)) + std::norm(drive.omega_c_minus(t));
  return medium.gamma_trd + medium.gamma_inh * now / reference;
}

double truncation_ratio(const DriveConfig& drive, const MediumConfig& medium,
                        const SimulationGrid& grid) {
  if (drive.omega_c_minus.is_zero()) return std::numeric_limits<double>::infinity();
  const double oc = drive.omega_c_plus.peak_magnitude();
  if (medium.od <= 0.0 || oc == 0.0) return std::numeric_limits<double>::infinity();
  const double eit_width = oc * oc / std::sqrt(medium.od);
  double k2 = 0.0;
  for (const auto& c : grid.velocity_classes) k2 += c.weight * c.doppler * c.doppler;
  const double spread = std::max(std::abs(drive.zeta()), 2.0 * std::sqrt(k2));
  if (spread == 0.0) return std::numeric_limits<double>::infinity();
  return (grid.n_max + 1) * spread / eit_width;
}

TimeSeriesRecord propagate(const DriveConfig& drive, const MediumConfig& medium,
                           const LevelScheme& scheme, const SimulationGrid& grid) {
  medium.validate();
  grid.validate();
  scheme.validate();

  TimeSeriesRecord rec;
  rec.warnings = drive_warnings(drive);
  rec.truncation_ratio = truncation_ratio(drive, medium, grid);
  if (rec.truncation_ratio < kTruncationWarningRatio) {
    rec.warnings.push_back(fmt::format(
        "spatial-harmonic truncation may be inaccurate: (n_max+1)*max(|zeta|, 2kv)/dw_EIT = "
        "{:.3g} < {:.3g}",
        rec.truncation_ratio, kTruncationWarningRatio));
  }
  for (const auto& w : rec.warnings) spdlog::warn("{}", w);

  const int nv = static_cast<int>(grid.velocity_classes.size());
  CoherenceState state(grid.n_max, grid.nz, nv);
  const std::size_t n = state.data().size();
  const int steps = grid.steps();
  const double h = grid.t_end / steps;
  const bool par = grid.kernel == KernelMode::parallel;
  const Phases phases = field_phases(medium, grid.phase_gauge);
  const double od_gamma = medium.od * scheme.gamma;
  const auto& classes = grid.velocity_classes;
  auto axpy = par ? kernels::axpy_parallel : kernels::axpy_serial;

  std::vector<Complex> k1(n), k2(n), k3(n), k4(n), tmp(n), sp, sm, scratch;
  FieldState fields, stage_fields;

  auto coefficients = [&](double t) {
    return kernels::stage_coefficients(scheme, drive, grid, t, decoherence_rate(t, drive, medium));
  };
  auto sweep = [&](const kernels::StageCoefficients& c, const Complex* y, double t,
                   FieldState& out) {
    sweep_into(c, classes, y, drive.probe(t), od_gamma, phases, par, sp, sm, scratch, out);
    out.time = t;
  };
  auto rhs = [&](const kernels::StageCoefficients& c, const Complex* y, const FieldState& f,
                 Complex* dy) {
    if (par) {
      kernels::rhs_parallel(c, y, f.omega_p_plus.data(), f.omega_p_minus.data(), dy);
    } else {
      kernels::rhs_serial(c, y, f.omega_p_plus.data(), f.omega_p_minus.data(), dy);
    }
  };

  double peak_in = 0.0;
  auto record = [&](int step, double t) {
    if (step % grid.record_stride == 0 || step == steps) {
      const Complex in = drive.probe(t);
      rec.time.push_back(t);
      rec.probe_in.push_back(std::norm(in));
      rec.probe_out_forward.push_back(std::norm(fields.omega_p_plus.back()));
      rec.probe_out_backward.push_back(std::norm(fields.omega_p_minus.front()));
      rec.omega_c_plus.push_back(std::abs(drive.omega_c_plus(t)));
      rec.omega_c_minus.push_back(std::abs(drive.omega_c_minus(t)));
    }
    peak_in = std::max(peak_in, std::norm(drive.probe(t)));
    if (grid.snapshot_stride > 0 && (step % grid.snapshot_stride == 0 || step == steps)) {
      rec.snapshots.push_back({t, fields.omega_p_plus, fields.omega_p_minus});
    }
  };

  Complex* y = state.data().data();
  auto c_now = coefficients(0.0);
  sweep(c_now, y, 0.0, fields);
  record(0, 0.0);
  const double threshold = instability_threshold(drive, 0.0);

  for (int step = 1; step <= steps; ++step) {
    const double t = (step - 1) * h;
    const auto c_mid = coefficients(t + 0.5 * h);
    const auto c_end = coefficients(t + h);

    rhs(c_now, y, fields, k1.data());
    axpy(n, 0.5 * h, k1.data(), y, tmp.data());
    sweep(c_mid, tmp.data(), t + 0.5 * h, stage_fields);
    rhs(c_mid, tmp.data(), stage_fields, k2.data());
    axpy(n, 0.5 * h, k2.data(), y, tmp.data());
    sweep(c_mid, tmp.data(), t + 0.5 * h, stage_fields);
    rhs(c_mid, tmp.data(), stage_fields, k3.data());
    axpy(n, h, k3.data(), y, tmp.data());
    sweep(c_end, tmp.data(), t + h, stage_fields);
    rhs(c_end, tmp.data(), stage_fields, k4.data());
    if (par) {
      kernels::rk4_combine_parallel(n, h, k1.data(), k2.data(), k3.data(), k4.data(), y);
    } else {
      kernels::rk4_combine_serial(n, h, k1.data(), k2.data(), k3.data(), k4.data(), y);
    }
    state.time = step * h;
    c_now = c_end;
    sweep(c_now, y, state.time, fields);

    if (step % grid.stability_check_interval == 0 || step == steps) {
      check_stability(state, threshold, state.time);
    }
    record(step, state.time);
  }

  rec.input_peak_intensity = peak_in > 0.0 ? peak_in : 1.0;
  const double inv = 1.0 / rec.input_peak_intensity;
  for (auto* series : {&rec.probe_in, &rec.probe_out_forward, &rec.probe_out_backward}) {
    for (auto& x : *series) x *= inv;
  }
  return rec;
}

void write_time_series_csv(std::ostream& os, const TimeSeriesRecord& record) {
  os << "t_over_gamma_inv,probe_out_forward,probe_out_backward,omega_c_plus,omega_c_minus\n";
  for (std::size_t i = 0; i < record.time.size(); ++i) {
    os << fmt::format("{:.9g},{:.9g},{:.9g},{:.9g},{:.9g}\n", record.time[i],
                      record.probe_out_forward[i], record.probe_out_backward[i],
                      record.omega_c_plus[i], record.omega_c_minus[i]);
  }
}

void write_snapshot_csv(std::ostream& os, const Snapshot& snapshot) {
  os << "z_over_L,re_omega_p_plus,im_omega_p_plus,re_omega_p_minus,im_omega_p_minus\n";
  const std::size_t nz = snapshot.omega_p_plus.size();
  for (std::size_t j = 0; j < nz; ++j) {
    const double z = nz > 1 ? static_cast<double>(j) / (nz - 1) : 0.0;
    os << fmt::format("{:.9g},{:.9g},{:.9g},{:.9g},{:.9g}\n", z, snapshot.omega_p_plus[j].real(),
                      snapshot.omega_p_plus[j].imag(), snapshot.omega_p_minus[j].real(),
                      snapshot.omega_p_minus[j].imag());
  }
}

}  // namespace eitsim
