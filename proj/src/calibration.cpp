#include "eitsim/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace eitsim {

NelderMeadResult nelder_mead(const std::function<double(const std::array<double, 2>&)>& f,
                             std::array<double, 2> start, std::array<double, 2> step,
                             int max_evaluations, double ftol) {
  using Point = std::array<double, 2>;
  NelderMeadResult out;
  std::array<Point, 3> p{start, start, start};
  p[1][0] += step[0];
  p[2][1] += step[1];
  std::array<double, 3> v{};
  auto eval = [&](const Point& x) {
    ++out.evaluations;
    return f(x);
  };
  for (int i = 0; i < 3; ++i) v[i] = eval(p[i]);

  auto combine = [](const Point& a, const Point& b, double t) {
    return Point{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
  };

  while (out.evaluations < max_evaluations) {
    std::array<int, 3> idx{0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return v[a] < v[b]; });
    const int best = idx[0], mid = idx[1], worst = idx[2];
    out.history.push_back(v[best]);
    if (v[worst] - v[best] <= ftol) break;

    const Point centroid = combine(p[best], p[mid], 0.5);
    const Point reflected = combine(centroid, p[worst], -1.0);
    const double fr = eval(reflected);
    if (fr < v[best]) {
      const Point expanded = combine(centroid, p[worst], -2.0);
      const double fe = eval(expanded);
      if (fe < fr) {
        p[worst] = expanded;
        v[worst] = fe;
      } else {
        p[worst] = reflected;
        v[worst] = fr;
      }
      continue;
    }
    if (fr < v[mid]) {
      p[worst] = reflected;
      v[worst] = fr;
      continue;
    }
    const bool outside = fr < v[worst];
    const Point contracted = outside ? combine(centroid, reflected, 0.5)
                                     : combine(centroid, p[worst], 0.5);
    const double fc = eval(contracted);
    if (fc < (outside ? fr : v[worst])) {
      p[worst] = contracted;
      v[worst] = fc;
      continue;
    }
    for (int i : {mid, worst}) {
      p[i] = combine(p[best], p[i], 0.5);
      v[i] = eval(p[i]);
    }
  }
  const auto best = static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
  out.x = p[best];
  out.value = v[best];
  if (out.history.empty() || out.history.back() != out.value) out.history.push_back(out.value);
  return out;
}

std::vector<double> calibration_grid(const MediumConfig& medium, const DriveConfig& drive,
                                     const LevelScheme& scheme,
                                     const CalibrationOptions& options) {
  if (options.points < 41) throw std::invalid_argument("calibration.points must be >= 41");
  if (!(options.half_span > 0.0)) {
    throw std::invalid_argument("calibration.half_span must be positive");
  }
  const double center =
      eit_resonance_detuning(scheme, cw_control(drive), drive.delta_c_plus, medium.gamma_trd);
  return linear_grid(center - options.half_span, center + options.half_span, options.points);
}

namespace {

double clamp_beta(double b) { return std::clamp(b, 1e-6, 1.0); }
double clamp_gamma(double g) { return std::max(g, 0.0); }

}  // namespace

double spectrum_mismatch(std::span<const double> detunings, std::span<const double> target,
                         const MediumConfig& medium, const DriveConfig& drive,
                         const LevelScheme& scheme, double beta, double gamma_inh) {
  const EffectiveParams p{clamp_beta(beta), clamp_gamma(gamma_inh), 0.0};
  double worst = 0.0;
  for (std::size_t i = 0; i < detunings.size(); ++i) {
    const double t = transmission_homogeneous(detunings[i], medium, drive, scheme, p);
    worst = std::max(worst, std::abs(t - target[i]));
  }
  return worst;
}

EffectiveParams calibrate_to_target(std::span<const double> detunings,
                                    std::span<const double> target, const MediumConfig& medium,
                                    const DriveConfig& drive, const LevelScheme& scheme,
                                    const CalibrationOptions& options) {
  if (detunings.size() != target.size() || detunings.empty()) {
    throw std::invalid_argument("calibration target must match the detuning grid");
  }
  auto objective = [&](const std::array<double, 2>& x) {
    return spectrum_mismatch(detunings, target, medium, drive, scheme, x[0], x[1]);
  };
  auto nm = nelder_mead(objective, {options.beta_start, options.gamma_start}, {0.1, 0.01},
                        options.max_evaluations);
  std::array<double, 2> best{clamp_beta(nm.x[0]), clamp_gamma(nm.x[1])};
  double best_value = objective(best);

  // Local grid refinement around the simplex optimum, shrinking each pass.
  double db = 0.01, dg = 1e-3;
  for (int pass = 0; pass < 4; ++pass) {
    const auto center = best;
    for (int i = -5; i <= 5; ++i) {
      for (int j = -5; j <= 5; ++j) {
        const std::array<double, 2> x{clamp_beta(center[0] + i * db),
                                      clamp_gamma(center[1] + j * dg)};
        const double v = objective(x);
        if (v < best_value) {
          best_value = v;
          best = x;
        }
      }
    }
    db *= 0.2;
    dg *= 0.2;
  }

  EffectiveParams out{best[0], best[1], best_value};
  if (!(best_value < options.tolerance)) {
    throw CalibrationError(
        fmt::format("calibration did not converge: residual {:.4g} >= {:.4g} (best beta = {:.6g}, "
                    "gamma_inh = {:.6g})",
                    best_value, options.tolerance, out.beta, out.gamma_inh),
        out);
  }
  return out;
}

EffectiveParams calibrate(const MediumConfig& medium, const DriveConfig& drive,
                          const LevelScheme& scheme, std::span<const double> detunings,
                          const CalibrationOptions& options) {
  std::vector<double> target(detunings.size());
  for (std::size_t i = 0; i < detunings.size(); ++i) {
    target[i] = transmission_inhomogeneous(detunings[i], medium, drive, scheme,
                                           options.quadrature).transmission;
  }
  return calibrate_to_target(detunings, target, medium, drive, scheme, options);
}

EffectiveParams calibrate(const MediumConfig& medium, const DriveConfig& drive,
                          const LevelScheme& scheme, const CalibrationOptions& options) {
  const auto grid = calibration_grid(medium, drive, scheme, options);
  return calibrate(medium, drive, scheme, grid, options);
}

namespace {

std::string cache_key(const MediumConfig& m, const DriveConfig& d, const LevelScheme& s,
                      const CalibrationOptions& o) {
  const Complex oc = cw_control(d);
  return fmt::format(
      "{:a}|{:a}|{:a}|{:a}|{:a}|{:a}|{:a}|{:a}|{:a}|{:a}|{:a}|{:a}|{:a}|{:a}|{:a}|{:a}|{:a}|{:a}|"
      "{:a}|{:a}|{}|{}|{}|{}|{}",
      m.od, m.theta, m.gamma_trd, m.sigma_pc, m.sigma_a, m.k_thermal, oc.real(), oc.imag(),
      d.delta_c_plus, s.delta_34, s.delta_35, s.delta_36, s.s_tilde_14, s.s_tilde_15,
      s.s_tilde_25, s.s_tilde_26, o.beta_start, o.gamma_start, o.half_span, o.tolerance, o.points,
      o.max_evaluations, o.quadrature.radial_nodes, o.quadrature.velocity_nodes, s.gamma);
}

}  // namespace

EffectiveParams CalibrationCache::get(const MediumConfig& medium, const DriveConfig& drive,
                                      const LevelScheme& scheme,
                                      const CalibrationOptions& options) {
  const std::string key = cache_key(medium, drive, scheme, options);
  {
    std::lock_guard lock(mutex_);
    if (auto it = entries_.find(key); it != entries_.end()) return it->second;
  }
  const EffectiveParams p = calibrate(medium, drive, scheme, options);
  std::lock_guard lock(mutex_);
  entries_.emplace(key, p);
  return p;
}

std::size_t CalibrationCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

void write_calibration_csv(std::ostream& os, std::span<const CalibrationRow> rows) {
  os << "theta_K,omega_c_over_gamma,beta,gamma_inh_over_gamma,residual\n";
  for (const auto& r : rows) {
    os << fmt::format("{:.9g},{:.9g},{:.9g},{:.9g},{:.9g}\n", r.theta, r.omega_c, r.params.beta,
                      r.params.gamma_inh, r.params.residual);
  }
}

}  // namespace eitsim
