#include "eitsim/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "eitsim/quadrature.hpp"

namespace eitsim {

void MediumConfig::validate() const {
  auto require = [](bool ok, const char* field, const char* what) {
    if (!ok) throw std::invalid_argument(fmt::format("medium.{} {}", field, what));
  };
  require(od >= 0.0, "od", "must be non-negative");
  require(length > 0.0, "length", "must be positive");
  require(theta >= 0.0, "theta", "must be non-negative");
  require(gamma_trd >= 0.0, "gamma_trd", "must be non-negative");
  require(gamma_inh >= 0.0, "gamma_inh", "must be non-negative");
  require(sigma_pc > 0.0, "sigma_pc", "must be positive");
  require(sigma_a > 0.0, "sigma_a", "must be positive");
  require(k_thermal >= 0.0, "k_thermal", "must be non-negative");
  require(std::isfinite(phase_mismatch), "phase_mismatch", "must be finite");
}

ComplexAbsorption absorption_coefficient(double delta_p, Complex omega_c, double delta_c,
                                         const LevelScheme& scheme, double gamma_21,
                                         double doppler) {
  const double dp = delta_p - doppler;
  const double dc = delta_c - doppler;
  const double shift = stark_shift_component(omega_c, dc, scheme);
  const double half_gamma = 0.5 * scheme.gamma;

  const Complex a3 = 1.0 / Complex(half_gamma, -dp);
  const Complex a4 = 1.0 / Complex(half_gamma, -(dp - scheme.delta_34));
  const Complex a5 = 1.0 / Complex(half_gamma, -(dp - scheme.delta_35));
  // 1/B = 4 [gamma_21/2 - i (Delta_p - Delta_c - Delta_S)]; written without
  // dividing by it so that the dark-state limit 1/B -> 0 stays finite.
  const Complex inv_b = 4.0 * Complex(0.5 * gamma_21, -(dp - dc - shift));
  const double oc2 = std::norm(omega_c);
  const double s14 = scheme.s_tilde_14, s15 = scheme.s_tilde_15, s25 = scheme.s_tilde_25;

  const Complex numerator = inv_b * (a3 + a5 * s15 * s15) + a3 * a5 * (s15 - s25) * (s15 - s25) * oc2;
  const Complex denominator = inv_b + (a3 + a5 * s25 * s25) * oc2;

  Complex alpha = a4 * s14 * s14;
  if (denominator == Complex(0.0, 0.0)) {
    alpha += a3 + a5 * s15 * s15;
  } else {
    alpha += numerator / denominator;
  }
  return {alpha, delta_p};
}

Complex cw_control(const DriveConfig& drive) {
  Complex best = drive.omega_c_plus.initial();
  for (const auto& s : drive.omega_c_plus.switches()) {
    if (std::abs(s.level) > std::abs(best)) best = s.level;
  }
  return best;
}

double transmission_homogeneous(double delta_p, const MediumConfig& medium,
                                const DriveConfig& drive, const LevelScheme& scheme,
                                const std::optional<EffectiveParams>& effective) {
  Complex omega_c = cw_control(drive);
  double gamma_21 = medium.gamma_21();
  if (effective) {
    omega_c *= effective->beta;
    gamma_21 = medium.gamma_trd + effective->gamma_inh;
  }
  const auto a = absorption_coefficient(delta_p, omega_c, drive.delta_c_plus, scheme, gamma_21);
  return std::exp(-0.5 * scheme.gamma * medium.od * a.alpha.real());
}

namespace {

double inhomogeneous_exponent(double delta_p, const MediumConfig& medium, Complex omega_c0,
                              double delta_c, const LevelScheme& scheme, int radial_nodes,
                              int velocity_nodes) {
  // Combined radial weight n(r) * Omega_p(r) = exp(-r^2 / sigma_eff^2).
  const bool flat_beam = std::isinf(medium.sigma_pc);
  const double inv_pc2 = flat_beam ? 0.0 : 1.0 / (medium.sigma_pc * medium.sigma_pc);
  const double inv_eff2 = 1.0 / (medium.sigma_a * medium.sigma_a) + inv_pc2;
  const double r_max = 4.0 / std::sqrt(inv_eff2);
  const QuadratureRule radial = gauss_legendre(radial_nodes, 0.0, r_max);

  QuadratureRule velocity;
  if (medium.k_thermal > 0.0) {
    velocity = gauss_hermite(velocity_nodes);
    for (auto& w : velocity.weights) w /= std::sqrt(std::numbers::pi);
    for (auto& x : velocity.nodes) x *= std::sqrt(2.0) * medium.k_thermal;
  } else {
    velocity.nodes = {0.0};
    velocity.weights = {1.0};
  }

  double norm = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < radial.nodes.size(); ++i) {
    const double r = radial.nodes[i];
    const double w_r = radial.weights[i] * r * std::exp(-r * r * inv_eff2);
    const Complex omega_c = omega_c0 * std::exp(-r * r * inv_pc2);
    double avg = 0.0;
    for (std::size_t j = 0; j < velocity.nodes.size(); ++j) {
      const auto a = absorption_coefficient(delta_p, omega_c, delta_c, scheme, medium.gamma_trd,
                                            velocity.nodes[j]);
      avg += velocity.weights[j] * a.alpha.real();
    }
    norm += w_r;
    sum += w_r * avg;
  }
  return 0.5 * scheme.gamma * medium.od * sum / norm;
}

}  // namespace

InhomogeneousTransmission transmission_inhomogeneous(double delta_p, const MediumConfig& medium,
                                                     const DriveConfig& drive,
                                                     const LevelScheme& scheme,
                                                     const QuadratureSpec& quad) {
  if (quad.radial_nodes < 2 || quad.velocity_nodes < 2) {
    throw std::invalid_argument("quadrature orders must be >= 2");
  }
  if (!(medium.sigma_a > 0.0) || !(medium.sigma_pc > 0.0)) {
    throw std::invalid_argument("sigma_a and sigma_pc must be positive");
  }
  const Complex omega_c = cw_control(drive);
  InhomogeneousTransmission out;
  out.transmission = std::exp(-inhomogeneous_exponent(delta_p, medium, omega_c, drive.delta_c_plus,
                                                      scheme, quad.radial_nodes,
                                                      quad.velocity_nodes));
  if (quad.check_convergence) {
    const double refined =
        std::exp(-inhomogeneous_exponent(delta_p, medium, omega_c, drive.delta_c_plus, scheme,
                                         2 * quad.radial_nodes, 2 * quad.velocity_nodes));
    out.doubled_difference = std::abs(refined - out.transmission);
    out.converged = out.doubled_difference <= kQuadratureTolerance;
    if (!out.converged) {
      spdlog::warn("quadrature not converged at delta_p = {:.4g}: doubling nodes changes T by {:.3g}",
                   delta_p, out.doubled_difference);
    }
  } else {
    out.doubled_difference = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

std::vector<double> linear_grid(double start, double stop, int points) {
  if (points < 1) throw std::invalid_argument("grid needs at least one point");
  std::vector<double> out(points);
  if (points == 1) {
    out[0] = start;
    return out;
  }
  const double step = (stop - start) / (points - 1);
  for (int i = 0; i < points; ++i) out[i] = start + step * i;
  out.back() = stop;
  return out;
}

std::vector<SpectrumPoint> sweep_spectrum(std::span<const double> detunings,
                                          const std::function<double(double)>& transmission) {
  std::vector<SpectrumPoint> out(detunings.size());
  const auto n = static_cast<std::ptrdiff_t>(detunings.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = {detunings[i], transmission(detunings[i])};
  }
  return out;
}

void write_spectrum_csv(std::ostream& os, std::span<const SpectrumPoint> points) {
  os << "delta_p_over_gamma,transmission\n";
  for (const auto& p : points) os << fmt::format("{:.9g},{:.9g}\n", p.delta_p, p.transmission);
}

PeakLocation find_maximum(const std::function<double(double)>& f, double lo, double hi,
                          int coarse_points, double tolerance) {
  if (!(hi > lo) || coarse_points < 3) throw std::invalid_argument("find_maximum: bad bracket");
  const auto grid = linear_grid(lo, hi, coarse_points);
  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = f(grid[i]);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  double a = grid[best == 0 ? 0 : best - 1];
  double b = grid[std::min(best + 1, grid.size() - 1)];
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tolerance) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  const double fx = f(x);
  if (fx >= best_value) return {x, fx};
  return {grid[best], best_value};
}

double eit_resonance_detuning(const LevelScheme& scheme, Complex omega_c, double delta_c,
                              double gamma_21) {
  if (std::abs(omega_c) == 0.0) return delta_c;
  const double oc2 = std::norm(omega_c);
  // Light shifts from |5> and |6> move the two-photon resonance; bracket both.
  const double shift6 = stark_shift_component(omega_c, delta_c, scheme);
  const double d5 = scheme.delta_35 - delta_c;
  const double shift5 = d5 != 0.0 ? -std::norm(scheme.s_tilde_25 * omega_c) / (4.0 * d5) : 0.0;
  const double center = delta_c + shift6 + shift5;
  const double half_width = 0.5 + 0.05 * oc2;
  auto neg_absorption = [&](double dp) {
    return -absorption_coefficient(dp, omega_c, delta_c, scheme, gamma_21).alpha.real();
  };
  return find_maximum(neg_absorption, center - half_width, center + half_width, 2001, 1e-10)
      .delta_p;
}

}  // namespace eitsim
