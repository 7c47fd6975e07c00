#include "eitsim/drive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

namespace eitsim {

ControlEnvelope& ControlEnvelope::switch_to(double start, Complex level, double ramp) {
  if (ramp < 0.0) throw std::invalid_argument("control ramp must be non-negative");
  if (!switches_.empty()) {
    const auto& last = switches_.back();
    if (start < last.start + last.ramp) {
      throw std::invalid_argument("control switches must be ordered and non-overlapping");
    }
  }
  switches_.push_back({start, level, ramp});
  return *this;
}

Complex ControlEnvelope::operator()(double t) const {
  Complex level = initial_;
  for (const auto& s : switches_) {
    if (t <= s.start) break;
    if (s.ramp > 0.0 && t < s.start + s.ramp) {
      const double x = (t - s.start) / s.ramp;
      const double blend = 0.5 * (1.0 - std::cos(std::numbers::pi * x));
      return level + (s.level - level) * blend;
    }
    level = s.level;
  }
  return level;
}

double ControlEnvelope::peak_magnitude() const {
  double peak = std::abs(initial_);
  for (const auto& s : switches_) peak = std::max(peak, std::abs(s.level));
  return peak;
}

double ControlEnvelope::min_active_magnitude() const {
  double lowest = std::numeric_limits<double>::infinity();
  auto consider = [&](Complex c) {
    if (std::abs(c) > 0.0) lowest = std::min(lowest, std::abs(c));
  };
  consider(initial_);
  for (const auto& s : switches_) consider(s.level);
  return std::isinf(lowest) ? 0.0 : lowest;
}

bool ControlEnvelope::is_zero() const { return peak_magnitude() == 0.0; }

ControlEnvelope ControlEnvelope::scaled(double factor) const {
  ControlEnvelope out(initial_ * factor);
  for (const auto& s : switches_) out.switches_.push_back({s.start, s.level * factor, s.ramp});
  return out;
}

ProbeEnvelope ProbeEnvelope::gaussian(Complex peak, double fwhm, double center) {
  if (!(fwhm > 0.0)) throw std::invalid_argument("probe pulse FWHM must be positive");
  ProbeEnvelope p;
  p.components_.push_back({Kind::gaussian, peak, center, fwhm});
  return p;
}

ProbeEnvelope ProbeEnvelope::cw(Complex amplitude, double ramp_start, double ramp) {
  if (ramp < 0.0) throw std::invalid_argument("probe ramp must be non-negative");
  ProbeEnvelope p;
  p.components_.push_back({Kind::cw, amplitude, ramp_start, ramp});
  return p;
}

Complex ProbeEnvelope::operator()(double t) const {
  Complex sum{0.0, 0.0};
  for (const auto& c : components_) {
    if (c.kind == Kind::gaussian) {
      // Intensity FWHM w: |Omega|^2 ~ exp(-4 ln2 (t-t0)^2 / w^2).
      const double x = (t - c.center) / c.width;
      sum += c.amplitude * std::exp(-2.0 * std::numbers::ln2 * x * x);
    } else {
      if (t <= c.center) continue;
      if (c.width > 0.0 && t < c.center + c.width) {
        const double x = (t - c.center) / c.width;
        sum += c.amplitude * 0.5 * (1.0 - std::cos(std::numbers::pi * x));
      } else {
        sum += c.amplitude;
      }
    }
  }
  return sum;
}

double ProbeEnvelope::magnitude_bound() const {
  double bound = 0.0;
  for (const auto& c : components_) bound += std::abs(c.amplitude);
  return bound;
}

ProbeEnvelope ProbeEnvelope::operator+(const ProbeEnvelope& other) const {
  ProbeEnvelope out = *this;
  out.components_.insert(out.components_.end(), other.components_.begin(),
                         other.components_.end());
  return out;
}

ProbeEnvelope ProbeEnvelope::scaled(Complex factor) const {
  ProbeEnvelope out = *this;
  for (auto& c : out.components_) c.amplitude *= factor;
  return out;
}

double DriveConfig::weak_probe_ratio() const {
  double weakest = std::numeric_limits<double>::infinity();
  for (const ControlEnvelope* env : {&omega_c_plus, &omega_c_minus}) {
    const double m = env->min_active_magnitude();
    if (m > 0.0) weakest = std::min(weakest, m);
  }
  if (std::isinf(weakest)) return 0.0;
  return probe.magnitude_bound() / weakest;
}

std::vector<std::string> drive_warnings(const DriveConfig& drive) {
  std::vector<std::string> out;
  const double ratio = drive.weak_probe_ratio();
  if (ratio > kWeakProbeWarningRatio) {
    out.push_back(fmt::format(
        "weak-probe condition violated: max|Omega_p|/min|Omega_c| = {:.3g} exceeds {:.3g}",
        ratio, kWeakProbeWarningRatio));
  }
  return out;
}

}  // namespace eitsim
