#include "eitsim/kernels.hpp"

#include <cmath>

namespace eitsim::kernels {

StageCoefficients stage_coefficients(const LevelScheme& scheme, const DriveConfig& drive,
                                     const SimulationGrid& grid, double t, double gamma_21) {
  StageCoefficients c;
  c.layout = CoherenceLayout(grid.n_max);
  c.nz = grid.nz;
  c.nv = static_cast<int>(grid.velocity_classes.size());
  c.s14 = scheme.s_tilde_14;
  c.s15 = scheme.s_tilde_15;
  c.s25 = scheme.s_tilde_25;

  const Complex oc_p = drive.omega_c_plus(t);
  const Complex oc_m = drive.omega_c_minus(t);
  c.half_c_plus = 0.5 * kI * oc_p;
  c.half_c_minus = 0.5 * kI * oc_m;

  const auto& lay = c.layout;
  const int n = lay.n_max();
  const int bs = lay.block_size();
  const double half_gamma = 0.5 * scheme.gamma;
  c.rates.resize(static_cast<std::size_t>(c.nv) * bs);

  for (int v = 0; v < c.nv; ++v) {
    const double kv = grid.velocity_classes[v].doppler;
    // Forward beams see -kv, backward beams +kv.
    const double dp = drive.delta_p_plus - kv;
    const double zeta = drive.zeta() + 2.0 * kv;
    const double shift = stark_shift(oc_p, oc_m, scheme, drive.delta_c_plus - kv,
                                     drive.delta_c_minus + kv);
    const double delta = drive.delta_p_plus - drive.delta_c_plus - shift;

    Complex* r = c.rates.data() + static_cast<std::size_t>(v) * bs;
    for (int m = -n; m <= n; ++m) r[lay.rho21(m)] = Complex(-0.5 * gamma_21, delta - m * zeta);
    for (int k = -n - 1; k <= n; ++k) {
      r[lay.rho31(k)] = Complex(-half_gamma, dp - k * zeta);
      r[lay.rho51(k)] = Complex(-half_gamma, dp - scheme.delta_35 - k * zeta);
    }
    for (int k = -1; k <= 0; ++k) {
      r[lay.rho41(k)] = Complex(-half_gamma, dp - scheme.delta_34 - k * zeta);
    }
  }
  return c;
}

void block_rhs(const StageCoefficients& c, const Complex* rates, const Complex* y,
               Complex probe_plus, Complex probe_minus, Complex* dy) {
  const auto& lay = c.layout;
  const int n = lay.n_max();
  const Complex* y21 = y + lay.rho21(0);
  const Complex* y31 = y + lay.rho31(0);
  const Complex* y51 = y + lay.rho51(0);
  const Complex* r21 = rates + lay.rho21(0);
  const Complex* r31 = rates + lay.rho31(0);
  const Complex* r51 = rates + lay.rho51(0);
  Complex* d21 = dy + lay.rho21(0);
  Complex* d31 = dy + lay.rho31(0);
  Complex* d51 = dy + lay.rho51(0);

  // (i/2) conj(Omega_c) = -conj((i/2) Omega_c)
  const Complex hcc_p = -std::conj(c.half_c_plus);
  const Complex hcc_m = -std::conj(c.half_c_minus);
  const double s25 = c.s25;

  for (int m = -n; m <= n; ++m) {
    d21[m] = r21[m] * y21[m] + hcc_p * (y31[m] + s25 * y51[m]) +
             hcc_m * (y31[m - 1] + s25 * y51[m - 1]);
  }

  const Complex hp_p = 0.5 * kI * probe_plus;
  const Complex hp_m = 0.5 * kI * probe_minus;
  for (int k = -n - 1; k <= n; ++k) {
    Complex ctl{0.0, 0.0};
    if (k >= -n) ctl += c.half_c_plus * y21[k];
    if (k + 1 <= n) ctl += c.half_c_minus * y21[k + 1];
    Complex drive{0.0, 0.0};
    if (k == 0) drive = hp_p;
    if (k == -1) drive = hp_m;
    d31[k] = r31[k] * y31[k] + ctl + drive;
    d51[k] = r51[k] * y51[k] + s25 * ctl + c.s15 * drive;
  }

  const int i41p = lay.rho41(0), i41m = lay.rho41(-1);
  dy[i41p] = rates[i41p] * y[i41p] + c.s14 * hp_p;
  dy[i41m] = rates[i41m] * y[i41m] + c.s14 * hp_m;
}

void rhs_serial(const StageCoefficients& c, const Complex* y, const Complex* probe_plus,
                const Complex* probe_minus, Complex* dy) {
  const std::size_t bs = c.layout.block_size();
  for (int v = 0; v < c.nv; ++v) {
    const Complex* rates = c.rates.data() + v * bs;
    for (int j = 0; j < c.nz; ++j) {
      const std::size_t off = (static_cast<std::size_t>(v) * c.nz + j) * bs;
      block_rhs(c, rates, y + off, probe_plus[j], probe_minus[j], dy + off);
    }
  }
}

void rhs_parallel(const StageCoefficients& c, const Complex* y, const Complex* probe_plus,
                  const Complex* probe_minus, Complex* dy) {
  const std::size_t bs = c.layout.block_size();
  const int nv = c.nv, nz = c.nz;
#pragma omp parallel for collapse(2) schedule(static)
  for (int v = 0; v < nv; ++v) {
    for (int j = 0; j < nz; ++j) {
      const std::size_t off = (static_cast<std::size_t>(v) * nz + j) * bs;
      block_rhs(c, c.rates.data() + v * bs, y + off, probe_plus[j], probe_minus[j], dy + off);
    }
  }
}

void axpy_serial(std::size_t n, double a, const Complex* x, const Complex* y, Complex* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = y[i] + a * x[i];
}

void axpy_parallel(std::size_t n, double a, const Complex* x, const Complex* y, Complex* out) {
  const auto sn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < sn; ++i) out[i] = y[i] + a * x[i];
}

void rk4_combine_serial(std::size_t n, double h, const Complex* k1, const Complex* k2,
                        const Complex* k3, const Complex* k4, Complex* y) {
  const double w = h / 6.0;
  for (std::size_t i = 0; i < n; ++i) y[i] += w * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
}

void rk4_combine_parallel(std::size_t n, double h, const Complex* k1, const Complex* k2,
                          const Complex* k3, const Complex* k4, Complex* y) {
  const double w = h / 6.0;
  const auto sn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < sn; ++i) y[i] += w * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
}

namespace {

void source_at(const StageCoefficients& c, const std::vector<VelocityClass>& classes,
               const Complex* y, int j, Complex& plus, Complex& minus) {
  const auto& lay = c.layout;
  const std::size_t bs = lay.block_size();
  Complex sp{0.0, 0.0}, sm{0.0, 0.0};
  for (int v = 0; v < c.nv; ++v) {
    const Complex* b = y + (static_cast<std::size_t>(v) * c.nz + j) * bs;
    const double w = classes[v].weight;
    sp += w * (b[lay.rho31(0)] + c.s14 * b[lay.rho41(0)] + c.s15 * b[lay.rho51(0)]);
    sm += w * (b[lay.rho31(-1)] + c.s14 * b[lay.rho41(-1)] + c.s15 * b[lay.rho51(-1)]);
  }
  plus = sp;
  minus = sm;
}

}  // namespace

void sources_serial(const StageCoefficients& c, const std::vector<VelocityClass>& classes,
                    const Complex* y, Complex* source_plus, Complex* source_minus) {
  for (int j = 0; j < c.nz; ++j) source_at(c, classes, y, j, source_plus[j], source_minus[j]);
}

void sources_parallel(const StageCoefficients& c, const std::vector<VelocityClass>& classes,
                      const Complex* y, Complex* source_plus, Complex* source_minus) {
  const int nz = c.nz;
#pragma omp parallel for schedule(static)
  for (int j = 0; j < nz; ++j) source_at(c, classes, y, j, source_plus[j], source_minus[j]);
}

void march(std::size_t n, double h, double phi, Complex input, const Complex* f, Complex* out) {
  // u = exp(-i phi s) Omega obeys du/ds = exp(-i phi s) f(s); integrate the
  // right side with cubic interpolation over each cell.
  out[0] = input;
  if (n < 2) return;
  std::vector<Complex> g(n);
  for (std::size_t j = 0; j < n; ++j) g[j] = std::exp(Complex(0.0, -phi * h * j)) * f[j];

  Complex u = input;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    Complex cell;
    if (n < 4) {
      cell = 0.5 * (g[j] + g[j + 1]);
    } else if (j == 0) {
      cell = (9.0 * g[0] + 19.0 * g[1] - 5.0 * g[2] + g[3]) / 24.0;
    } else if (j + 2 == n) {
      cell = (g[j - 2] - 5.0 * g[j - 1] + 19.0 * g[j] + 9.0 * g[j + 1]) / 24.0;
    } else {
      cell = (-g[j - 1] + 13.0 * g[j] + 13.0 * g[j + 1] - g[j + 2]) / 24.0;
    }
    u += h * cell;
    out[j + 1] = std::exp(Complex(0.0, phi * h * (j + 1))) * u;
  }
}

}  // namespace eitsim::kernels
