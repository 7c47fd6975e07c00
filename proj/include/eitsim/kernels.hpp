#pragma once

#include <cstddef>
#include <vector>

#include "eitsim/mb_solver.hpp"

// Low-level building blocks of the Maxwell-Bloch integrator. Every loop nest
// comes in a serial reference version and an OpenMP version; both evaluate the
// same per-block arithmetic in the same order, so their results are bitwise
// identical.
namespace eitsim::kernels {

/// Everything the local Bloch right-hand side needs at one instant.
struct StageCoefficients {
  CoherenceLayout layout{0};
  int nz = 0;
  int nv = 0;
  std::vector<Complex> rates;  // nv * block_size diagonal rates
  Complex half_c_plus;         // (i/2) Omega_c^+
  Complex half_c_minus;        // (i/2) Omega_c^-
  double s14 = 0.0;
  double s15 = 0.0;
  double s25 = 0.0;
};

StageCoefficients stage_coefficients(const LevelScheme& scheme, const DriveConfig& drive,
                                     const SimulationGrid& grid, double t, double gamma_21);

/// Right-hand side of one (v, z) block. probe_plus/probe_minus are the local
/// probe envelopes Omega_p^+(z), Omega_p^-(z).
void block_rhs(const StageCoefficients& c, const Complex* rates, const Complex* y,
               Complex probe_plus, Complex probe_minus, Complex* dy);

void rhs_serial(const StageCoefficients& c, const Complex* y, const Complex* probe_plus,
                const Complex* probe_minus, Complex* dy);
void rhs_parallel(const StageCoefficients& c, const Complex* y, const Complex* probe_plus,
                  const Complex* probe_minus, Complex* dy);

/// out = y + a * x
void axpy_serial(std::size_t n, double a, const Complex* x, const Complex* y, Complex* out);
void axpy_parallel(std::size_t n, double a, const Complex* x, const Complex* y, Complex* out);

/// y += h/6 (k1 + 2 k2 + 2 k3 + k4)
void rk4_combine_serial(std::size_t n, double h, const Complex* k1, const Complex* k2,
                        const Complex* k3, const Complex* k4, Complex* y);
void rk4_combine_parallel(std::size_t n, double h, const Complex* k1, const Complex* k2,
                          const Complex* k3, const Complex* k4, Complex* y);

/// Velocity-averaged polarization sources of the forward (k = 0) and
/// backward (k = -1) probe at every z.
void sources_serial(const StageCoefficients& c, const std::vector<VelocityClass>& classes,
                    const Complex* y, Complex* source_plus, Complex* source_minus);
void sources_parallel(const StageCoefficients& c, const std::vector<VelocityClass>& classes,
                      const Complex* y, Complex* source_plus, Complex* source_minus);

/// Solves dOmega/ds = i phi Omega + f(s) on the uniform grid s_j = j h from
/// Omega(0) = input, with f known on the grid (fourth-order quadrature of the
/// integrating-factor form). `out` may not alias `f`.
void march(std::size_t n, double h, double phi, Complex input, const Complex* f, Complex* out);

}  // namespace eitsim::kernels
