#pragma once

#include <stdexcept>
#include <string>

#include "eitsim/units.hpp"

namespace eitsim {

/// Atomic constants of the five-level scheme (plus the eliminated sixth level).
///
/// States: |1> = F=1, |2> = F=2 ground levels; |3> = F'=1, |4> = F'=0,
/// |5> = F'=2 excited levels and |6> = F'=3, which only enters through the
/// control-induced light shift. Every frequency is in units of Gamma.
///
/// The normalized strength factors are taken relative to |1>-|3> for the probe
/// and |2>-|3> for the control, so s_tilde_13 = s_tilde_23 = 1 implicitly.
struct LevelScheme {
  double gamma = 1.0;
  double delta_34 = 0.0;
  double delta_35 = 0.0;
  double delta_36 = 0.0;
  double delta_omega_21 = 0.0;

  double s_tilde_14 = 0.0;
  double s_tilde_15 = 0.0;
  double s_tilde_25 = 0.0;
  double s_tilde_26 = 0.0;

  // Absolute reference strengths S_13 and S_23, used to reconstruct the
  // un-normalized factors S_{FF'} = s_tilde^2 * S_ref.
  double s_13 = 1.0;
  double s_23 = 1.0;

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;

  /// S_{1F'} for F' = 0, 1, 2 reconstructed from the normalized factors.
  [[nodiscard]] double strength_1(int f_prime) const;
  /// S_{2F'} for F' = 1, 2, 3 (F' = 0 is dipole forbidden from F=2).
  [[nodiscard]] double strength_2(int f_prime) const;
};

/// Rb-87 D2 constants in units of Gamma = 2pi x 6.07 MHz.
LevelScheme default_rb87_d2();

/// Ideal Lambda system: only |1>, |2>, |3> are coupled.
LevelScheme three_level_scheme(double delta_omega_21 = 0.0);

/// Thrown when the adiabatic elimination of |6> is invalid (control resonant
/// with the eliminated level).
class EliminationError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline constexpr double kDefaultEliminationEpsilon = 1e-6;

/// Light shift of |2> from one control component via the eliminated level:
/// -|s_tilde_26 * omega_c|^2 / (4 (delta_36 - delta_c)).
double stark_shift_component(Complex omega_c, double delta_c, const LevelScheme& scheme,
                             double epsilon = kDefaultEliminationEpsilon);

/// Total light shift from both counterpropagating controls.
double stark_shift(Complex omega_c_plus, Complex omega_c_minus, const LevelScheme& scheme,
                   double delta_c_plus, double delta_c_minus,
                   double epsilon = kDefaultEliminationEpsilon);

}  // namespace eitsim
