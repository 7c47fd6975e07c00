#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "eitsim/calibration.hpp"
#include "eitsim/config.hpp"

using namespace eitsim;

namespace {

DriveConfig control(double omega_c, double delta_c = 0.0) {
  DriveConfig d;
  d.omega_c_plus = ControlEnvelope(omega_c);
  d.delta_c_plus = delta_c;
  return d;
}

MediumConfig storage_geometry() {
  auto c = parse_config_text(R"(
format_version: 1
medium: {od: 145, temperature_uK: 450, gamma_trd: 0.008}
)");
  return resolve_run(c, Scenario::spectrum).medium;
}

}  // namespace

TEST_CASE("Nelder-Mead finds the minimum of a shifted quadratic") {
  auto f = [](const std::array<double, 2>& x) {
    return std::pow(x[0] - 0.7, 2) + 10.0 * std::pow(x[1] - 0.02, 2) + 0.5 * x[0] * x[1];
  };
  const auto r = nelder_mead(f, {0.0, 0.0}, {0.3, 0.3}, 2000, 1e-16);
  // Stationary point of the quadratic form.
  const double det = 2.0 * 20.0 - 0.25;
  const double x0 = (1.4 * 20.0 - 0.5 * 0.4) / det;
  const double x1 = (2.0 * 0.4 - 0.5 * 1.4) / det;
  CHECK(r.x[0] == doctest::Approx(x0).epsilon(1e-5));
  CHECK(r.x[1] == doctest::Approx(x1).epsilon(1e-4));
  for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] <= r.history[i - 1]);
  CHECK(r.evaluations <= 2000);
}

TEST_CASE("flat beam on a cold cloud needs no correction") {
  MediumConfig m;
  m.od = 100.0;
  m.gamma_trd = 0.01;
  m.sigma_pc = std::numeric_limits<double>::infinity();
  m.sigma_a = 0.3;
  const auto p = calibrate(m, control(3.7, 1.0), default_rb87_d2());
  CHECK(p.beta == doctest::Approx(1.0).epsilon(0.02));
  CHECK(p.gamma_inh < 1e-3);
  CHECK(p.residual < 0.01);
}

TEST_CASE("storage geometry calibration and its properties") {
  const auto m = storage_geometry();
  const auto scheme = default_rb87_d2();
  const auto d = control(3.7, 1.0);
  const auto grid = calibration_grid(m, d, scheme);
  CHECK(grid.size() >= 41);
  const auto p = calibrate(m, d, scheme);
  CHECK(p.beta > 0.0);
  CHECK(p.beta <= 1.0);
  CHECK(p.gamma_inh >= 0.0);
  CHECK(p.residual < 0.01);

  SUBCASE("deterministic") {
    const auto q = calibrate(m, d, scheme);
    CHECK(q.beta == p.beta);
    CHECK(q.gamma_inh == p.gamma_inh);
  }
  SUBCASE("idempotent on its own homogeneous spectrum") {
    std::vector<double> target;
    for (double dp : grid) {
      DriveConfig eff = d;
      eff.omega_c_plus = ControlEnvelope(p.beta * 3.7);
      MediumConfig h = m;
      h.gamma_inh = p.gamma_inh;
      target.push_back(transmission_homogeneous(dp, h, eff, scheme));
    }
    const auto q = calibrate_to_target(grid, target, m, d, scheme);
    CHECK(q.beta == doctest::Approx(p.beta).epsilon(2e-3));
    CHECK(q.gamma_inh == doctest::Approx(p.gamma_inh).epsilon(0.05));
    CHECK(q.residual < 1e-3);
  }
  SUBCASE("gamma_inh grows with the control intensity") {
    const auto q = calibrate(m, control(1.85, 1.0), scheme);
    CHECK(p.gamma_inh / q.gamma_inh == doctest::Approx(4.0).epsilon(0.25));
  }
}

TEST_CASE("unreachable target reports the best pair") {
  MediumConfig m;
  m.od = 50.0;
  m.sigma_a = 0.3;
  const auto d = control(3.0);
  const auto grid = linear_grid(-3.0, 3.0, 41);
  std::vector<double> target(grid.size(), 0.5);
  CalibrationOptions o;
  o.max_evaluations = 60;
  try {
    calibrate_to_target(grid, target, m, d, default_rb87_d2(), o);
    FAIL("expected CalibrationError");
  } catch (const CalibrationError& e) {
    CHECK(e.best().residual >= 0.01);
    CHECK(std::string(e.what()).find("residual") != std::string::npos);
  }
}

TEST_CASE("calibration cache memoizes by parameter tuple") {
  const auto m = storage_geometry();
  CalibrationCache cache;
  const auto a = cache.get(m, control(3.7, 1.0), default_rb87_d2());
  const auto b = cache.get(m, control(3.7, 1.0), default_rb87_d2());
  CHECK(cache.size() == 1);
  CHECK(a.beta == b.beta);
  CHECK(a.gamma_inh == b.gamma_inh);
  cache.get(m, control(3.5, 1.0), default_rb87_d2());
  CHECK(cache.size() == 2);
}

TEST_CASE("calibration table export") {
  std::ostringstream os;
  std::vector<CalibrationRow> rows{{450e-6, 3.7, {0.9, 0.015, 0.004}}};
  write_calibration_csv(os, rows);
  CHECK(os.str() == "theta_K,omega_c_over_gamma,beta,gamma_inh_over_gamma,residual\n"
                    "0.00045,3.7,0.9,0.015,0.004\n");
}
