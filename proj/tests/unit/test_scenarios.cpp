#include <doctest.h>

#include <cmath>

#include "eitsim/scenarios.hpp"

using namespace eitsim;

namespace {

SimulationGrid grid(double t_end, int n_max = 0) {
  SimulationGrid g;
  g.nz = 64;
  g.dt = 0.01;
  g.t_end = t_end;
  g.n_max = n_max;
  g.kernel = KernelMode::serial;
  return g;
}

PulseSpec pulse(double fwhm, double center) {
  PulseSpec p;
  p.fwhm = fwhm;
  p.center = center;
  return p;
}

double energy_sum(const ScenarioResult& r) {
  double f = 0.0, b = 0.0;
  for (const auto& w : r.windows) {
    f += w.energy_forward;
    b += w.energy_backward;
  }
  return std::abs(f - r.output_energy_forward) + std::abs(b - r.output_energy_backward);
}

}  // namespace

TEST_CASE("EIT window width") {
  const auto s = default_rb87_d2();
  CHECK(eit_window_width(16.0, 2.0, s) == doctest::Approx(1.0));
  CHECK(eit_window_width(53.0, std::hypot(2.6, 3.8), s) == doctest::Approx(2.91).epsilon(1e-3));
  CHECK(eit_window_width(1e12, 3.0, s) < 1e-5);
  CHECK_THROWS_AS(eit_window_width(0.0, 3.0, s), std::invalid_argument);
}

TEST_CASE("phase-matching detuning") {
  const auto s = default_rb87_d2();
  CHECK(phase_matching_detuning(1e-4, s) == doctest::Approx(-0.1126).epsilon(1e-3));
  CHECK(phase_matching_detuning(0.0, s) == 0.0);
  CHECK_THROWS_AS(phase_matching_detuning(1.5, s), std::invalid_argument);
}

TEST_CASE("window integral of a piecewise-linear trace") {
  const std::vector<double> t{0.0, 1.0, 2.0, 4.0};
  const std::vector<double> y{0.0, 2.0, 2.0, 0.0};
  CHECK(integrate_window(t, y, 0.0, 4.0) == doctest::Approx(5.0));
  CHECK(integrate_window(t, y, 0.5, 1.5) == doctest::Approx(0.75 + 1.0));
  CHECK(integrate_window(t, y, 3.0, 10.0) == doctest::Approx(0.5));
  CHECK(integrate_window(t, y, 2.0, 2.0) == 0.0);
}

TEST_CASE("vacuum leaves the pulse undelayed and unchanged") {
  MediumConfig m;
  const auto d = slow_light_drive(3.0, pulse(6.0, 15.0), 0.0, 0.0);
  auto g = grid(40.0);
  const auto r = run_slow_light(d, m, default_rb87_d2(), g);
  CHECK(std::abs(r.delay) <= g.dt);
  for (std::size_t i = 0; i < r.record.time.size(); i += 97) {
    CHECK(r.record.probe_out_forward[i] == doctest::Approx(r.record.probe_in[i]).epsilon(1e-6));
  }
  CHECK(r.transmission == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("slow-light delay follows OD / Omega_c^2") {
  MediumConfig m;
  m.od = 100.0;
  const double oc = 3.8;
  const double tau = m.od / (oc * oc);
  const auto d = slow_light_drive(oc, pulse(0.8 * tau, 3.0 * tau), 0.0, 0.0);
  auto g = grid(8.0 * tau);
  g.nz = 160;
  const auto r = run_slow_light(d, m, three_level_scheme(), g);
  CHECK(r.delay == doctest::Approx(tau).epsilon(0.1));
  CHECK(r.delay > 0.8 * tau);
}

TEST_CASE("stationary-light run without a backward control is slow light") {
  MediumConfig m;
  m.od = 30.0;
  m.gamma_trd = 0.01;
  SlpProtocol protocol;
  const auto p = pulse(6.0, 12.0);
  const auto slp = slp_drive(3.0, 0.0, p, protocol, 0.5, 0.5, 0.4);
  const auto sl = slow_light_drive(3.0, p, 0.5, 0.4);
  const auto g = grid(50.0);
  const auto a = run_slp(slp, m, default_rb87_d2(), g);
  const auto b = run_slow_light(sl, m, default_rb87_d2(), g);
  CHECK(a.output_energy_forward == doctest::Approx(b.output_energy_forward).epsilon(1e-6));
  CHECK(a.delay == doctest::Approx(b.delay).epsilon(1e-6));
  CHECK(a.kind == "slp");
}

TEST_CASE("ideal storage does not depend on the storage time") {
  MediumConfig m;
  m.od = 30.0;
  const auto p = pulse(4.0, 10.0);
  auto efficiency = [&](double dtau) {
    StorageProtocol s{18.0, dtau, 2.0};
    const auto d = storage_drive(2.0, p, s, 0.0, 0.0);
    auto g = grid(18.0 + dtau + 40.0);
    return run_storage(d, m, three_level_scheme(), g);
  };
  const auto a = efficiency(10.0);
  const auto b = efficiency(25.0);
  CHECK(a.efficiency > 0.1);
  CHECK(a.efficiency == doctest::Approx(b.efficiency).epsilon(1e-4));
  CHECK(a.storage_time == 10.0);
  CHECK(energy_sum(a) < 1e-9 * a.input_energy);
}

TEST_CASE("storage efficiency decays with the storage time") {
  MediumConfig m;
  m.od = 30.0;
  m.gamma_trd = 0.01;
  const auto p = pulse(4.0, 10.0);
  double last = 1.0;
  for (double dtau : {5.0, 15.0, 30.0}) {
    StorageProtocol s{18.0, dtau, 2.0};
    const auto d = storage_drive(2.0, p, s, 0.0, 0.0);
    const auto r = run_storage(d, m, default_rb87_d2(), grid(18.0 + dtau + 40.0));
    CHECK(r.efficiency < last);
    CHECK(r.output_energy_forward + r.output_energy_backward <= r.input_energy);
    last = r.efficiency;
  }
}

TEST_CASE("storage needs a switch-off and a switch-on") {
  MediumConfig m;
  m.od = 10.0;
  const auto d = slow_light_drive(3.0, pulse(4.0, 10.0), 0.0, 0.0);
  CHECK_THROWS_AS(run_storage(d, m, default_rb87_d2(), grid(30.0)), std::invalid_argument);
  CHECK_THROWS_AS(storage_drive(3.0, pulse(4.0, 10.0), StorageProtocol{10.0, 1.0, 2.0}, 0.0, 0.0),
                  std::invalid_argument);
}

TEST_CASE("stationary-light windows partition the output and runs are deterministic") {
  MediumConfig m;
  m.od = 30.0;
  m.gamma_trd = 0.006;
  m.phase_mismatch = 14.3;
  const auto d = slp_drive(2.6, 3.8, pulse(5.0, 10.0), SlpProtocol{12.0, 24.0, 1.9}, 1.0, -2.5,
                           0.45);
  const auto g = grid(60.0, 2);
  const auto a = run_slp(d, m, default_rb87_d2(), g);
  const auto b = run_slp(d, m, default_rb87_d2(), g);
  CHECK(energy_sum(a) < 1e-9 * a.input_energy);
  CHECK(a.window("leakage").start == 12.0);
  CHECK(a.window("retrieval").start == 24.0);
  CHECK(a.output_energy_forward == b.output_energy_forward);
  CHECK(a.output_energy_backward == b.output_energy_backward);
  CHECK(a.output_energy_forward + a.output_energy_backward <= a.input_energy);
  CHECK(to_json(a).dump() == to_json(b).dump());
}
