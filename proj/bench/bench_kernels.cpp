// Serial reference kernels against their OpenMP counterparts, plus one full
// propagation per mode. Thread count follows OMP_NUM_THREADS.

#include <complex>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>
#include <spdlog/spdlog.h>

#include "eitsim/atomic_model.hpp"
#include "eitsim/kernels.hpp"
#include "eitsim/mb_solver.hpp"

using namespace eitsim;

namespace {

constexpr int kNz = 400;

struct Fixture {
  SimulationGrid grid;
  DriveConfig drive;
  kernels::StageCoefficients coeffs;
  std::vector<VelocityClass> classes;
  std::vector<Complex> y, dy, k2, k3, k4, probe_plus, probe_minus, src_plus, src_minus;

  explicit Fixture(int nv) {
    grid.nz = kNz;
    grid.n_max = 3;
    grid.velocity_classes = nv == 1 ? std::vector<VelocityClass>{{0.0, 1.0}}
                                    : make_velocity_classes(0.3, nv);
    classes = grid.velocity_classes;
    drive.omega_c_plus = ControlEnvelope(3.0);
    drive.omega_c_minus = ControlEnvelope(3.0);
    drive.delta_c_minus = 0.45;
    coeffs = kernels::stage_coefficients(default_rb87_d2(), drive, grid, 0.0, 0.01);
    const std::size_t n =
        static_cast<std::size_t>(coeffs.layout.block_size()) * kNz * classes.size();
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    auto fill = [&](std::vector<Complex>& v, std::size_t size) {
      v.resize(size);
      for (auto& x : v) x = {1e-3 * g(rng), 1e-3 * g(rng)};
    };
    fill(y, n);
    fill(dy, n);
    fill(k2, n);
    fill(k3, n);
    fill(k4, n);
    fill(probe_plus, kNz);
    fill(probe_minus, kNz);
    src_plus.resize(kNz);
    src_minus.resize(kNz);
  }
};

template <bool Parallel>
void BM_rhs(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::rhs_parallel(f.coeffs, f.y.data(), f.probe_plus.data(), f.probe_minus.data(), f.dy.data());
    } else {
      kernels::rhs_serial(f.coeffs, f.y.data(), f.probe_plus.data(), f.probe_minus.data(), f.dy.data());
    }
    benchmark::DoNotOptimize(f.dy.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.y.size()));
}

template <bool Parallel>
void BM_axpy(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::axpy_parallel(f.y.size(), 0.01, f.dy.data(), f.y.data(), f.k2.data());
    } else {
      kernels::axpy_serial(f.y.size(), 0.01, f.dy.data(), f.y.data(), f.k2.data());
    }
    benchmark::DoNotOptimize(f.k2.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.y.size()));
}

template <bool Parallel>
void BM_rk4_combine(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::rk4_combine_parallel(f.y.size(), 1e-6, f.dy.data(), f.k2.data(), f.k3.data(), f.k4.data(), f.y.data());
    } else {
      kernels::rk4_combine_serial(f.y.size(), 1e-6, f.dy.data(), f.k2.data(), f.k3.data(), f.k4.data(), f.y.data());
    }
    benchmark::DoNotOptimize(f.y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.y.size()));
}

template <bool Parallel>
void BM_sources(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::sources_parallel(f.coeffs, f.classes, f.y.data(), f.src_plus.data(), f.src_minus.data());
    } else {
      kernels::sources_serial(f.coeffs, f.classes, f.y.data(), f.src_plus.data(), f.src_minus.data());
    }
    benchmark::DoNotOptimize(f.src_plus.data());
  }
}

template <KernelMode Mode>
void BM_propagate(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  f.grid.kernel = Mode;
  f.grid.dt = 0.02;
  f.grid.t_end = 4.0;
  f.grid.record_stride = 50;
  f.drive.probe = ProbeEnvelope::gaussian(0.01, 1.0, 2.0);
  MediumConfig medium;
  medium.od = 50.0;
  medium.gamma_trd = 0.006;
  const auto scheme = default_rb87_d2();
  for (auto _ : state) {
    auto rec = propagate(f.drive, medium, scheme, f.grid);
    benchmark::DoNotOptimize(rec.probe_out_forward.data());
  }
}

}  // namespace

BENCHMARK(BM_rhs<false>)->Name("rhs/serial")->Arg(1)->Arg(11);
BENCHMARK(BM_rhs<true>)->Name("rhs/parallel")->Arg(1)->Arg(11);
BENCHMARK(BM_axpy<false>)->Name("axpy/serial")->Arg(11);
BENCHMARK(BM_axpy<true>)->Name("axpy/parallel")->Arg(11);
BENCHMARK(BM_rk4_combine<false>)->Name("rk4_combine/serial")->Arg(11);
BENCHMARK(BM_rk4_combine<true>)->Name("rk4_combine/parallel")->Arg(11);
BENCHMARK(BM_sources<false>)->Name("sources/serial")->Arg(11);
BENCHMARK(BM_sources<true>)->Name("sources/parallel")->Arg(11);
BENCHMARK(BM_propagate<KernelMode::serial>)->Name("propagate/serial")->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_propagate<KernelMode::parallel>)->Name("propagate/parallel")->Arg(1)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::err);
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
