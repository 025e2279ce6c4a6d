// Serial reference vs OpenMP kernels. Arg 0 = serial, 1 = parallel.
#include <benchmark/benchmark.h>

#include "kaclab/chaos.hpp"
#include "kaclab/kac_pde.hpp"
#include "kaclab/kac_walk.hpp"
#include "kaclab/spectral.hpp"

namespace {

kac::Exec exec_of(const benchmark::State& st) { return st.range(0) ? kac::Exec::parallel : kac::Exec::serial; }

void BM_Replicas1D(benchmark::State& st) {
  const std::size_t n = 50;
  std::vector<double> v(n, 1.0);
  v[0] = 3.0;
  const auto e0 = kac::Ensemble1D::projected(v);
  const kac::spectral::GapEigenfunction F(n);
  const auto rho = kac::ScatteringDensity::uniform();
  const std::vector<double> times{0.0, 1.0, 2.0};
  for (auto _ : st) {
    auto m = kac::run_replicas(
        e0, [&F](const kac::Ensemble1D& e) { return F(e.v); }, times, 512, rho, {1, 1}, exec_of(st));
    benchmark::DoNotOptimize(m.values.data());
  }
}
BENCHMARK(BM_Replicas1D)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Replicas3D(benchmark::State& st) {
  const std::size_t n = 20;
  std::vector<kac::Vec3> v(n, {0.1, -0.2, 0.3});
  v[0] = {2.0, 0.0, 0.0};
  v[1] = {0.0, 1.0, -1.0};
  const auto e0 = kac::Ensemble3D::projected(v);
  const auto b = kac::AngularKernel3D::uniform();
  const std::vector<double> times{0.0, 1.0, 2.0};
  for (auto _ : st) {
    auto m = kac::run_replicas(
        e0, [](const kac::Ensemble3D& e) { return e.v[0][0]; }, times, 512, b, {1, 2}, exec_of(st));
    benchmark::DoNotOptimize(m.values.data());
  }
}
BENCHMARK(BM_Replicas3D)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_FourierRhs(benchmark::State& st) {
  const kac::pde::GridSpec spec;
  const auto rho = kac::ScatteringDensity::uniform();
  const kac::pde::FourierSolver solver(rho, spec);
  const auto phi = kac::pde::CharacteristicGrid::from_density(kac::Density1D::bimodal(0.8), spec.xi_max, spec.m_xi);
  std::vector<kac::pde::cplx> out(phi.phi.size());
  for (auto _ : st) {
    solver.rhs(phi.phi, out, exec_of(st));
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_FourierRhs)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ConditionalZ(benchmark::State& st) {
  const auto f = kac::Density1D::fdelta(0.25);
  for (auto _ : st) {
    auto z = kac::chaos::z_n_estimate(f, 100, 20000, {1, 3}, kac::chaos::ZMethod::conditional, exec_of(st));
    benchmark::DoNotOptimize(z.log_z);
  }
}
BENCHMARK(BM_ConditionalZ)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Mcmc(benchmark::State& st) {
  const kac::chaos::ConditionedProduct cp(kac::Density1D::fdelta(0.25), 50);
  kac::chaos::McmcOptions opt;
  opt.chains = 16;
  opt.samples_per_chain = 32;
  opt.exec = exec_of(st);
  for (auto _ : st) {
    auto s = kac::chaos::sample_conditioned(cp, opt, {1, 4});
    benchmark::DoNotOptimize(s.values.data());
  }
}
BENCHMARK(BM_Mcmc)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
