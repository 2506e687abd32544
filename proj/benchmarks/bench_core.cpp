#include <memory>

#include <benchmark/benchmark.h>

#include "gdp/harmonics.hpp"
#include "gdp/netgdp.hpp"
#include "gdp/ntk.hpp"
#include "gdp/random.hpp"
#include "gdp/spectral.hpp"
#include "gdp/target.hpp"

using namespace gdp;
using harmonics::SphereDim;

namespace {

target::TrainingSet training_set(int d, int n) {
  const auto spectrum = ntk::spectrum_closed_form(SphereDim(d), 4);
  const auto t = target::make_zonal_target(SphereDim(d), 1, {0.5, 0.3}, 5.0, spectrum, 1);
  return target::make_training_set(t, n, 0.1, 2, 3);
}

void BM_SpectrumClosedForm(benchmark::State& state) {
  const SphereDim d(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ntk::spectrum_closed_form(d, 50));
}
BENCHMARK(BM_SpectrumClosedForm)->Arg(5)->Arg(50)->Arg(500);

void BM_SpectrumQuadrature(benchmark::State& state) {
  const SphereDim d(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ntk::spectrum_quadrature(d, 10));
}
BENCHMARK(BM_SpectrumQuadrature)->Arg(5)->Arg(20);

void BM_SampleSphere(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(harmonics::sample_sphere(SphereDim(10), n, 7));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_SampleSphere)->Arg(1000)->Arg(100000);

void BM_BuildGram(benchmark::State& state) {
  const PointSet x = harmonics::sample_sphere(SphereDim(10), static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(spectral::build_gram(x));
}
BENCHMARK(BM_BuildGram)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_Eigendecompose(benchmark::State& state) {
  const PointSet x = harmonics::sample_sphere(SphereDim(10), static_cast<int>(state.range(0)), 1);
  const auto gram = spectral::build_gram(x);
  for (auto _ : state) benchmark::DoNotOptimize(spectral::eigendecompose(gram));
}
BENCHMARK(BM_Eigendecompose)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_KernelTrain(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto ts = training_set(10, n);
  auto eig = std::make_shared<const spectral::Eigensystem>(
      spectral::eigendecompose(spectral::build_gram(ts.features)));
  const spectral::SpectralProjector p(eig, 11);
  const netgdp::GdpConfig cfg{0.5, n / 10, 11, netgdp::Backend::KernelExact};
  for (auto _ : state) benchmark::DoNotOptimize(netgdp::kernel_train(ts, p, cfg));
}
BENCHMARK(BM_KernelTrain)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_GdpStep(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const auto ts = training_set(5, 256);
  auto eig = std::make_shared<const spectral::Eigensystem>(
      spectral::eigendecompose(spectral::build_gram(ts.features)));
  const spectral::SpectralProjector p(eig, 6);
  const auto net = netgdp::init_network(m, SphereDim(5), 1.0, 4);
  for (auto _ : state) benchmark::DoNotOptimize(netgdp::gdp_step(net, ts.features, ts.y, p, 0.5));
}
BENCHMARK(BM_GdpStep)->Arg(1024)->Arg(16384)->Unit(benchmark::kMillisecond);

void BM_SupKernelError(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  Rng rng = make_rng(5);
  std::normal_distribution<double> normal;
  Matrix w(m, 10);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = normal(rng);
  const PointSet probes = harmonics::sample_sphere(SphereDim(10), 50, 6);
  for (auto _ : state) benchmark::DoNotOptimize(ntk::sup_kernel_error(w, probes));
}
BENCHMARK(BM_SupKernelError)->Arg(1024)->Arg(65536)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
